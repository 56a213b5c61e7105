//! Families of inequalities: orbits under relabeling of settings, of
//! equal-sized parties, and of the two outcomes of each observable.
//!
//! An inequality `a . p <= b` is handled as the multilinear polynomial
//! `b - sum_S a_S prod_{i in S} e_i`, nonnegative on `{0,1}^n`. Relabelings
//! act on it by substituting observables, and `e_i -> 1 - e_i` for an
//! outcome flip; both keep integer coefficients coprime.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{build_multipartite, Scenario, Subset};
use crate::error::{Error, Result};
use crate::polyhedron::{InequalitySystem, LinearInequality};

/// An orbit met in a system, with the rows of the system that belong to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyClass {
    /// lexicographically minimal normalized member
    pub representative: LinearInequality,
    pub orbit_size: usize,
    /// row indices of the system
    pub members: Vec<usize>,
}

/// Scenario-independent name of a family: the settings per party actually
/// used, and the canonical row in that smallest scenario.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamilyKey {
    pub shape: Vec<usize>,
    pub row: Vec<i64>,
}

/// Polynomial coefficients: index 0 is the constant, `j + 1` coordinate `j`.
type Poly = Vec<i64>;

struct Symmetry {
    /// `perm[j]` is the image of coordinate `j`
    perms: Vec<Vec<usize>>,
    /// for each observable, pairs `(S, S minus i)` of polynomial indices
    flips: Vec<Vec<(usize, usize)>>,
}

fn permutation_generators(parties: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let id: Vec<usize> = (0..n).collect();
    let mut gens = Vec::new();
    for obs in parties {
        let k = obs.len();
        if k >= 2 {
            let mut t = id.clone();
            t.swap(obs[0], obs[1]);
            gens.push(t);
        }
        if k >= 3 {
            let mut c = id.clone();
            for j in 0..k {
                c[obs[j]] = obs[(j + 1) % k];
            }
            gens.push(c);
        }
    }
    for w in parties.windows(2) {
        if w[0].len() == w[1].len() {
            let mut s = id.clone();
            for (&a, &b) in w[0].iter().zip(&w[1]) {
                s[a] = b;
                s[b] = a;
            }
            gens.push(s);
        }
    }
    gens
}

impl Symmetry {
    fn new(sc: &Scenario) -> Result<Self> {
        let parties = sc
            .party_observables()
            .ok_or_else(|| Error::InvalidScenario("families need a party structure".into()))?;
        let idx = sc.contexts();
        let perms = permutation_generators(&parties, sc.n())
            .into_iter()
            .map(|g| {
                idx.subsets()
                    .iter()
                    .map(|s| {
                        idx.position(s.map(|i| g[i])).ok_or_else(|| {
                            Error::InvalidScenario(
                                "contexts are not closed under relabeling settings".into(),
                            )
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let flips = (0..sc.n())
            .map(|i| {
                idx.subsets()
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.contains(i))
                    .map(|(j, s)| {
                        let rest = s.without(i);
                        let k = if rest.is_empty() {
                            Some(0)
                        } else {
                            idx.position(rest).map(|p| p + 1)
                        };
                        k.map(|k| (j + 1, k)).ok_or_else(|| {
                            Error::InvalidScenario("contexts are not closed under subsets".into())
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Symmetry { perms, flips })
    }

    fn images(&self, c: &Poly) -> Result<Vec<Poly>> {
        let mut out = Vec::with_capacity(self.perms.len() + self.flips.len());
        for p in &self.perms {
            let mut d = vec![0; c.len()];
            d[0] = c[0];
            for (j, &pj) in p.iter().enumerate() {
                d[pj + 1] = c[j + 1];
            }
            out.push(d);
        }
        for f in &self.flips {
            let mut d = c.clone();
            for &(j, k) in f {
                d[k] = d[k].checked_add(c[j]).ok_or(Error::Overflow)?;
            }
            for &(j, _) in f {
                d[j] = -c[j];
            }
            out.push(d);
        }
        Ok(out)
    }

    fn orbit(&self, start: Poly) -> Result<HashSet<Poly>> {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            for d in self.images(&c)? {
                if seen.insert(d.clone()) {
                    queue.push_back(d);
                }
            }
        }
        Ok(seen)
    }
}

fn to_poly(ineq: &LinearInequality) -> Result<Poly> {
    let key = ineq.key();
    let d = ineq.dim();
    let small: Vec<i64> = key
        .iter()
        .map(ToPrimitive::to_i64)
        .collect::<Option<_>>()
        .ok_or(Error::Overflow)?;
    let mut c = Vec::with_capacity(d + 1);
    c.push(small[d]);
    c.extend(small[..d].iter().map(|x| -x));
    Ok(c)
}

/// Normalized row `(a, b)` of a polynomial.
fn row_key(c: &Poly) -> Vec<i64> {
    let mut r: Vec<i64> = c[1..].iter().map(|x| -x).collect();
    r.push(c[0]);
    r
}

fn from_key(k: &[i64]) -> LinearInequality {
    let d = k.len() - 1;
    let a: Vec<BigInt> = k[..d].iter().map(|&x| BigInt::from(x)).collect();
    LinearInequality::from_bigints(&a, &BigInt::from(k[d]))
}

fn check_dim(ineq: &LinearInequality, sc: &Scenario) -> Result<()> {
    if ineq.dim() != sc.dim() {
        return Err(Error::DimensionMismatch {
            expected: sc.dim(),
            found: ineq.dim(),
        });
    }
    Ok(())
}

fn min_key(orbit: &HashSet<Poly>) -> Vec<i64> {
    orbit
        .iter()
        .map(row_key)
        .min()
        .expect("orbits are nonempty")
}

/// Lexicographically smallest normalized row in the orbit of `ineq`.
pub fn canonicalize_family(ineq: &LinearInequality, sc: &Scenario) -> Result<LinearInequality> {
    check_dim(ineq, sc)?;
    let sym = Symmetry::new(sc)?;
    Ok(from_key(&min_key(&sym.orbit(to_poly(ineq)?)?)))
}

/// Splits the rows of `s` into orbits, ordered by representative.
pub fn partition_families(s: &InequalitySystem, sc: &Scenario) -> Result<Vec<FamilyClass>> {
    if s.dim() != sc.dim() {
        return Err(Error::DimensionMismatch {
            expected: sc.dim(),
            found: s.dim(),
        });
    }
    let sym = Symmetry::new(sc)?;
    let polys = s.rows().iter().map(to_poly).collect::<Result<Vec<_>>>()?;
    let mut row_of: HashMap<&Poly, Vec<usize>> = HashMap::new();
    for (i, p) in polys.iter().enumerate() {
        row_of.entry(p).or_default().push(i);
    }
    let mut assigned = vec![false; polys.len()];
    let mut classes = Vec::new();
    for i in 0..polys.len() {
        if assigned[i] {
            continue;
        }
        let orbit = sym.orbit(polys[i].clone())?;
        let mut members: Vec<usize> = orbit
            .iter()
            .filter_map(|p| row_of.get(p))
            .flatten()
            .copied()
            .collect();
        members.sort_unstable();
        for &m in &members {
            assigned[m] = true;
        }
        classes.push((min_key(&orbit), orbit.len(), members));
    }
    classes.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(classes
        .into_iter()
        .map(|(k, orbit_size, members)| FamilyClass {
            representative: from_key(&k),
            orbit_size,
            members,
        })
        .collect())
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Family of `ineq` comparable across scenarios: the inequality is moved to
/// the smallest scenario containing every setting it uses and canonicalized
/// there, taking the least result over all orderings of its parties.
pub fn family_key(ineq: &LinearInequality, sc: &Scenario) -> Result<FamilyKey> {
    check_dim(ineq, sc)?;
    let parties = sc
        .party_observables()
        .ok_or_else(|| Error::InvalidScenario("families need a party structure".into()))?;
    let coords = sc.contexts().subsets();
    let used = coords
        .iter()
        .zip(&ineq.coeffs)
        .filter(|(_, a)| !num_traits::Zero::is_zero(*a))
        .fold(Subset(0), |u, (s, _)| u.union(*s));
    let groups: Vec<Vec<usize>> = parties
        .iter()
        .map(|obs| {
            obs.iter()
                .copied()
                .filter(|&i| used.contains(i))
                .collect::<Vec<_>>()
        })
        .filter(|g: &Vec<usize>| !g.is_empty())
        .collect();
    let norm = ineq.normalize();
    if groups.is_empty() {
        return Ok(FamilyKey {
            shape: Vec::new(),
            row: vec![norm.key()[ineq.dim()].to_i64().ok_or(Error::Overflow)?],
        });
    }
    let mut best: Option<FamilyKey> = None;
    for order in permutations(groups.len()) {
        let shape: Vec<usize> = order.iter().map(|&g| groups[g].len()).collect();
        let sub = build_multipartite(&shape)?;
        let mut new_index = vec![usize::MAX; sc.n()];
        let mut next = 0;
        for &g in &order {
            for &i in &groups[g] {
                new_index[i] = next;
                next += 1;
            }
        }
        let mut coeffs = vec![crate::Rational::from_integer(0.into()); sub.dim()];
        for (s, a) in coords.iter().zip(&norm.coeffs) {
            if num_traits::Zero::is_zero(a) {
                continue;
            }
            let pos = sub
                .contexts()
                .position(s.map(|i| new_index[i]))
                .expect("used coordinates are contexts of the smaller scenario");
            coeffs[pos] = a.clone();
        }
        let moved = LinearInequality::new(coeffs, norm.bound.clone());
        let canon = canonicalize_family(&moved, &sub)?;
        let row = canon
            .key()
            .iter()
            .map(ToPrimitive::to_i64)
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::Overflow)?;
        let key = FamilyKey { shape, row };
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }
    Ok(best.expect("at least one ordering"))
}
