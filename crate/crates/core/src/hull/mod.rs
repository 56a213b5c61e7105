//! Independent hull oracles: facets from vertices (brute force and double
//! description) and vertices from facets.

pub mod dd;

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fm::{feasible_point, lp_max, LpOutcome};
use crate::linalg::int::primitive;
use crate::linalg::{format_rational, nullspace, Rational, RationalMatrix};
use crate::polyhedron::{
    classify_with_dim, Classification, InequalitySystem, LinearInequality, VertexSet,
};

/// Largest number of `d`-subsets the brute-force oracle will look at.
pub const BRUTEFORCE_LIMIT: u128 = 1_000_000;

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

/// Incrementally maintained echelon basis of homogenized points.
#[derive(Clone)]
struct Echelon {
    rows: Vec<(Vec<i128>, usize)>,
}

impl Echelon {
    /// Reduces `row` against the basis; returns the remainder if nonzero.
    fn reduce(&self, mut row: Vec<i128>) -> Option<Option<(Vec<i128>, usize)>> {
        for (b, c) in &self.rows {
            let f = row[*c];
            if f == 0 {
                continue;
            }
            let p = b[*c];
            for j in 0..row.len() {
                row[j] = p.checked_mul(row[j])?.checked_sub(f.checked_mul(b[j])?)?;
            }
            primitive(&mut row);
        }
        Some(row.iter().position(|&x| x != 0).map(|c| (row, c)))
    }
}

fn homogenized(v: &[u8]) -> Vec<i128> {
    let mut r: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    r.push(1);
    r
}

/// Facet of the hyperplane through `points` (affinely independent, `d` of
/// them), if all vertices lie weakly on one side.
fn hyperplane_facet(points: &[&[u8]], all: &[Vec<u8>]) -> Option<Vec<BigInt>> {
    let d = points[0].len();
    // (v, -1) . (a, b) = 0
    let rows: Vec<Vec<i64>> = points
        .iter()
        .map(|p| {
            let mut r: Vec<i64> = p.iter().map(|&x| x as i64).collect();
            r.push(-1);
            r
        })
        .collect();
    let ns = nullspace(&RationalMatrix::from_i64_rows(&rows).ok()?);
    debug_assert_eq!(ns.len(), 1);
    let mut h = crate::linalg::clear_denominators(&ns[0]);
    primitive(&mut h);
    let (a, b) = h.split_at(d);
    let mut sign = 0i8;
    for v in all {
        let s: BigInt = a
            .iter()
            .zip(v)
            .filter(|(_, &x)| x != 0)
            .map(|(c, _)| c)
            .sum::<BigInt>()
            - &b[0];
        let sg = crate::linalg::int::ExactInt::signum(&s);
        if sg == 0 {
            continue;
        }
        if sign == 0 {
            sign = sg;
        } else if sign != sg {
            return None;
        }
    }
    if sign > 0 {
        h = h.iter().map(|x| -x).collect();
    }
    Some(h)
}

fn search(
    verts: &[Vec<u8>],
    d: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    basis: &Echelon,
    out: &mut Vec<Vec<BigInt>>,
) {
    if chosen.len() == d {
        let pts: Vec<&[u8]> = chosen.iter().map(|&i| verts[i].as_slice()).collect();
        if let Some(h) = hyperplane_facet(&pts, verts) {
            out.push(h);
        }
        return;
    }
    let need = d - chosen.len();
    for i in start..verts.len() {
        if verts.len() - i < need {
            break;
        }
        let next = match basis.reduce(homogenized(&verts[i])) {
            Some(Some(r)) => {
                let mut b = basis.clone();
                b.rows.push(r);
                b
            }
            Some(None) => continue,
            None => {
                // entries outgrew i128: fall back to an exact rank test
                let mut pts: Vec<&[u8]> = chosen.iter().map(|&j| verts[j].as_slice()).collect();
                pts.push(&verts[i]);
                if crate::linalg::int::binary_affine_dim(pts.iter().copied()) != chosen.len() as i64
                {
                    continue;
                }
                let mut b = Echelon { rows: Vec::new() };
                for p in &pts {
                    if let Some(Some(r)) = b.reduce(homogenized(p)) {
                        b.rows.push(r);
                    }
                }
                b
            }
        };
        chosen.push(i);
        search(verts, d, i + 1, chosen, &next, out);
        chosen.pop();
    }
}

fn finish(dim: usize, rows: Vec<Vec<BigInt>>, v: &VertexSet) -> InequalitySystem {
    let vdim = v.affine_dim();
    let ineqs: Vec<LinearInequality> = rows
        .iter()
        .map(|h| LinearInequality::from_bigints(&h[..dim], &h[dim]))
        .collect();
    let facets: Vec<LinearInequality> = ineqs
        .into_par_iter()
        .filter(|r| classify_with_dim(r, v, vdim) == Classification::Facet)
        .collect();
    let mut s = InequalitySystem::new(dim, facets)
        .expect("rows have the vertex dimension")
        .canonical();
    s.set_labels(v.labels().map(<[String]>::to_vec));
    s
}

/// All facets of `conv(v)` by trying every affinely independent `d`-subset.
pub fn facets_bruteforce(v: &VertexSet) -> Result<InequalitySystem> {
    facets_bruteforce_with_limit(v, BRUTEFORCE_LIMIT)
}

/// [`facets_bruteforce`] with a custom bound on the number of `d`-subsets.
pub fn facets_bruteforce_with_limit(v: &VertexSet, limit: u128) -> Result<InequalitySystem> {
    let d = v.dim();
    let adim = v.affine_dim();
    if adim != d as i64 {
        return Err(Error::NotFullDimensional {
            affine_dim: adim,
            dim: d,
        });
    }
    let needed = binomial(v.len() as u64, d as u64);
    if needed > limit {
        return Err(Error::GuardExceeded {
            what: "vertex subsets",
            needed,
            limit,
        });
    }
    let verts = v.vertices();
    let root = Echelon { rows: Vec::new() };
    let rows: Vec<Vec<BigInt>> = (0..verts.len())
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut out = Vec::new();
            if let Some(Some(r)) = root.reduce(homogenized(&verts[first])) {
                let basis = Echelon { rows: vec![r] };
                let mut chosen = vec![first];
                search(verts, d, first + 1, &mut chosen, &basis, &mut out);
            }
            out
        })
        .collect();
    Ok(finish(d, rows, v))
}

/// Facets of `conv(v)` by double description on the cone of valid
/// inequalities. For a lower-dimensional `v` the affine hull is emitted as
/// pairs of opposite inequalities.
pub fn hull_dd(v: &VertexSet) -> Result<InequalitySystem> {
    hull_dd_until(v, None)
}

/// [`hull_dd`] that gives up with [`Error::DeadlineExceeded`] after `deadline`.
pub fn hull_dd_until(v: &VertexSet, deadline: Option<Instant>) -> Result<InequalitySystem> {
    let d = v.dim();
    if v.is_empty() {
        return Err(Error::InvalidInequality);
    }
    // y = (a, b) valid iff b - a . u >= 0 for every vertex u
    let rows: Vec<Vec<BigInt>> = v
        .vertices()
        .iter()
        .map(|u| {
            let mut r: Vec<BigInt> = u.iter().map(|&x| BigInt::from(-(x as i64))).collect();
            r.push(BigInt::from(1));
            r
        })
        .collect();
    let cone = dd::cone(&rows, d + 1, deadline)?;
    let mut s = finish(d, cone.rays, v);
    let mut eqs = Vec::new();
    for l in cone.lineality {
        let row = LinearInequality::from_bigints(&l[..d], &l[d]);
        if row.is_trivial() {
            continue;
        }
        eqs.push(row.negated());
        eqs.push(row);
    }
    let mut rows = s.rows().to_vec();
    rows.extend(eqs);
    let labels = s.labels().map(<[String]>::to_vec);
    s = InequalitySystem::new(d, rows)?.canonical();
    s.set_labels(labels);
    Ok(s)
}

/// Every 0/1 point satisfying all rows, by depth-first search with pruning.
fn binary_points(keys: &[Vec<BigInt>], d: usize) -> Vec<Vec<u8>> {
    // slack left for each row, and the least the unassigned tail can add
    let slack: Vec<BigInt> = keys.iter().map(|k| k[d].clone()).collect();
    let mut tail_min: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); keys.len()]; d + 1];
    for j in (0..d).rev() {
        for (r, k) in keys.iter().enumerate() {
            tail_min[j][r] = &tail_min[j + 1][r] + k[j].clone().min(BigInt::zero());
        }
    }
    let mut out = Vec::new();
    let mut point = Vec::with_capacity(d);
    fn walk(
        j: usize,
        keys: &[Vec<BigInt>],
        tail_min: &[Vec<BigInt>],
        slack: &[BigInt],
        point: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) {
        if slack.iter().zip(&tail_min[j]).any(|(s, m)| m > s) {
            return;
        }
        if j == tail_min.len() - 1 {
            out.push(point.clone());
            return;
        }
        point.push(0);
        walk(j + 1, keys, tail_min, slack, point, out);
        point.pop();
        let next: Vec<BigInt> = slack.iter().zip(keys).map(|(s, k)| s - &k[j]).collect();
        point.push(1);
        walk(j + 1, keys, tail_min, &next, point, out);
        point.pop();
    }
    walk(0, keys, &tail_min, &slack, &mut point, &mut out);
    out
}

/// All vertices of the polytope `s`, which must be bounded with 0/1 vertices.
///
/// The 0/1 points of `s` are collected first; `s` has no other vertex exactly
/// when every facet of their hull is implied by `s`.
pub fn vertices_from_hrep(s: &InequalitySystem) -> Result<VertexSet> {
    let d = s.dim();
    let keys: Vec<Vec<BigInt>> = s.rows().iter().map(LinearInequality::key).collect();
    let mut found = VertexSet::new(d, binary_points(&keys, d))?.sorted();
    let outside = |x: &[Rational]| Error::NonBinaryVertex(x.iter().map(format_rational).collect());
    if found.is_empty() {
        return match feasible_point(s) {
            None => Ok(found),
            Some(x) => match lex_max_vertex(s)? {
                Some(v) => Err(outside(&v)),
                None => Err(outside(&x)),
            },
        };
    }
    let have = s.key_set();
    let hull = hull_dd(&found)?;
    let missing: Vec<&LinearInequality> = hull
        .rows()
        .iter()
        .filter(|r| !have.contains(&r.key()))
        .collect();
    let verdicts: Vec<Result<Option<Vec<Rational>>>> = missing
        .par_iter()
        .map(|r| match lp_max(s, &r.coeffs)? {
            LpOutcome::Optimum { value, witness } => Ok((value > r.bound).then_some(witness)),
            LpOutcome::Unbounded => Err(Error::Unbounded),
            LpOutcome::Infeasible => Ok(None),
        })
        .collect();
    for v in verdicts {
        if let Some(x) = v? {
            return Err(outside(&x));
        }
    }
    found.set_labels(s.labels().map(<[String]>::to_vec));
    Ok(found)
}

/// The lexicographically largest point of `s`, which is a vertex.
fn lex_max_vertex(s: &InequalitySystem) -> Result<Option<Vec<Rational>>> {
    let d = s.dim();
    let mut rows = s.rows().to_vec();
    let mut point = Vec::with_capacity(d);
    for j in 0..d {
        let mut e = vec![Rational::zero(); d];
        e[j] = Rational::one();
        let sys = InequalitySystem::new(d, rows.clone())?;
        let value = match lp_max(&sys, &e)? {
            LpOutcome::Optimum { value, .. } => value,
            LpOutcome::Unbounded => return Err(Error::Unbounded),
            LpOutcome::Infeasible => return Ok(None),
        };
        let neg: Vec<Rational> = e.iter().map(|x| -x).collect();
        rows.push(LinearInequality::new(e, value.clone()));
        rows.push(LinearInequality::new(neg, -value.clone()));
        point.push(value);
    }
    Ok(Some(point))
}
