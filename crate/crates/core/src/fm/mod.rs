//! Fourier–Motzkin elimination with Chernikov pruning.
//!
//! Every row carries the set of original rows it was built from. When the
//! polytope's vertex set is known, candidate rows are certified directly
//! against the projected vertices (a row survives iff its tight vertices
//! span a facet), which replaces the LP sweep for that case.

pub mod lp;

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use log::debug;
use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::int::{self, convert_rows, primitive, ExactInt, Overflow};
use crate::polyhedron::{InequalitySystem, LinearInequality, VertexSet};

pub use lp::{feasible_point, irredundant_rows, is_feasible, is_redundant, lp_max, LpOutcome};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OrderStrategy {
    /// Next variable minimizes `|positive rows| * |negative rows|`.
    #[default]
    MinProduct,
    /// Variables in the order given by the caller.
    Given,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RedundancyMode {
    /// Vertex certification when vertices are attached, LP sweep otherwise.
    #[default]
    Auto,
    /// Always the LP sweep.
    Lp,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FmOptions {
    pub chernikov: bool,
    pub order: OrderStrategy,
    pub redundancy: RedundancyMode,
}

impl Default for FmOptions {
    fn default() -> Self {
        FmOptions {
            chernikov: true,
            order: OrderStrategy::MinProduct,
            redundancy: RedundancyMode::Auto,
        }
    }
}

/// A system under elimination together with per-row ancestry.
#[derive(Clone, Debug)]
pub struct TrackedSystem {
    system: InequalitySystem,
    ancestry: Vec<FixedBitSet>,
    original_rows: usize,
    steps_done: usize,
    vertices: Option<VertexSet>,
}

impl TrackedSystem {
    pub fn new(system: InequalitySystem) -> Self {
        let n = system.len();
        let ancestry = (0..n)
            .map(|i| {
                let mut b = FixedBitSet::with_capacity(n);
                b.insert(i);
                b
            })
            .collect();
        TrackedSystem {
            system,
            ancestry,
            original_rows: n,
            steps_done: 0,
            vertices: None,
        }
    }

    /// Attaches the vertex set of the polytope the system describes. The
    /// caller guarantees that the system's solution set is `conv(vertices)`.
    pub fn with_vertices(system: InequalitySystem, vertices: VertexSet) -> Result<Self> {
        if vertices.dim() != system.dim() {
            return Err(Error::DimensionMismatch {
                expected: system.dim(),
                found: vertices.dim(),
            });
        }
        let mut t = Self::new(system);
        t.vertices = Some(vertices);
        Ok(t)
    }

    pub fn system(&self) -> &InequalitySystem {
        &self.system
    }

    pub fn into_system(self) -> InequalitySystem {
        self.system
    }

    pub fn ancestry(&self) -> &[FixedBitSet] {
        &self.ancestry
    }

    pub fn steps_done(&self) -> usize {
        self.steps_done
    }

    pub fn vertices(&self) -> Option<&VertexSet> {
        self.vertices.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn len(&self) -> usize {
        self.system.len()
    }

    pub fn is_empty(&self) -> bool {
        self.system.is_empty()
    }
}

/// Incidence data for certifying rows against projected vertices.
struct Incidence {
    /// vertices after the projection, deduplicated
    projected: Vec<Vec<u8>>,
    /// index into `projected` for every vertex before the projection
    image: Vec<usize>,
    /// affine dimension of the projected polytope
    target: i64,
}

impl Incidence {
    fn new(before: &VertexSet, var: usize) -> Self {
        let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
        let mut projected = Vec::new();
        let image = before
            .vertices()
            .iter()
            .map(|v| {
                let mut p = v.clone();
                p.remove(var);
                *index.entry(p.clone()).or_insert_with(|| {
                    projected.push(p);
                    projected.len() - 1
                })
            })
            .collect();
        let target = int::binary_affine_dim(projected.iter().map(Vec::as_slice));
        Incidence {
            projected,
            image,
            target,
        }
    }

    /// Tight set over the projected vertices from a tight set over the old ones.
    fn lift(&self, old: &FixedBitSet) -> FixedBitSet {
        let mut z = FixedBitSet::with_capacity(self.projected.len());
        for i in old.ones() {
            z.insert(self.image[i]);
        }
        z
    }

    fn spans_facet(&self, z: &FixedBitSet) -> bool {
        if (z.count_ones(..) as i64) < self.target {
            return false;
        }
        int::binary_affine_dim(z.ones().map(|i| self.projected[i].as_slice())) == self.target - 1
    }
}

/// Tight vertex set of an integer row `(a, b)`, `None` if some vertex violates it.
fn tight_set<T: ExactInt>(row: &[T], verts: &[Vec<u8>]) -> Result<Option<FixedBitSet>, Overflow> {
    let d = row.len() - 1;
    let mut z = FixedBitSet::with_capacity(verts.len());
    for (k, v) in verts.iter().enumerate() {
        let mut s = T::zero();
        for j in 0..d {
            if v[j] != 0 {
                s = s.add(&row[j])?;
            }
        }
        match row[d].sub(&s)?.signum() {
            0 => z.insert(k),
            x if x < 0 => return Ok(None),
            _ => {}
        }
    }
    Ok(Some(z))
}

fn ancestry_order(a: &FixedBitSet, b: &FixedBitSet) -> std::cmp::Ordering {
    a.count_ones(..)
        .cmp(&b.count_ones(..))
        .then_with(|| a.ones().cmp(b.ones()))
}

fn is_trivially_true<T: ExactInt>(row: &[T]) -> bool {
    let d = row.len() - 1;
    row[..d].iter().all(ExactInt::is_zero) && row[d].signum() >= 0
}

struct StepInput<'a, T> {
    rows: &'a [Vec<T>],
    ancestry: &'a [FixedBitSet],
    var: usize,
    /// maximal ancestry size, when pruning
    limit: Option<usize>,
    incidence: Option<(&'a Incidence, &'a [Vec<u8>])>,
}

type StepOutput<T> = Vec<(Vec<T>, FixedBitSet)>;

fn drop_column<T: ExactInt>(row: &[T], var: usize) -> Vec<T> {
    let mut r = row.to_vec();
    r.remove(var);
    r
}

fn step<T: ExactInt>(inp: &StepInput<'_, T>) -> Result<StepOutput<T>, Overflow> {
    let var = inp.var;
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut zero = Vec::new();
    for (i, r) in inp.rows.iter().enumerate() {
        match r[var].signum() {
            0 => zero.push(i),
            s if s > 0 => pos.push(i),
            _ => neg.push(i),
        }
    }

    // tight sets over the old vertices, used for both pair filtering and rows kept as is
    let old_tight: Option<Vec<FixedBitSet>> = match inp.incidence {
        Some((_, old_verts)) => Some(
            inp.rows
                .par_iter()
                .map(|r| {
                    tight_set(r, old_verts).map(|z| z.expect("rows are valid on the vertices"))
                })
                .collect::<Result<_, Overflow>>()?,
        ),
        None => None,
    };

    let mut out: Vec<(Vec<T>, FixedBitSet)> = Vec::new();
    for &i in &zero {
        let row = drop_column(&inp.rows[i], var);
        if is_trivially_true(&row) {
            continue;
        }
        if let (Some((inc, _)), Some(tight)) = (inp.incidence, &old_tight) {
            if !inc.spans_facet(&inc.lift(&tight[i])) {
                continue;
            }
        }
        out.push((row, inp.ancestry[i].clone()));
    }

    // candidate pairs, filtered by ancestry size and, if available, by the
    // size of the common tight set
    let pairs: Vec<(usize, usize, Option<FixedBitSet>)> = pos
        .par_iter()
        .flat_map_iter(|&p| {
            let old_tight = &old_tight;
            neg.iter().filter_map(move |&n| {
                if let Some(limit) = inp.limit {
                    let mut u = inp.ancestry[p].clone();
                    u.union_with(&inp.ancestry[n]);
                    if u.count_ones(..) > limit {
                        return None;
                    }
                }
                match (inp.incidence, old_tight) {
                    (Some((inc, _)), Some(tight)) => {
                        let mut z = tight[p].clone();
                        z.intersect_with(&tight[n]);
                        let z = inc.lift(&z);
                        if (z.count_ones(..) as i64) < inc.target {
                            return None;
                        }
                        Some((p, n, Some(z)))
                    }
                    _ => Some((p, n, None)),
                }
            })
        })
        .collect();

    let combine = |p: usize, n: usize| -> Result<(Vec<T>, FixedBitSet), Overflow> {
        let (rp, rn) = (&inp.rows[p], &inp.rows[n]);
        let alpha = rn[var].neg()?;
        let beta = rp[var].clone();
        let mut row = int::lincomb(&alpha, rp, &beta, rn)?;
        row.remove(var);
        primitive(&mut row);
        let mut anc = inp.ancestry[p].clone();
        anc.union_with(&inp.ancestry[n]);
        Ok((row, anc))
    };

    let combined: Vec<(Vec<T>, FixedBitSet)> = match inp.incidence {
        Some((inc, _)) => {
            // pairs with the same tight set produce the same facet, if any
            let mut by_tight: HashMap<FixedBitSet, Vec<(usize, usize)>> = HashMap::new();
            for (p, n, z) in pairs {
                by_tight
                    .entry(z.expect("incidence mode"))
                    .or_default()
                    .push((p, n));
            }
            let mut groups: Vec<(FixedBitSet, Vec<(usize, usize)>)> =
                by_tight.into_iter().collect();
            groups.sort_by(|a, b| a.1[0].cmp(&b.1[0]));
            groups
                .into_par_iter()
                .filter(|(z, _)| inc.spans_facet(z))
                .map(|(_, members)| {
                    let mut best: Option<(Vec<T>, FixedBitSet)> = None;
                    for (p, n) in members {
                        let cand = combine(p, n)?;
                        let better = match &best {
                            None => true,
                            Some((_, a)) => ancestry_order(&cand.1, a).is_lt(),
                        };
                        if better {
                            best = Some(cand);
                        }
                    }
                    Ok(best.expect("groups are nonempty"))
                })
                .collect::<Result<_, Overflow>>()?
        }
        None => pairs
            .into_par_iter()
            .map(|(p, n, _)| combine(p, n))
            .filter(|r| !matches!(r, Ok((row, _)) if is_trivially_true(row)))
            .collect::<Result<_, Overflow>>()?,
    };
    out.extend(combined);

    // deduplicate; the smaller ancestry wins
    let mut best: HashMap<Vec<T>, FixedBitSet> = HashMap::with_capacity(out.len());
    for (row, anc) in out {
        match best.get_mut(&row) {
            Some(a) => {
                if ancestry_order(&anc, a).is_lt() {
                    *a = anc;
                }
            }
            None => {
                best.insert(row, anc);
            }
        }
    }
    let mut rows: Vec<(Vec<T>, FixedBitSet)> = best.into_iter().collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(rows)
}

fn integer_rows(s: &InequalitySystem) -> Vec<Vec<BigInt>> {
    s.rows().iter().map(LinearInequality::key).collect()
}

fn run_step(
    rows: &[Vec<BigInt>],
    ancestry: &[FixedBitSet],
    var: usize,
    limit: Option<usize>,
    incidence: Option<(&Incidence, &[Vec<u8>])>,
) -> StepOutput<BigInt> {
    if let Some(small) = convert_rows::<BigInt, i64>(rows) {
        let inp = StepInput {
            rows: &small,
            ancestry,
            var,
            limit,
            incidence,
        };
        if let Ok(out) = step(&inp) {
            return out
                .into_iter()
                .map(|(r, a)| (r.iter().map(|&x| BigInt::from(x)).collect(), a))
                .collect();
        }
        debug!("machine integers overflowed eliminating column {var}; retrying exactly");
    }
    let inp = StepInput {
        rows,
        ancestry,
        var,
        limit,
        incidence,
    };
    step(&inp).expect("arbitrary precision cannot overflow")
}

fn assemble(dim: usize, rows: StepOutput<BigInt>) -> (InequalitySystem, Vec<FixedBitSet>) {
    let (ints, ancestry): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let ineqs = ints
        .iter()
        .map(|r| LinearInequality::from_bigints(&r[..dim], &r[dim]))
        .collect();
    let sys = InequalitySystem::new(dim, ineqs).expect("rows have the projected width");
    (sys, ancestry)
}

fn project_labels(labels: Option<&[String]>, var: usize) -> Option<Vec<String>> {
    labels.map(|l| {
        let mut l = l.to_vec();
        l.remove(var);
        l
    })
}

fn check_var(s: &TrackedSystem, var: usize) -> Result<()> {
    if var >= s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: var,
        });
    }
    Ok(())
}

fn eliminate_inner(
    s: &TrackedSystem,
    var: usize,
    opts: &FmOptions,
    certify: bool,
) -> Result<TrackedSystem> {
    check_var(s, var)?;
    let steps_done = s.steps_done + 1;
    // certified systems are already minimal, so only plain steps are pruned
    let limit = (opts.chernikov && !certify).then_some(steps_done + 1);
    let rows = integer_rows(&s.system);
    let projected_vertices = s.vertices.as_ref().map(|v| {
        let keep: Vec<usize> = (0..v.dim()).filter(|&j| j != var).collect();
        v.project(&keep)
    });
    let incidence = match (&s.vertices, certify) {
        (Some(v), true) => Some(Incidence::new(v, var)),
        _ => None,
    };
    let out = run_step(
        &rows,
        &s.ancestry,
        var,
        limit,
        incidence
            .as_ref()
            .zip(s.vertices.as_ref().map(|v| v.vertices())),
    );
    let (mut system, ancestry) = assemble(s.dim() - 1, out);
    system.set_labels(project_labels(s.system.labels(), var));
    Ok(TrackedSystem {
        system,
        ancestry,
        original_rows: s.original_rows,
        steps_done,
        vertices: projected_vertices,
    })
}

/// Eliminates column `var`: all rows not involving it, plus one combination
/// for every admissible pair of rows with opposite signs on it. Duplicate and
/// trivially true rows are dropped; no other redundancy is removed.
pub fn eliminate_one(s: &TrackedSystem, var: usize, opts: &FmOptions) -> Result<TrackedSystem> {
    eliminate_inner(s, var, opts, false)
}

/// Drops rows that are not facets of the attached vertex set.
fn certify_rows(s: &TrackedSystem) -> TrackedSystem {
    let Some(v) = &s.vertices else {
        return s.clone();
    };
    let target = v.affine_dim();
    let keep: Vec<bool> = s
        .system
        .rows()
        .par_iter()
        .map(|r| {
            crate::polyhedron::classify_with_dim(r, v, target)
                == crate::polyhedron::Classification::Facet
        })
        .collect();
    select(s, &keep)
}

fn select(s: &TrackedSystem, keep: &[bool]) -> TrackedSystem {
    let mut it = keep.iter();
    let system = s.system.filter(|_| *it.next().unwrap());
    let ancestry = s
        .ancestry
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(a, _)| a.clone())
        .collect();
    TrackedSystem {
        system,
        ancestry,
        ..s.clone()
    }
}

/// `0 <= -1`, built from every row of an infeasible `s`.
fn contradiction(s: &TrackedSystem) -> Result<TrackedSystem> {
    if let Some(i) = s
        .system
        .rows()
        .iter()
        .position(LinearInequality::is_contradiction)
    {
        let mut keep = vec![false; s.len()];
        keep[i] = true;
        return Ok(select(s, &keep));
    }
    let mut ancestry = FixedBitSet::with_capacity(s.original_rows);
    for a in &s.ancestry {
        ancestry.union_with(a);
    }
    let zero = vec![crate::Rational::from_integer(0.into()); s.dim()];
    let row = LinearInequality::new(zero, crate::Rational::from_integer((-1).into()));
    let mut system = InequalitySystem::new(s.dim(), vec![row])?;
    system.set_labels(s.system.labels().map(<[String]>::to_vec));
    Ok(TrackedSystem {
        system,
        ancestry: vec![ancestry],
        ..s.clone()
    })
}

/// Removes LP-redundant rows (sequentially, in row order). An infeasible
/// system becomes the single row `0 <= -1`.
pub fn remove_redundant(s: &TrackedSystem) -> Result<TrackedSystem> {
    if !lp::is_feasible(&s.system) {
        return contradiction(s);
    }
    let nontrivial: Vec<bool> = s
        .system
        .rows()
        .iter()
        .map(|r| !r.is_trivial() || r.is_contradiction())
        .collect();
    let s = select(s, &nontrivial);
    let kept = irredundant_rows(&s.system)?;
    let mut mask = vec![false; s.len()];
    for i in kept {
        mask[i] = true;
    }
    Ok(select(&s, &mask))
}

fn pick_next(s: &TrackedSystem, remaining: &[usize], opts: &FmOptions) -> usize {
    match opts.order {
        OrderStrategy::Given => 0,
        OrderStrategy::MinProduct => {
            let mut best = (u128::MAX, 0);
            for (k, &v) in remaining.iter().enumerate() {
                let (mut p, mut n) = (0u128, 0u128);
                for r in s.system.rows() {
                    if r.coeffs[v] > num_traits::Zero::zero() {
                        p += 1;
                    } else if r.coeffs[v] < num_traits::Zero::zero() {
                        n += 1;
                    }
                }
                if p * n < best.0 {
                    best = (p * n, k);
                }
            }
            best.1
        }
    }
}

/// Eliminates the given columns (indices into the current coordinates).
/// With [`RedundancyMode::Auto`] and attached vertices every intermediate
/// system is exactly the facet list of the projection.
pub fn eliminate_many(s: TrackedSystem, vars: &[usize], opts: &FmOptions) -> Result<TrackedSystem> {
    for &v in vars {
        check_var(&s, v)?;
    }
    // certification needs a full-dimensional polytope; implicit equalities
    // would otherwise be dropped as non-facets
    let certify = opts.redundancy == RedundancyMode::Auto
        && s.vertices
            .as_ref()
            .is_some_and(|v| v.affine_dim() == v.dim() as i64);
    let mut cur = if certify { certify_rows(&s) } else { s };
    // current column of every original column, or None once eliminated
    let mut remaining: Vec<usize> = vars.to_vec();
    remaining.sort_unstable();
    remaining.dedup();
    if opts.order == OrderStrategy::Given {
        let mut seen = std::collections::HashSet::new();
        remaining = vars.iter().copied().filter(|v| seen.insert(*v)).collect();
    }
    while !remaining.is_empty() {
        let k = pick_next(&cur, &remaining, opts);
        let var = remaining.remove(k);
        let before = cur.len();
        cur = eliminate_inner(&cur, var, opts, certify)?;
        if !certify && opts.redundancy != RedundancyMode::Off {
            cur = remove_redundant(&cur)?;
        }
        debug!(
            "eliminated column {var}: {before} -> {} rows, {} columns left",
            cur.len(),
            cur.dim()
        );
        for r in remaining.iter_mut() {
            if *r > var {
                *r -= 1;
            }
        }
    }
    Ok(cur)
}
