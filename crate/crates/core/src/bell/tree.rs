//! Facets of a multipartite correlation polytope from a star-shaped
//! decomposition: one block per setting of the replicated party, all blocks
//! sharing the pivot observables. The blocks are glued along the pivot and
//! the joint pivot probabilities, which no context measures, are projected
//! out.

use log::info;
use num_traits::Zero;

use super::{enumerate_vertices, CoordinateIndex, Scenario, Subset};
use crate::error::{Error, Result};
use crate::fm::{eliminate_many, FmOptions, TrackedSystem};
use crate::hull::hull_dd;
use crate::polyhedron::{facet_subsystem, InequalitySystem, LinearInequality};

/// Largest block handled by the hull oracle, in observables.
const MAX_BLOCK_OBSERVABLES: usize = 16;

/// Sizes along the way, for logging and reports.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeriveReport {
    pub block_rows: usize,
    pub copies: usize,
    pub stacked_rows: usize,
    pub stacked_dim: usize,
    pub eliminated: Vec<String>,
    pub projected_rows: usize,
    pub facets: usize,
}

/// Every nonempty subset of the pivot, the setting, and each pivot subset
/// joined with the setting that the scenario measures.
fn block_coordinates(sc: &Scenario, pivot: Subset, setting: usize) -> CoordinateIndex {
    let s = Subset::singleton(setting);
    let mut coords: Vec<Subset> = pivot.nonempty_subsets().collect();
    coords.push(s);
    coords.extend(
        pivot
            .nonempty_subsets()
            .map(|t| t.union(s))
            .filter(|&c| sc.is_context(c)),
    );
    CoordinateIndex::new(coords)
}

/// Facets of the correlation polytope of one block, over its coordinates
/// in canonical order.
pub fn base_block_hrep(sc: &Scenario, pivot: Subset, setting: usize) -> Result<InequalitySystem> {
    if pivot.is_empty() || pivot.contains(setting) || setting >= sc.n() {
        return Err(Error::InvalidScenario(format!(
            "setting {} must be an observable outside the pivot {}",
            setting + 1,
            pivot.label()
        )));
    }
    if pivot.len() + 1 > MAX_BLOCK_OBSERVABLES {
        return Err(Error::GuardExceeded {
            what: "block observables",
            needed: pivot.len() as u128 + 1,
            limit: MAX_BLOCK_OBSERVABLES as u128,
        });
    }
    let coords = block_coordinates(sc, pivot, setting);
    hull_dd(&coords.vertices()?)
}

/// [`derive_tree_with`] using default elimination options.
pub fn derive_tree(sc: &Scenario, pivot_party: usize) -> Result<InequalitySystem> {
    derive_tree_with(sc, pivot_party, &FmOptions::default()).map(|(s, _)| s)
}

/// Facets of `sc`'s correlation polytope.
///
/// With two parties, `pivot_party` is the shared block and the other party
/// is replicated. With more parties the last one is replicated and the
/// others form the pivot jointly; `pivot_party` must then be 0.
pub fn derive_tree_with(
    sc: &Scenario,
    pivot_party: usize,
    opts: &FmOptions,
) -> Result<(InequalitySystem, DeriveReport)> {
    let parties = sc
        .party_observables()
        .ok_or_else(|| Error::InvalidScenario("derivation needs a party structure".into()))?;
    let (pivot_obs, replicated): (Vec<usize>, Vec<usize>) = match parties.len() {
        0 | 1 => {
            return Err(Error::InvalidScenario(
                "derivation needs at least two parties".into(),
            ))
        }
        2 if pivot_party < 2 => (
            parties[pivot_party].clone(),
            parties[1 - pivot_party].clone(),
        ),
        p if p > 2 && pivot_party == 0 => (
            parties[..p - 1].iter().flatten().copied().collect(),
            parties[p - 1].clone(),
        ),
        p => {
            return Err(Error::InvalidScenario(format!(
                "pivot party {pivot_party} is not available with {p} parties"
            )))
        }
    };
    let pivot = Subset::from_indices(pivot_obs);
    let s0 = replicated[0];
    let base = base_block_hrep(sc, pivot, s0)?;
    let base_coords = block_coordinates(sc, pivot, s0);

    let mut report = DeriveReport {
        block_rows: base.len(),
        copies: replicated.len(),
        ..DeriveReport::default()
    };

    // coordinates of every copy, in the base block's column order
    let relabel = |s: usize| -> Result<Vec<Subset>> {
        let mapped: Vec<Subset> = base_coords
            .subsets()
            .iter()
            .map(|c| c.map(|i| if i == s0 { s } else { i }))
            .collect();
        if CoordinateIndex::new(mapped.clone()) != block_coordinates(sc, pivot, s) {
            return Err(Error::InvalidScenario(format!(
                "settings {} and {} are not interchangeable",
                s0 + 1,
                s + 1
            )));
        }
        Ok(mapped)
    };
    let copies = replicated
        .iter()
        .map(|&s| relabel(s))
        .collect::<Result<Vec<_>>>()?;
    let union = CoordinateIndex::new(copies.iter().flatten().copied().collect());

    let mut rows = Vec::with_capacity(base.len() * copies.len());
    for cols in &copies {
        for r in base.rows() {
            let mut coeffs = vec![crate::Rational::zero(); union.len()];
            for (c, v) in cols.iter().zip(&r.coeffs) {
                coeffs[union
                    .position(*c)
                    .expect("copy coordinates are in the union")] = v.clone();
            }
            rows.push(LinearInequality::new(coeffs, r.bound.clone()));
        }
    }
    let stacked = InequalitySystem::new(union.len(), rows)?.with_labels(union.labels())?;
    report.stacked_rows = stacked.len();
    report.stacked_dim = stacked.dim();

    let vars: Vec<usize> = union
        .subsets()
        .iter()
        .enumerate()
        .filter(|(_, &c)| !sc.is_context(c))
        .map(|(i, _)| i)
        .collect();
    report.eliminated = vars.iter().map(|&i| union.subsets()[i].label()).collect();
    info!(
        "stacked {} copies of a {}-row block: {} rows in dimension {}; eliminating {:?}",
        report.copies,
        report.block_rows,
        report.stacked_rows,
        report.stacked_dim,
        report.eliminated
    );

    let tracked = TrackedSystem::with_vertices(stacked, union.vertices()?)?;
    let projected = eliminate_many(tracked, &vars, opts)?;
    report.projected_rows = projected.len();

    let remaining: Vec<Subset> = union
        .subsets()
        .iter()
        .copied()
        .filter(|&c| sc.is_context(c))
        .collect();
    if remaining.len() != sc.dim() {
        return Err(Error::InvalidScenario(
            "the decomposition does not cover every context".into(),
        ));
    }
    let perm = sc
        .contexts()
        .subsets()
        .iter()
        .map(|c| {
            remaining.iter().position(|r| r == c).ok_or_else(|| {
                Error::InvalidScenario(format!("context {} is not covered", c.label()))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let system = projected.system().permute_columns(&perm)?;
    let mut facets = facet_subsystem(&system, &enumerate_vertices(sc)?)?;
    facets.set_labels(Some(sc.labels()));
    report.facets = facets.len();
    info!(
        "projection has {} rows, {} of them facets",
        report.projected_rows, report.facets
    );
    Ok((facets, report))
}
