//! Bell scenarios: observables, their jointly measurable subsets (contexts),
//! coordinates and the 0/1 vertices of the associated correlation polytope.

mod family;
mod io;
mod measure;
mod tree;

pub use family::{canonicalize_family, family_key, partition_families, FamilyClass, FamilyKey};
pub use io::{read_atoms, read_measure, read_scenario, write_atoms, write_measure, write_scenario};
pub use measure::{
    atom_matrix, complete_polytope_hrep, complete_polytope_vertices, mobius_forward,
    mobius_inverse, AtomTable, MeasureTable, ATOM_MATRIX_GUARD, DEFAULT_GUARD,
};
pub use tree::{base_block_hrep, derive_tree, derive_tree_with, DeriveReport};

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::polyhedron::VertexSet;

/// Most observables for which vertices are enumerated.
pub const MAX_OBSERVABLES: usize = 24;

/// A set of observables, bit `i` standing for observable `i + 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(pub u64);

impl Subset {
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Subset(indices.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn singleton(i: usize) -> Self {
        Subset(1 << i)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_subset(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn without(self, i: usize) -> Subset {
        Subset(self.0 & !(1 << i))
    }

    /// 0-based indices in ascending order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let m = self.0;
        (0..64).filter(move |&i| m >> i & 1 == 1)
    }

    /// Nonempty subsets, in no particular order.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = Subset> {
        let full = self.0;
        let mut cur = full;
        let mut done = full == 0;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = Subset(cur);
            cur = (cur - 1) & full;
            if cur == 0 {
                done = true;
            }
            Some(out)
        })
    }

    /// Image under a map of observables.
    pub fn map(self, f: impl Fn(usize) -> usize) -> Subset {
        Subset::from_indices(self.indices().map(f))
    }

    /// `12`, or `1.10` once an index has two digits.
    pub fn label(self) -> String {
        let idx: Vec<usize> = self.indices().map(|i| i + 1).collect();
        let sep = if idx.iter().any(|&i| i >= 10) {
            "."
        } else {
            ""
        };
        idx.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Inverse of [`Subset::label`]. A leading `p` is accepted.
    pub fn parse_label(s: &str) -> Option<Subset> {
        let s = s.strip_prefix('p').unwrap_or(s);
        if s.is_empty() {
            return None;
        }
        let parts: Vec<&str> = if s.contains('.') {
            s.split('.').collect()
        } else {
            s.split("").filter(|p| !p.is_empty()).collect()
        };
        let mut m = 0u64;
        for p in parts {
            let i: usize = p.parse().ok()?;
            if i == 0 || i > 64 || m >> (i - 1) & 1 == 1 {
                return None;
            }
            m |= 1 << (i - 1);
        }
        Some(Subset(m))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.label())
    }
}

/// Canonical coordinate order: by size, then lexicographically by indices.
pub fn subset_order(a: &Subset, b: &Subset) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.indices().cmp(b.indices()))
}

/// Positions of subsets in a coordinate vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateIndex {
    subsets: Vec<Subset>,
    position: HashMap<Subset, usize>,
}

impl CoordinateIndex {
    /// Sorts into canonical order and drops repeats.
    pub fn new(mut subsets: Vec<Subset>) -> Self {
        subsets.sort_by(subset_order);
        subsets.dedup();
        let position = subsets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        CoordinateIndex { subsets, position }
    }

    pub fn subsets(&self) -> &[Subset] {
        &self.subsets
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn position(&self, s: Subset) -> Option<usize> {
        self.position.get(&s).copied()
    }

    pub fn labels(&self) -> Vec<String> {
        self.subsets.iter().map(|s| s.label()).collect()
    }

    /// Union of all subsets.
    pub fn support(&self) -> Subset {
        self.subsets.iter().fold(Subset(0), |a, &b| a.union(b))
    }

    /// Vertex `u_eps` for the assignment `eps` (bit `i` = value of observable `i + 1`).
    pub fn vertex(&self, eps: u64) -> Vec<u8> {
        self.subsets
            .iter()
            .map(|s| (s.0 & eps == s.0) as u8)
            .collect()
    }

    /// The correlation polytope's vertices over these coordinates, one per
    /// assignment of the observables that occur, deduplicated.
    pub fn vertices(&self) -> Result<VertexSet> {
        let obs: Vec<usize> = self.support().indices().collect();
        if obs.len() > MAX_OBSERVABLES {
            return Err(Error::GuardExceeded {
                what: "observables",
                needed: obs.len() as u128,
                limit: MAX_OBSERVABLES as u128,
            });
        }
        let verts = (0u64..1 << obs.len())
            .map(|k| {
                let eps = obs
                    .iter()
                    .enumerate()
                    .fold(0u64, |e, (j, &i)| e | ((k >> j & 1) << i));
                self.vertex(eps)
            })
            .collect();
        VertexSet::new(self.len(), verts)?.with_labels(self.labels())
    }
}

/// Observables `1..=n`, contexts, and optionally the settings of each party.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    n: usize,
    contexts: CoordinateIndex,
    parties: Option<Vec<usize>>,
}

impl Scenario {
    /// Contexts must be nonempty subsets of the observables; missing
    /// singletons are added.
    pub fn new(n: usize, contexts: Vec<Subset>, parties: Option<Vec<usize>>) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::InvalidScenario(format!(
                "number of observables must be in 1..=64, got {n}"
            )));
        }
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        for c in &contexts {
            if c.is_empty() {
                return Err(Error::InvalidScenario("empty context".into()));
            }
            if c.0 & !all != 0 {
                return Err(Error::InvalidScenario(format!(
                    "context {} mentions an observable beyond {n}",
                    c.label()
                )));
            }
        }
        if let Some(p) = &parties {
            if p.is_empty() || p.contains(&0) {
                return Err(Error::InvalidScenario(
                    "every party needs at least one setting".into(),
                ));
            }
            if p.iter().sum::<usize>() != n {
                return Err(Error::InvalidScenario(format!(
                    "parties have {} settings in total, expected {n}",
                    p.iter().sum::<usize>()
                )));
            }
        }
        let mut all_ctx = contexts;
        all_ctx.extend((0..n).map(Subset::singleton));
        Ok(Scenario {
            n,
            contexts: CoordinateIndex::new(all_ctx),
            parties,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contexts(&self) -> &CoordinateIndex {
        &self.contexts
    }

    pub fn is_context(&self, s: Subset) -> bool {
        self.contexts.position(s).is_some()
    }

    pub fn dim(&self) -> usize {
        self.contexts.len()
    }

    pub fn labels(&self) -> Vec<String> {
        self.contexts.labels()
    }

    pub fn parties(&self) -> Option<&[usize]> {
        self.parties.as_deref()
    }

    /// 0-based observables of each party.
    pub fn party_observables(&self) -> Option<Vec<Vec<usize>>> {
        let p = self.parties.as_ref()?;
        let mut start = 0;
        Some(
            p.iter()
                .map(|&k| {
                    let r = (start..start + k).collect();
                    start += k;
                    r
                })
                .collect(),
        )
    }
}

/// Observables grouped by party; a context picks at most one setting per party.
pub fn build_multipartite(settings: &[usize]) -> Result<Scenario> {
    if settings.is_empty() {
        return Err(Error::InvalidScenario("no parties".into()));
    }
    if settings.contains(&0) {
        return Err(Error::InvalidScenario(
            "every party needs at least one setting".into(),
        ));
    }
    let n: usize = settings.iter().sum();
    let mut contexts = vec![Subset(0)];
    let mut start = 0;
    for &k in settings {
        let mut next = Vec::with_capacity(contexts.len() * (k + 1));
        for c in &contexts {
            next.push(*c);
            for i in start..start + k {
                next.push(c.union(Subset::singleton(i)));
            }
        }
        contexts = next;
        start += k;
    }
    contexts.retain(|c| !c.is_empty());
    Scenario::new(n, contexts, Some(settings.to_vec()))
}

/// The `2^n` vertices `u_eps`, coordinates in canonical context order.
pub fn enumerate_vertices(sc: &Scenario) -> Result<VertexSet> {
    if sc.n() > MAX_OBSERVABLES {
        return Err(Error::GuardExceeded {
            what: "observables",
            needed: sc.n() as u128,
            limit: MAX_OBSERVABLES as u128,
        });
    }
    let idx = sc.contexts();
    let verts = (0u64..1 << sc.n()).map(|e| idx.vertex(e)).collect();
    VertexSet::new(idx.len(), verts)?.with_labels(idx.labels())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        let s = Subset::from_indices([0, 2]);
        assert_eq!(s.label(), "13");
        assert_eq!(Subset::parse_label("13"), Some(s));
        assert_eq!(Subset::parse_label("p13"), Some(s));
        let big = Subset::from_indices([0, 9]);
        assert_eq!(big.label(), "1.10");
        assert_eq!(Subset::parse_label("1.10"), Some(big));
        assert_eq!(Subset::parse_label("11"), None);
        assert_eq!(Subset::parse_label("0"), None);
    }

    #[test]
    fn canonical_order() {
        let idx = CoordinateIndex::new(
            ["23", "1", "12", "4", "123", "13", "2"]
                .iter()
                .map(|l| Subset::parse_label(l).unwrap())
                .collect(),
        );
        assert_eq!(idx.labels(), ["1", "2", "4", "12", "13", "23", "123"]);
        assert_eq!(idx.position(Subset::parse_label("13").unwrap()), Some(4));
    }

    #[test]
    fn multipartite_examples() {
        let chsh = build_multipartite(&[2, 2]).unwrap();
        assert_eq!(chsh.n(), 4);
        assert_eq!(chsh.labels(), ["1", "2", "3", "4", "13", "14", "23", "24"]);
        let one = build_multipartite(&[1]).unwrap();
        assert_eq!(one.labels(), ["1"]);
        let s33 = build_multipartite(&[3, 3]).unwrap();
        assert_eq!(s33.dim(), 6 + 9);
        assert!(build_multipartite(&[2, 0]).is_err());
        assert!(build_multipartite(&[]).is_err());
    }

    #[test]
    fn vertex_examples() {
        let v = enumerate_vertices(&build_multipartite(&[2, 2]).unwrap()).unwrap();
        assert_eq!((v.len(), v.dim()), (16, 8));
        let one = enumerate_vertices(&build_multipartite(&[1]).unwrap()).unwrap();
        assert_eq!(one.sorted().vertices(), &[vec![0], vec![1]]);
        let bw = Scenario::new(
            3,
            ["12", "13", "23"]
                .iter()
                .map(|l| Subset::parse_label(l).unwrap())
                .collect(),
            None,
        )
        .unwrap();
        let v = enumerate_vertices(&bw).unwrap();
        assert_eq!((v.len(), v.dim()), (8, 6));
    }

    #[test]
    fn scenario_validation() {
        assert!(Scenario::new(2, vec![Subset(0)], None).is_err());
        assert!(Scenario::new(2, vec![Subset(4)], None).is_err());
        assert!(Scenario::new(3, vec![], Some(vec![1, 1])).is_err());
        let s = Scenario::new(3, vec![], None).unwrap();
        assert_eq!(s.dim(), 3);
    }

    #[test]
    fn subsets_of_subset() {
        let s = Subset::from_indices([0, 1, 3]);
        let mut subs: Vec<u64> = s.nonempty_subsets().map(|x| x.0).collect();
        subs.sort();
        assert_eq!(subs, vec![1, 2, 3, 8, 9, 10, 11]);
        assert_eq!(Subset(0).nonempty_subsets().count(), 0);
    }
}
