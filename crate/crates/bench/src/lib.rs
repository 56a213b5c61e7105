//! Shared inputs for the benchmarks.

use corrpoly::bell::{
    base_block_hrep, build_multipartite, enumerate_vertices, CoordinateIndex, Scenario, Subset,
};
use corrpoly::fm::TrackedSystem;
use corrpoly::{InequalitySystem, LinearInequality, RationalMatrix, VertexSet};

pub fn scenario(settings: &[usize]) -> Scenario {
    build_multipartite(settings).expect("valid settings")
}

pub fn vertices(settings: &[usize]) -> VertexSet {
    enumerate_vertices(&scenario(settings)).expect("small scenario")
}

/// The two Bell-Wigner blocks of the CHSH scenario stacked over
/// `1 2 3 4 12 13 14 23 24`, with `12` at column 4.
pub fn bell_wigner_pair() -> (TrackedSystem, usize) {
    let sc = scenario(&[2, 2]);
    let pivot = Subset::from_indices([0, 1]);
    let joint = ["1", "2", "3", "4", "12", "13", "14", "23", "24"];
    let mut rows = Vec::new();
    for setting in [2, 3] {
        let block = base_block_hrep(&sc, pivot, setting).expect("block hull");
        let labels = block.labels().expect("labelled block").to_vec();
        for r in block.rows() {
            let mut coeffs = vec![corrpoly::Rational::from_integer(0.into()); joint.len()];
            for (l, c) in labels.iter().zip(&r.coeffs) {
                let j = joint.iter().position(|x| x == l).expect("joint coordinate");
                coeffs[j] = c.clone();
            }
            rows.push(LinearInequality::new(coeffs, r.bound.clone()));
        }
    }
    let system = InequalitySystem::new(joint.len(), rows).expect("consistent rows");
    let coords = CoordinateIndex::new(
        joint
            .iter()
            .filter_map(|l| Subset::parse_label(l))
            .collect(),
    );
    let lifted = coords.vertices().expect("small index");
    let tracked = TrackedSystem::with_vertices(system, lifted).expect("matching dimension");
    (tracked, 4)
}

/// Square integer matrix with a fixed pseudo-random fill.
pub fn dense_matrix(n: usize) -> RationalMatrix {
    let mut x: u64 = 0x9e37_79b9_7f4a_7c15;
    let rows = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    x ^= x << 13;
                    x ^= x >> 7;
                    x ^= x << 17;
                    (x % 11) as i64 - 5
                })
                .collect()
        })
        .collect::<Vec<Vec<i64>>>();
    RationalMatrix::from_i64_rows(&rows).expect("rectangular")
}
