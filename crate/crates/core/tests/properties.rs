mod common;

use common::*;
use corrpoly::bell::{
    build_multipartite, canonicalize_family, complete_polytope_hrep, derive_tree,
    enumerate_vertices, mobius_forward, mobius_inverse, AtomTable, MeasureTable, Scenario,
    DEFAULT_GUARD,
};
use corrpoly::fm::{
    eliminate_many, eliminate_one, irredundant_rows, is_feasible, FmOptions, OrderStrategy,
    RedundancyMode, TrackedSystem,
};
use corrpoly::hull::{facets_bruteforce, hull_dd, vertices_from_hrep};
use corrpoly::linalg::{int, invert, rank, rat};
use corrpoly::polyhedron::{classify, is_valid, saturating_vertices, systems_equivalent};
use corrpoly::{
    Classification, InequalitySystem, LinearInequality, Rational, RationalMatrix, VertexSet,
};
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = RationalMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(small_rational(), c), r)
            .prop_map(|rows| RationalMatrix::from_rows(rows).unwrap())
    })
}

fn square(n: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec(prop::collection::vec(small_rational(), n), n)
        .prop_map(|rows| RationalMatrix::from_rows(rows).unwrap())
}

fn int_system(max_dim: usize, max_rows: usize) -> impl Strategy<Value = InequalitySystem> {
    (1..=max_dim, 1..=max_rows).prop_flat_map(|(d, m)| {
        prop::collection::vec((prop::collection::vec(-5i64..=5, d), -5i64..=5), m).prop_map(
            move |rows| {
                InequalitySystem::new(
                    d,
                    rows.iter()
                        .map(|(a, b)| LinearInequality::from_ints(a, *b))
                        .collect(),
                )
                .unwrap()
            },
        )
    })
}

/// Full-dimensional sets of 0/1 points.
fn binary_points(dim: usize) -> impl Strategy<Value = VertexSet> {
    let cube: Vec<Vec<u8>> = (0u32..1 << dim)
        .map(|e| (0..dim).map(|i| ((e >> i) & 1) as u8).collect())
        .collect();
    let n = cube.len();
    subsequence(cube, dim + 1..=n)
        .prop_map(move |pts| VertexSet::new(dim, pts).unwrap())
        .prop_filter("full-dimensional", move |v| v.affine_dim() == dim as i64)
}

fn measure_table(n: usize) -> impl Strategy<Value = MeasureTable> {
    prop::collection::vec((0i64..=8).prop_map(|k| rat(k, 8)), (1 << n) - 1)
        .prop_map(move |vals| MeasureTable::new(n, vals).unwrap())
}

fn atom_table(n: usize) -> impl Strategy<Value = AtomTable> {
    prop::collection::vec(0i64..=5, 1 << n)
        .prop_filter("nonzero", |w| w.iter().any(|&x| x > 0))
        .prop_map(move |w| {
            let total: i64 = w.iter().sum();
            AtomTable::new(n, w.iter().map(|&x| rat(x, total)).collect()).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn rank_matches_transpose(m in matrix(5, 5)) {
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
        prop_assert_eq!(rank(&m), naive_rank(m.to_rows()));
    }

    #[test]
    fn rank_ignores_row_order(m in matrix(5, 4), seed in any::<u64>()) {
        let mut rows = m.to_rows();
        let k = rows.len();
        rows.rotate_left((seed as usize) % k);
        prop_assert_eq!(rank(&RationalMatrix::from_rows(rows).unwrap()), rank(&m));
    }

    #[test]
    fn inverse_is_two_sided(m in (1usize..=4).prop_flat_map(square)) {
        match invert(&m) {
            Ok(inv) => {
                prop_assert!((&inv * &m).is_identity());
                prop_assert!((&m * &inv).is_identity());
            }
            Err(_) => prop_assert!(rank(&m) < m.rows()),
        }
    }

    #[test]
    fn normalize_is_idempotent(a in prop::collection::vec(small_rational(), 1..6), b in small_rational()) {
        let i = LinearInequality::new(a, b);
        let n = i.normalize();
        prop_assert_eq!(n.normalize(), n.clone());
        prop_assert_eq!(n.key(), i.key());
    }

    #[test]
    fn validity_and_class_survive_rescaling(
        v in binary_points(3),
        a in prop::collection::vec(-3i64..=3, 3),
        b in -3i64..=3,
        k in 1i64..=7,
    ) {
        let i = LinearInequality::from_ints(&a, b);
        let scaled = LinearInequality::new(
            i.coeffs.iter().map(|c| c * rat(k, 3)).collect(),
            &i.bound * rat(k, 3),
        );
        prop_assert_eq!(is_valid(&i, &v).unwrap(), is_valid(&i.normalize(), &v).unwrap());
        prop_assert_eq!(classify(&i, &v).unwrap(), classify(&scaled, &v).unwrap());
    }

    #[test]
    fn facets_are_spanned_by_tight_vertices(v in binary_points(4)) {
        let h = hull_dd(&v).unwrap();
        for r in h.rows() {
            prop_assert_eq!(classify(r, &v).unwrap(), Classification::Facet);
            prop_assert!(naive_is_facet(r, v.vertices()));
            let tight = saturating_vertices(r, &v).unwrap();
            prop_assert!(tight.len() >= v.dim());
            prop_assert_eq!(tight.affine_dim(), v.dim() as i64 - 1);
        }
    }

    #[test]
    fn oracles_agree_and_round_trip(v in binary_points(4)) {
        let brute = facets_bruteforce(&v).unwrap();
        let dd = hull_dd(&v).unwrap();
        prop_assert!(systems_equivalent(&brute, &dd, &v).unwrap());
        prop_assert_eq!(keys(brute.rows()), keys(dd.rows()));
        prop_assert!(vertices_from_hrep(&brute).unwrap().same_set(&v));
    }

    #[test]
    fn projection_has_the_lifts(s in int_system(4, 8), var_seed in any::<usize>(), pts in prop::collection::vec(prop::collection::vec(small_rational(), 4), 12)) {
        let var = var_seed % s.dim();
        let out = eliminate_one(&TrackedSystem::new(s.clone()), var, &FmOptions::default()).unwrap();
        let keep: Vec<usize> = (0..s.dim()).filter(|&j| j != var).collect();
        for p in &pts {
            let q = &p[..keep.len()];
            prop_assert_eq!(out.system().satisfied_by(q), lift_exists(&s, &keep, q));
        }
    }

    #[test]
    fn feasibility_survives_elimination(s in int_system(5, 10), vars in prop::collection::vec(any::<bool>(), 5)) {
        let chosen: Vec<usize> = (0..s.dim()).filter(|&j| vars[j]).collect();
        let out = eliminate_many(TrackedSystem::new(s.clone()), &chosen, &FmOptions::default()).unwrap();
        prop_assert_eq!(out.dim(), s.dim() - chosen.len());
        prop_assert_eq!(is_feasible(&s), is_feasible(out.system()));
    }

    #[test]
    fn chernikov_keeps_the_region(s in int_system(5, 9), vars in prop::collection::vec(any::<bool>(), 5)) {
        let chosen: Vec<usize> = (0..s.dim()).filter(|&j| vars[j]).collect();
        let pruned = FmOptions { chernikov: true, redundancy: RedundancyMode::Lp, ..FmOptions::default() };
        let full = FmOptions { chernikov: false, ..pruned };
        let a = eliminate_many(TrackedSystem::new(s.clone()), &chosen, &pruned).unwrap();
        let b = eliminate_many(TrackedSystem::new(s), &chosen, &full).unwrap();
        prop_assert!(same_region(a.system(), b.system()));
    }

    #[test]
    fn elimination_ignores_row_order(s in int_system(4, 8), shift in any::<usize>()) {
        let mut rows = s.rows().to_vec();
        let k = rows.len();
        rows.rotate_left(shift % k);
        let t = InequalitySystem::new(s.dim(), rows).unwrap();
        let opts = FmOptions { order: OrderStrategy::Given, ..FmOptions::default() };
        let a = eliminate_many(TrackedSystem::new(s), &[0], &opts).unwrap();
        let b = eliminate_many(TrackedSystem::new(t), &[0], &opts).unwrap();
        prop_assert_eq!(keys(a.system().rows()), keys(b.system().rows()));
    }

    #[test]
    fn projection_of_binary_polytope(v in binary_points(4), var_seed in any::<usize>()) {
        let var = var_seed % 4;
        let keep: Vec<usize> = (0..4).filter(|&j| j != var).collect();
        let tracked = TrackedSystem::new(hull_dd(&v).unwrap());
        let opts = FmOptions { redundancy: RedundancyMode::Lp, ..FmOptions::default() };
        let projected = eliminate_many(tracked, &[var], &opts).unwrap();
        let image = v.project(&keep);
        let expected = hull_dd(&image).unwrap();
        prop_assert!(same_region(projected.system(), &expected));
        prop_assert_eq!(irredundant_rows(projected.system()).unwrap().len(), projected.len());
    }

    #[test]
    fn mobius_three_way(f in (2usize..=4).prop_flat_map(measure_table)) {
        let atoms = mobius_forward(&f);
        let total = atoms.values().iter().fold(Rational::zero(), |s, x| s + x);
        prop_assert!(total.is_one());
        let inside = complete_polytope_hrep(f.n(), DEFAULT_GUARD).unwrap().satisfied_by(&f.point());
        prop_assert_eq!(atoms.is_nonnegative(), inside);
        if atoms.is_nonnegative() {
            prop_assert_eq!(mobius_inverse(&atoms).unwrap(), f);
        } else {
            prop_assert!(mobius_inverse(&atoms).is_err());
        }
    }

    #[test]
    fn atoms_round_trip(a in (1usize..=4).prop_flat_map(atom_table)) {
        let f = mobius_inverse(&a).unwrap();
        prop_assert_eq!(mobius_forward(&f), a);
        prop_assert!(complete_polytope_hrep(f.n(), DEFAULT_GUARD).unwrap().satisfied_by(&f.point()));
    }

    #[test]
    fn scenario_vertices_are_full_dimensional(shape in prop::collection::vec(1usize..=3, 1..=3)) {
        let sc = build_multipartite(&shape).unwrap();
        let v = enumerate_vertices(&sc).unwrap();
        prop_assert_eq!(v.len(), 1usize << sc.n());
        prop_assert_eq!(v.affine_dim(), sc.dim() as i64);
        prop_assert!(v.same_set(&vertex_set(naive_vertices(&sc))));
    }
}

/// `e_i -> 1 - e_i` applied to `a . p <= b`.
fn flip(ineq: &LinearInequality, sc: &Scenario, i: usize) -> LinearInequality {
    let subsets = sc.contexts().subsets();
    let mut a = ineq.coeffs.clone();
    let mut b = ineq.bound.clone();
    for (j, s) in subsets.iter().enumerate() {
        if s.contains(i) {
            let c = ineq.coeffs[j].clone();
            a[j] = -c.clone();
            let rest = s.without(i);
            if rest.is_empty() {
                b -= c;
            } else {
                let k = subsets.iter().position(|t| *t == rest).unwrap();
                a[k] += c;
            }
        }
    }
    LinearInequality::new(a, b)
}

/// Swaps two observables.
fn swap(ineq: &LinearInequality, sc: &Scenario, x: usize, y: usize) -> LinearInequality {
    let subsets = sc.contexts().subsets();
    let mut a = vec![Rational::zero(); ineq.coeffs.len()];
    for (j, s) in subsets.iter().enumerate() {
        let t = s.map(|i| {
            if i == x {
                y
            } else if i == y {
                x
            } else {
                i
            }
        });
        a[subsets.iter().position(|u| *u == t).unwrap()] = ineq.coeffs[j].clone();
    }
    LinearInequality::new(a, ineq.bound.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_family_is_orbit_invariant(
        pick in any::<usize>(),
        moves in prop::collection::vec((0usize..3, 0usize..5, 0usize..5), 1..6),
    ) {
        let sc = build_multipartite(&[2, 3]).unwrap();
        let facets = derive_tree(&sc, 0).unwrap();
        let start = facets.rows()[pick % facets.len()].clone();
        let canon = canonicalize_family(&start, &sc).unwrap();
        prop_assert_eq!(canonicalize_family(&canon, &sc).unwrap(), canon.clone());
        let mut cur = start;
        for (kind, x, y) in moves {
            cur = match kind {
                0 => flip(&cur, &sc, x),
                1 => swap(&cur, &sc, 2 + x % 3, 2 + y % 3),
                _ => swap(&cur, &sc, x % 2, y % 2),
            };
            prop_assert!(facets.contains(&cur));
            prop_assert_eq!(canonicalize_family(&cur, &sc).unwrap(), canon.clone());
        }
    }
}

#[test]
fn rescaled_rows_are_the_same_system() {
    let sc = build_multipartite(&[2, 2]).unwrap();
    let v = enumerate_vertices(&sc).unwrap();
    let h = derive_tree(&sc, 0).unwrap();
    let mut rows: Vec<LinearInequality> = h
        .rows()
        .iter()
        .map(|r| {
            LinearInequality::new(
                r.coeffs.iter().map(|c| c * int(3)).collect(),
                &r.bound * int(3),
            )
        })
        .collect();
    rows.reverse();
    let t = InequalitySystem::new(8, rows).unwrap();
    assert!(systems_equivalent(&h, &t, &v).unwrap());
    assert!(!systems_equivalent(&h, &h.without_row(0), &v).unwrap());
}
