#![allow(dead_code)]

use std::collections::BTreeSet;

use corrpoly::bell::{Scenario, Subset};
use corrpoly::fm::{is_feasible, lp_max, LpOutcome};
use corrpoly::linalg::{int, rat};
use corrpoly::{InequalitySystem, LinearInequality, Rational, VertexSet};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

/// Builds `sum coeff * p_label <= bound` over the given labels.
pub fn row(labels: &[&str], terms: &[(&str, i64)], bound: i64) -> LinearInequality {
    let mut a = vec![0i64; labels.len()];
    for (l, c) in terms {
        let j = labels
            .iter()
            .position(|x| x == l)
            .unwrap_or_else(|| panic!("no label {l}"));
        a[j] += c;
    }
    LinearInequality::from_ints(&a, bound)
}

pub const CHSH_LABELS: [&str; 8] = ["1", "2", "3", "4", "13", "14", "23", "24"];

/// `-1 <= e <= 0` for the four CHSH expressions, with Bob's settings `s`, `t`.
pub fn chsh_rows(labels: &[&str], a: [usize; 2], s: usize, t: usize) -> Vec<LinearInequality> {
    let p = |i: usize| i.to_string();
    let pp = |i: usize, j: usize| format!("{i}{j}");
    let (a1, a2) = (a[0], a[1]);
    let exprs: Vec<Vec<(String, i64)>> = vec![
        vec![
            (pp(a1, s), 1),
            (pp(a1, t), 1),
            (pp(a2, t), 1),
            (pp(a2, s), -1),
            (p(a1), -1),
            (p(t), -1),
        ],
        vec![
            (pp(a2, s), 1),
            (pp(a2, t), 1),
            (pp(a1, t), 1),
            (pp(a1, s), -1),
            (p(a2), -1),
            (p(t), -1),
        ],
        vec![
            (pp(a1, t), 1),
            (pp(a1, s), 1),
            (pp(a2, s), 1),
            (pp(a2, t), -1),
            (p(a1), -1),
            (p(s), -1),
        ],
        vec![
            (pp(a2, t), 1),
            (pp(a2, s), 1),
            (pp(a1, s), 1),
            (pp(a1, t), -1),
            (p(a2), -1),
            (p(s), -1),
        ],
    ];
    let mut out = Vec::new();
    for e in exprs {
        let terms: Vec<(&str, i64)> = e.iter().map(|(l, c)| (l.as_str(), *c)).collect();
        let neg: Vec<(&str, i64)> = e.iter().map(|(l, c)| (l.as_str(), -c)).collect();
        out.push(row(labels, &terms, 0));
        out.push(row(labels, &neg, 1));
    }
    out
}

/// The sixteen Bell-Wigner half-spaces over `1 2 s 12 1s 2s`.
pub fn bell_wigner_rows(s: usize) -> (Vec<String>, Vec<LinearInequality>) {
    let labels = vec![
        "1".to_string(),
        "2".to_string(),
        s.to_string(),
        "12".to_string(),
        format!("1{s}"),
        format!("2{s}"),
    ];
    let l: Vec<&str> = labels.iter().map(String::as_str).collect();
    let (ps, p1s, p2s) = (l[2], l[4], l[5]);
    let mut rows = Vec::new();
    for (i, j, ij) in [("1", "2", "12"), ("1", ps, p1s), ("2", ps, p2s)] {
        rows.push(row(&l, &[(ij, -1)], 0));
        rows.push(row(&l, &[(ij, 1), (i, -1)], 0));
        rows.push(row(&l, &[(ij, 1), (j, -1)], 0));
        rows.push(row(&l, &[(i, 1), (j, 1), (ij, -1)], 1));
    }
    rows.push(row(
        &l,
        &[
            ("1", 1),
            ("2", 1),
            (ps, 1),
            ("12", -1),
            (p1s, -1),
            (p2s, -1),
        ],
        1,
    ));
    rows.push(row(&l, &[("1", -1), ("12", 1), (p1s, 1), (p2s, -1)], 0));
    rows.push(row(&l, &[("2", -1), ("12", 1), (p2s, 1), (p1s, -1)], 0));
    rows.push(row(&l, &[(ps, -1), (p1s, 1), (p2s, 1), ("12", -1)], 0));
    (labels, rows)
}

/// Normalized keys of `rows`.
pub fn keys(rows: &[LinearInequality]) -> BTreeSet<Vec<BigInt>> {
    rows.iter().map(LinearInequality::key).collect()
}

/// Every `u_eps` built directly from the contexts.
pub fn naive_vertices(sc: &Scenario) -> Vec<Vec<u8>> {
    let n = sc.n();
    (0u64..1 << n)
        .map(|eps| {
            sc.contexts()
                .subsets()
                .iter()
                .map(|s| u8::from(s.0 & eps == s.0))
                .collect()
        })
        .collect()
}

/// Rank by plain fraction-valued Gaussian elimination.
pub fn naive_rank(mut m: Vec<Vec<Rational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Facet test independent of the library: valid on every point, and the
/// tight points span a hyperplane of the affine hull.
pub fn naive_is_facet(ineq: &LinearInequality, points: &[Vec<u8>]) -> bool {
    let eval = |p: &Vec<u8>| -> Rational {
        ineq.coeffs
            .iter()
            .zip(p)
            .filter(|(_, &x)| x == 1)
            .fold(Rational::zero(), |s, (a, _)| s + a)
    };
    if points.iter().any(|p| eval(p) > ineq.bound) {
        return false;
    }
    let lift = |p: &Vec<u8>| -> Vec<Rational> {
        let mut v: Vec<Rational> = p.iter().map(|&x| int(i64::from(x))).collect();
        v.push(Rational::one());
        v
    };
    let all = naive_rank(points.iter().map(lift).collect());
    let tight = naive_rank(
        points
            .iter()
            .filter(|p| eval(p) == ineq.bound)
            .map(lift)
            .collect(),
    );
    tight + 1 == all
}

/// Uses at most one setting of each party.
pub fn is_single_setting(ineq: &LinearInequality, sc: &Scenario) -> bool {
    let used = sc
        .contexts()
        .subsets()
        .iter()
        .zip(&ineq.coeffs)
        .filter(|(_, a)| !a.is_zero())
        .fold(Subset(0), |u, (s, _)| u.union(*s));
    sc.party_observables()
        .unwrap()
        .iter()
        .all(|obs| obs.iter().filter(|&&i| used.contains(i)).count() <= 1)
}

/// `a` implies every row of `b`.
pub fn implies(a: &InequalitySystem, b: &InequalitySystem) -> bool {
    if !is_feasible(a) {
        return true;
    }
    b.rows()
        .iter()
        .all(|r| match lp_max(a, &r.coeffs).unwrap() {
            LpOutcome::Optimum { value, .. } => value <= r.bound,
            LpOutcome::Unbounded => false,
            LpOutcome::Infeasible => true,
        })
}

/// Same solution set.
pub fn same_region(a: &InequalitySystem, b: &InequalitySystem) -> bool {
    implies(a, b) && implies(b, a)
}

/// Does some lift of `point` (values for the columns in `keep`) satisfy `s`?
pub fn lift_exists(s: &InequalitySystem, keep: &[usize], point: &[Rational]) -> bool {
    let free: Vec<usize> = (0..s.dim()).filter(|j| !keep.contains(j)).collect();
    let rows = s
        .rows()
        .iter()
        .map(|r| {
            let fixed = keep
                .iter()
                .zip(point)
                .fold(Rational::zero(), |acc, (&j, x)| acc + &r.coeffs[j] * x);
            LinearInequality::new(
                free.iter().map(|&j| r.coeffs[j].clone()).collect(),
                &r.bound - fixed,
            )
        })
        .collect();
    let reduced = InequalitySystem::new(free.len(), rows).unwrap();
    if free.is_empty() {
        return reduced.rows().iter().all(|r| !r.bound.is_negative());
    }
    is_feasible(&reduced)
}

pub fn random_system<R: Rng>(rng: &mut R, dim: usize, rows: usize) -> InequalitySystem {
    let rows = (0..rows)
        .map(|_| {
            let a: Vec<i64> = (0..dim).map(|_| rng.gen_range(-5..=5)).collect();
            LinearInequality::from_ints(&a, rng.gen_range(-5..=5))
        })
        .collect();
    InequalitySystem::new(dim, rows).unwrap()
}

pub fn random_point<R: Rng>(rng: &mut R, dim: usize) -> Vec<Rational> {
    (0..dim)
        .map(|_| rat(rng.gen_range(-12..=12), rng.gen_range(1..=4)))
        .collect()
}

pub fn vertex_set(points: Vec<Vec<u8>>) -> VertexSet {
    VertexSet::new(points[0].len(), points).unwrap()
}
