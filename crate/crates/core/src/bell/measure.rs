//! Measures on the free Boolean algebra over `n` observables: subset
//! probabilities `f(S)`, atom weights `lambda(eps)`, the Möbius transform
//! between them, and the closed-form facets of the complete polytope.

use num_traits::{One, Signed, Zero};

use super::{CoordinateIndex, Subset};
use crate::error::{Error, Result};
use crate::linalg::{format_rational, invert, Rational, RationalMatrix};
use crate::polyhedron::{InequalitySystem, LinearInequality, VertexSet};

/// Default limit on `n` for constructions with `2^n` rows.
pub const DEFAULT_GUARD: usize = 16;

/// Default limit on `n` for the dense `2^n x 2^n` atom matrix.
pub const ATOM_MATRIX_GUARD: usize = 8;

fn check_guard(n: usize, guard: usize) -> Result<()> {
    if n > guard {
        return Err(Error::GuardExceeded {
            what: "observables",
            needed: n as u128,
            limit: guard as u128,
        });
    }
    if n == 0 || n > 62 {
        return Err(Error::InvalidScenario(format!(
            "number of observables must be in 1..=62, got {n}"
        )));
    }
    Ok(())
}

/// Coordinates of the complete polytope: every nonempty subset.
pub fn complete_index(n: usize) -> CoordinateIndex {
    CoordinateIndex::new((1u64..1 << n).map(Subset).collect())
}

/// Bitstring of an atom, character `k` holding the value of observable `k + 1`.
pub fn atom_label(n: usize, eps: u64) -> String {
    (0..n)
        .map(|i| if eps >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// `f(S)` for every nonempty `S`, each in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureTable {
    n: usize,
    /// indexed by subset mask; entry 0 holds `f(empty) = 1`
    values: Vec<Rational>,
}

impl MeasureTable {
    /// Values in canonical coordinate order of the complete polytope.
    pub fn new(n: usize, values: Vec<Rational>) -> Result<Self> {
        check_guard(n, DEFAULT_GUARD)?;
        let idx = complete_index(n);
        if values.len() != idx.len() {
            return Err(Error::DimensionMismatch {
                expected: idx.len(),
                found: values.len(),
            });
        }
        let mut table = vec![Rational::zero(); 1 << n];
        table[0] = Rational::one();
        for (s, v) in idx.subsets().iter().zip(values) {
            if v.is_negative() || v > Rational::one() {
                return Err(Error::OutOfUnitInterval {
                    subset: s.label(),
                    value: format_rational(&v),
                });
            }
            table[s.0 as usize] = v;
        }
        Ok(MeasureTable { n, values: table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: Subset) -> &Rational {
        &self.values[s.0 as usize]
    }

    /// The point of the complete polytope's coordinate space.
    pub fn point(&self) -> Vec<Rational> {
        complete_index(self.n)
            .subsets()
            .iter()
            .map(|s| self.values[s.0 as usize].clone())
            .collect()
    }
}

/// `lambda(eps)` for every assignment; sums to one, may be negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomTable {
    n: usize,
    /// indexed by `eps`, bit `i` = value of observable `i + 1`
    values: Vec<Rational>,
}

impl AtomTable {
    pub fn new(n: usize, values: Vec<Rational>) -> Result<Self> {
        check_guard(n, DEFAULT_GUARD)?;
        if values.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: values.len(),
            });
        }
        let sum = values.iter().fold(Rational::zero(), |a, b| a + b);
        if !sum.is_one() {
            return Err(Error::AtomsNotNormalized(format_rational(&sum)));
        }
        Ok(AtomTable { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, eps: u64) -> &Rational {
        &self.values[eps as usize]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.values.iter().any(Signed::is_negative)
    }

    /// First negative atom, as `(bitstring, value)`.
    pub fn first_negative(&self) -> Option<(String, Rational)> {
        self.values
            .iter()
            .enumerate()
            .find(|(_, v)| v.is_negative())
            .map(|(e, v)| (atom_label(self.n, e as u64), v.clone()))
    }
}

/// `lambda(eps) = sum over T containing E of (-1)^(|T|-|E|) f(T)`, with `E`
/// the support of `eps` and `f(empty) = 1`.
pub fn mobius_forward(f: &MeasureTable) -> AtomTable {
    let n = f.n;
    let mut g = f.values.clone();
    for i in 0..n {
        let bit = 1usize << i;
        for m in 0..1usize << n {
            if m & bit == 0 {
                let hi = g[m | bit].clone();
                g[m] -= hi;
            }
        }
    }
    AtomTable { n, values: g }
}

/// `f(S) = sum of lambda(eps) over eps with every observable of S set`.
pub fn mobius_inverse(a: &AtomTable) -> Result<MeasureTable> {
    if let Some((atom, v)) = a.first_negative() {
        return Err(Error::NegativeAtom {
            atom,
            value: format_rational(&v),
        });
    }
    let n = a.n;
    let mut g = a.values.clone();
    for i in 0..n {
        let bit = 1usize << i;
        for m in 0..1usize << n {
            if m & bit == 0 {
                let hi = g[m | bit].clone();
                g[m] += hi;
            }
        }
    }
    Ok(MeasureTable { n, values: g })
}

/// `M` with columns `(u_eps, 1)` for `eps` ascending, and `N = M^-1`.
///
/// Rows of `M` follow the complete polytope's coordinates and end with a row
/// of ones, so `N (p, 1)` lists the atom weights of `p`.
pub fn atom_matrix(n: usize, guard: usize) -> Result<(RationalMatrix, RationalMatrix)> {
    check_guard(n, guard)?;
    let idx = complete_index(n);
    let size = 1usize << n;
    let mut m = RationalMatrix::zeros(size, size);
    for eps in 0..size {
        for (r, x) in idx.vertex(eps as u64).into_iter().enumerate() {
            if x == 1 {
                m[(r, eps)] = Rational::one();
            }
        }
        m[(size - 1, eps)] = Rational::one();
    }
    let inv = invert(&m)?;
    debug_assert!((&m * &inv).is_identity());
    Ok((m, inv))
}

/// The `2^n` facets `-h(eps) <= 0` of the complete polytope, one per atom.
pub fn complete_polytope_hrep(n: usize, guard: usize) -> Result<InequalitySystem> {
    check_guard(n, guard)?;
    let idx = complete_index(n);
    let d = idx.len();
    let mut rows = Vec::with_capacity(1 << n);
    for e in 0u64..1 << n {
        let mut coeffs = vec![Rational::zero(); d];
        for (j, s) in idx.subsets().iter().enumerate() {
            if s.0 & e == e {
                // -(-1)^(|S| - |E|)
                let odd = (s.len() - e.count_ones() as usize) % 2 == 1;
                coeffs[j] = if odd {
                    Rational::one()
                } else {
                    -Rational::one()
                };
            }
        }
        let bound = if e == 0 {
            Rational::one()
        } else {
            Rational::zero()
        };
        rows.push(
            LinearInequality::new(coeffs, bound)
                .with_provenance(format!("atom {}", atom_label(n, e))),
        );
    }
    InequalitySystem::new(d, rows)?.with_labels(idx.labels())
}

/// The `2^n` vertices of the complete polytope.
pub fn complete_polytope_vertices(n: usize, guard: usize) -> Result<VertexSet> {
    check_guard(n, guard)?;
    complete_index(n).vertices()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, rat};

    fn table(vals: &[(i64, i64)]) -> MeasureTable {
        let n = (vals.len() + 1).trailing_zeros() as usize;
        MeasureTable::new(n, vals.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    #[test]
    fn forward_examples() {
        let coins = mobius_forward(&table(&[(1, 2), (1, 2), (1, 4)]));
        assert!(coins.values().iter().all(|v| *v == rat(1, 4)));
        let corr = mobius_forward(&table(&[(1, 2), (1, 2), (1, 2)]));
        assert_eq!(corr.get(0b11), &rat(1, 2));
        assert_eq!(corr.get(0b01), &int(0));
        assert_eq!(corr.get(0b10), &int(0));
        assert_eq!(corr.get(0b00), &rat(1, 2));
        let bad = mobius_forward(&table(&[(9, 10), (9, 10), (1, 2)]));
        assert_eq!(bad.get(0), &rat(-3, 10));
        assert_eq!(bad.first_negative(), Some(("00".to_string(), rat(-3, 10))));
    }

    #[test]
    fn inverse_examples() {
        let a = AtomTable::new(2, vec![rat(1, 4); 4]).unwrap();
        assert_eq!(
            mobius_inverse(&a).unwrap(),
            table(&[(1, 2), (1, 2), (1, 4)])
        );
        let mut point = vec![int(0); 8];
        point[7] = int(1);
        let f = mobius_inverse(&AtomTable::new(3, point).unwrap()).unwrap();
        assert!(f.point().iter().all(|v| *v == int(1)));
        let neg = AtomTable::new(1, vec![int(2), int(-1)]).unwrap();
        assert!(matches!(
            mobius_inverse(&neg),
            Err(Error::NegativeAtom { .. })
        ));
    }

    #[test]
    fn tables_validate() {
        assert!(MeasureTable::new(1, vec![rat(3, 2)]).is_err());
        assert!(MeasureTable::new(2, vec![rat(1, 2)]).is_err());
        assert!(AtomTable::new(1, vec![rat(1, 2), rat(1, 3)]).is_err());
    }

    #[test]
    fn atom_matrix_n1() {
        let (m, n) = atom_matrix(1, ATOM_MATRIX_GUARD).unwrap();
        assert_eq!(
            m,
            RationalMatrix::from_i64_rows(&[vec![0, 1], vec![1, 1]]).unwrap()
        );
        assert_eq!(
            n,
            RationalMatrix::from_i64_rows(&[vec![-1, 1], vec![1, 0]]).unwrap()
        );
        let (m2, _) = atom_matrix(2, ATOM_MATRIX_GUARD).unwrap();
        assert_eq!(crate::linalg::rank(&m2), 4);
        assert!(matches!(
            atom_matrix(9, ATOM_MATRIX_GUARD),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn cp_examples() {
        let h1 = complete_polytope_hrep(1, DEFAULT_GUARD).unwrap();
        let expect1 = InequalitySystem::new(
            1,
            vec![
                LinearInequality::from_ints(&[-1], 0),
                LinearInequality::from_ints(&[1], 1),
            ],
        )
        .unwrap();
        assert_eq!(h1.canonical().rows(), expect1.canonical().rows());
        // p1 p2 p12
        let h2 = complete_polytope_hrep(2, DEFAULT_GUARD).unwrap();
        let expect2 = InequalitySystem::new(
            3,
            vec![
                LinearInequality::from_ints(&[0, 0, -1], 0),
                LinearInequality::from_ints(&[-1, 0, 1], 0),
                LinearInequality::from_ints(&[0, -1, 1], 0),
                LinearInequality::from_ints(&[1, 1, -1], 1),
            ],
        )
        .unwrap();
        assert_eq!(h2.canonical().rows(), expect2.canonical().rows());
        assert_eq!(h2.labels().unwrap(), ["1", "2", "12"]);
        assert!(matches!(
            complete_polytope_hrep(17, DEFAULT_GUARD),
            Err(Error::GuardExceeded { .. })
        ));
    }
}
