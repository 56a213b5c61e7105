//! Exact rational scalars, vectors and matrices.
//!
//! [`Rational`] is always stored in lowest terms with a positive denominator,
//! so structural equality is numeric equality. Rank and solve use
//! fraction-free elimination on integer-scaled rows.

pub mod int;

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use int::bareiss_echelon;

pub type Rational = num_rational::BigRational;
pub type RationalVector = Vec<Rational>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses the `p/q` or `p` token form. No whitespace is allowed inside.
pub fn parse_rational(tok: &str) -> Option<Rational> {
    let (num, den) = match tok.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (tok, None),
    };
    let valid = |s: &str| {
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) {
        return None;
    }
    let n: BigInt = num.parse().ok()?;
    match den {
        None => Some(Rational::from_integer(n)),
        Some(d) => {
            if !d.bytes().all(|b| b.is_ascii_digit()) || d.is_empty() {
                return None;
            }
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
    }
}

/// Token form used in every file format: `p` for integers, `p/q` otherwise.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Scales a rational row to integers (multiplying by the lcm of denominators).
pub fn clear_denominators(row: &[Rational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Result<Rational> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r);
        }
        Ok(RationalMatrix {
            rows: nrows,
            cols,
            data,
        })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<RationalVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = &self[(i, j)];
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;
    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = RationalMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let toks: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "  {}", toks.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Integer-scaled echelon form; tries machine words before big integers.
fn integer_echelon(rows: &[Vec<Rational>]) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let scaled: Vec<Vec<BigInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
    if let Some(mut small) = int::convert_rows::<BigInt, i128>(&scaled) {
        if let Ok(p) = bareiss_echelon(&mut small) {
            let big = small
                .iter()
                .map(|r| r.iter().map(int::ExactInt::to_bigint).collect())
                .collect();
            return (big, p);
        }
    }
    let mut big = scaled;
    let p = bareiss_echelon(&mut big).expect("arbitrary precision cannot overflow");
    (big, p)
}

pub fn rank(m: &RationalMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    integer_echelon(&m.to_rows()).1.len()
}

/// Reduced row echelon form over the rationals. Returns the reduced rows
/// (zero rows dropped) and their pivot columns.
pub fn rref(rows: &[Vec<Rational>]) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let (ech, pivots) = integer_echelon(rows);
    let mut out: Vec<Vec<Rational>> = ech
        .into_iter()
        .take(pivots.len())
        .map(|r| r.into_iter().map(Rational::from_integer).collect())
        .collect();
    for (i, &c) in pivots.iter().enumerate().rev() {
        let p = out[i][c].clone();
        for x in out[i].iter_mut() {
            *x /= &p;
        }
        let (above, from) = out.split_at_mut(i);
        let pivot_row = &from[0];
        for row in above.iter_mut() {
            let f = row[c].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
    }
    (out, pivots)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(RationalVector),
    None,
    Infinite {
        particular: RationalVector,
        nullspace: Vec<RationalVector>,
    },
}

pub fn solve_linear(m: &RationalMatrix, rhs: &[Rational]) -> Result<Solution> {
    if rhs.len() != m.rows {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            found: rhs.len(),
        });
    }
    let n = m.cols;
    let aug: Vec<Vec<Rational>> = (0..m.rows)
        .map(|i| {
            let mut r = m.row(i).to_vec();
            r.push(rhs[i].clone());
            r
        })
        .collect();
    let (red, pivots) = if aug.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        rref(&aug)
    };
    if pivots.last() == Some(&n) {
        return Ok(Solution::None);
    }
    let mut particular = vec![Rational::zero(); n];
    for (row, &c) in red.iter().zip(&pivots) {
        particular[c] = row[n].clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if free.is_empty() {
        return Ok(Solution::Unique(particular));
    }
    let nullspace = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (row, &c) in red.iter().zip(&pivots) {
                v[c] = -row[f].clone();
            }
            v
        })
        .collect();
    Ok(Solution::Infinite {
        particular,
        nullspace,
    })
}

pub fn nullspace(m: &RationalMatrix) -> Vec<RationalVector> {
    match solve_linear(m, &vec![Rational::zero(); m.rows]) {
        Ok(Solution::Infinite { nullspace, .. }) => nullspace,
        _ => Vec::new(),
    }
}

pub fn invert(m: &RationalMatrix) -> Result<RationalMatrix> {
    if m.rows != m.cols {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let aug: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut r = m.row(i).to_vec();
            r.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    let (red, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::Singular);
    }
    RationalMatrix::from_rows(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Dimension of the affine hull: -1 for no points, 0 for one.
pub fn affine_dim(points: &[RationalVector]) -> Result<i64> {
    let Some(first) = points.first() else {
        return Ok(-1);
    };
    let d = first.len();
    let mut diffs = Vec::with_capacity(points.len() - 1);
    for p in &points[1..] {
        if p.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.len(),
            });
        }
        diffs.push(p.iter().zip(first).map(|(a, b)| a - b).collect::<Vec<_>>());
    }
    if diffs.is_empty() {
        return Ok(0);
    }
    Ok(rank(&RationalMatrix::from_rows(diffs)?) as i64)
}

pub fn is_nonnegative(x: &Rational) -> bool {
    !x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_i64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn parse_and_format_tokens() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-4"), Some(int(-4)));
        assert_eq!(parse_rational("4/-2"), None);
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1 /2"), None);
        assert_eq!(parse_rational(""), None);
        assert_eq!(format_rational(&rat(-6, 4)), "-3/2");
        assert_eq!(format_rational(&int(7)), "7");
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&RationalMatrix::identity(3)), 3);
        assert_eq!(rank(&RationalMatrix::zeros(2, 4)), 0);
        // columns (e1, e2, e1 e2, 1) for the four assignments of two bits
        let cols = [[0, 0, 0, 1], [1, 0, 0, 1], [0, 1, 0, 1], [1, 1, 1, 1]];
        let rows: Vec<Vec<i64>> = (0..4)
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        assert_eq!(rank(&RationalMatrix::from_i64_rows(&rows).unwrap()), 4);
    }

    #[test]
    fn solve_examples() {
        let s = solve_linear(&RationalMatrix::identity(2), &[int(1), int(2)]).unwrap();
        assert_eq!(s, Solution::Unique(vec![int(1), int(2)]));

        let s = solve_linear(&m(&[&[1, 1]]), &[int(1)]).unwrap();
        assert_eq!(
            s,
            Solution::Infinite {
                particular: vec![int(1), int(0)],
                nullspace: vec![vec![int(-1), int(1)]],
            }
        );

        let s = solve_linear(&m(&[&[1], &[1]]), &[int(0), int(1)]).unwrap();
        assert_eq!(s, Solution::None);

        assert!(solve_linear(&m(&[&[1]]), &[int(0), int(1)]).is_err());
    }

    #[test]
    fn invert_examples() {
        let n = invert(&m(&[&[0, 1], &[1, 1]])).unwrap();
        assert_eq!(n, m(&[&[-1, 1], &[1, 0]]));
        assert_eq!(
            invert(&RationalMatrix::identity(3)).unwrap(),
            RationalMatrix::identity(3)
        );
        assert!(matches!(
            invert(&m(&[&[1, 1], &[1, 1]])),
            Err(Error::Singular)
        ));
        assert!(matches!(
            invert(&m(&[&[1, 1]])),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn invert_with_fractions() {
        let a =
            RationalMatrix::from_rows(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(-2, 5), int(4)]])
                .unwrap();
        let inv = invert(&a).unwrap();
        assert!((&inv * &a).is_identity());
    }

    #[test]
    fn affine_dim_examples() {
        let pts = vec![
            vec![int(0), int(0)],
            vec![int(1), int(0)],
            vec![int(0), int(1)],
        ];
        assert_eq!(affine_dim(&pts).unwrap(), 2);
        assert_eq!(affine_dim(&[]).unwrap(), -1);
        assert_eq!(affine_dim(&pts[..1]).unwrap(), 0);
        assert!(affine_dim(&[vec![int(0)], vec![int(1), int(2)]]).is_err());
    }
}
