//! Exact integer kernels shared by the hot loops.
//!
//! Everything here is generic over [`ExactInt`] so that the same code runs on
//! machine words with checked arithmetic and, after an [`Overflow`], again on
//! arbitrary-precision integers. Callers are expected to retry with
//! [`BigInt`] rather than ever accept a wrapped result.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// Marker for a checked operation that left the range of the integer type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Overflow;

impl From<Overflow> for crate::Error {
    fn from(_: Overflow) -> Self {
        crate::Error::Overflow
    }
}

pub trait ExactInt:
    Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Option<Self>;
    fn to_bigint(&self) -> BigInt;
    fn is_zero(&self) -> bool;
    fn signum(&self) -> i8;
    fn add(&self, o: &Self) -> Result<Self, Overflow>;
    fn sub(&self, o: &Self) -> Result<Self, Overflow>;
    fn mul(&self, o: &Self) -> Result<Self, Overflow>;
    fn neg(&self) -> Result<Self, Overflow>;
    /// Division known to be exact.
    fn div_exact(&self, o: &Self) -> Self;
    /// Non-negative gcd; `gcd(0, 0) = 0`.
    fn gcd(&self, o: &Self) -> Self;

    fn zero() -> Self {
        Self::from_i64(0)
    }
    fn one() -> Self {
        Self::from_i64(1)
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn abs(&self) -> Result<Self, Overflow> {
        if self.signum() < 0 {
            self.neg()
        } else {
            Ok(self.clone())
        }
    }
}

macro_rules! impl_exact_machine {
    ($t:ty) => {
        impl ExactInt for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn from_bigint(v: &BigInt) -> Option<Self> {
                <$t as num_traits::FromPrimitive>::from_i128(v.to_i128()?)
            }
            fn to_bigint(&self) -> BigInt {
                BigInt::from(*self)
            }
            fn is_zero(&self) -> bool {
                *self == 0
            }
            fn signum(&self) -> i8 {
                <$t>::signum(*self) as i8
            }
            fn add(&self, o: &Self) -> Result<Self, Overflow> {
                self.checked_add(*o).ok_or(Overflow)
            }
            fn sub(&self, o: &Self) -> Result<Self, Overflow> {
                self.checked_sub(*o).ok_or(Overflow)
            }
            fn mul(&self, o: &Self) -> Result<Self, Overflow> {
                self.checked_mul(*o).ok_or(Overflow)
            }
            fn neg(&self) -> Result<Self, Overflow> {
                self.checked_neg().ok_or(Overflow)
            }
            fn div_exact(&self, o: &Self) -> Self {
                debug_assert_eq!(self % o, 0);
                self / o
            }
            fn gcd(&self, o: &Self) -> Self {
                // i64::MIN has no positive counterpart; unsigned_abs sidesteps it
                let (mut a, mut b) = (self.unsigned_abs(), o.unsigned_abs());
                while b != 0 {
                    let t = a % b;
                    a = b;
                    b = t;
                }
                a as $t
            }
        }
    };
}

impl_exact_machine!(i64);
impl_exact_machine!(i128);

impl ExactInt for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_bigint(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn signum(&self) -> i8 {
        if Zero::is_zero(self) {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }
    fn add(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self * o)
    }
    fn neg(&self) -> Result<Self, Overflow> {
        Ok(-self)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
}

pub(crate) fn convert_rows<S: ExactInt, T: ExactInt>(rows: &[Vec<S>]) -> Option<Vec<Vec<T>>> {
    rows.iter()
        .map(|r| r.iter().map(|x| T::from_bigint(&x.to_bigint())).collect())
        .collect()
}

/// Dot product `a . b`.
pub fn dot<T: ExactInt>(a: &[T], b: &[T]) -> Result<T, Overflow> {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc = acc.add(&x.mul(y)?)?;
    }
    Ok(acc)
}

/// `alpha * a + beta * b`, entrywise.
pub fn lincomb<T: ExactInt>(alpha: &T, a: &[T], beta: &T, b: &[T]) -> Result<Vec<T>, Overflow> {
    a.iter()
        .zip(b)
        .map(|(x, y)| alpha.mul(x)?.add(&beta.mul(y)?))
        .collect()
}

/// Divides out the gcd of all entries. A zero vector is left unchanged.
pub fn primitive<T: ExactInt>(v: &mut [T]) {
    let mut g = T::zero();
    for x in v.iter() {
        g = g.gcd(x);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() {
        return;
    }
    for x in v.iter_mut() {
        *x = x.div_exact(&g);
    }
}

/// Fraction-free (Bareiss) forward elimination, in place.
///
/// Returns the pivot columns. After the call the first `pivots.len()` rows
/// are in echelon form; every intermediate entry is a minor of the input, so
/// divisions are exact.
pub fn bareiss_echelon<T: ExactInt>(m: &mut [Vec<T>]) -> Result<Vec<usize>, Overflow> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev = T::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let piv = pivot_row[c].clone();
        for row in rest.iter_mut() {
            let f = row[c].clone();
            for j in c + 1..ncols {
                let v = piv.mul(&row[j])?.sub(&f.mul(&pivot_row[j])?)?;
                row[j] = v.div_exact(&prev);
            }
            row[c] = T::zero();
        }
        // entries left of the pivot in the pivot row are already zero
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    Ok(pivots)
}

pub fn bareiss_rank<T: ExactInt>(mut m: Vec<Vec<T>>) -> Result<usize, Overflow> {
    Ok(bareiss_echelon(&mut m)?.len())
}

/// Exact rank of a small-integer matrix, using `i128` and falling back to
/// arbitrary precision only if an intermediate minor overflows.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let wide: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    match bareiss_rank(wide) {
        Ok(r) => r,
        Err(Overflow) => {
            let big: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            bareiss_rank(big).expect("arbitrary precision cannot overflow")
        }
    }
}

/// Affine dimension of a set of 0/1 points given as byte rows; -1 for none.
pub fn binary_affine_dim<'a, I>(points: I) -> i64
where
    I: IntoIterator<Item = &'a [u8]>,
{
    let rows: Vec<Vec<i64>> = points
        .into_iter()
        .map(|p| {
            let mut r: Vec<i64> = p.iter().map(|&x| x as i64).collect();
            r.push(1);
            r
        })
        .collect();
    if rows.is_empty() {
        return -1;
    }
    integer_rank(&rows) as i64 - 1
}
