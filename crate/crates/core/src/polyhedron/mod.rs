//! H- and V-representations of bounded 0/1 polytopes, canonical row
//! normalization, and facet classification against a vertex set.

mod io;

pub use io::{read_hrep, read_vrep, write_hrep, write_vrep};

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::int::{binary_affine_dim, ExactInt};
use crate::linalg::{clear_denominators, format_rational, Rational, RationalVector};

/// A single half-space `coeffs . x <= bound`.
#[derive(Clone, Debug)]
pub struct LinearInequality {
    pub coeffs: RationalVector,
    pub bound: Rational,
    pub provenance: Option<String>,
}

impl PartialEq for LinearInequality {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.bound == other.bound
    }
}

impl Eq for LinearInequality {}

impl LinearInequality {
    pub fn new(coeffs: RationalVector, bound: Rational) -> Self {
        LinearInequality {
            coeffs,
            bound,
            provenance: None,
        }
    }

    pub fn from_ints(coeffs: &[i64], bound: i64) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(c.into()))
                .collect(),
            Rational::from_integer(bound.into()),
        )
    }

    pub fn from_bigints(coeffs: &[BigInt], bound: &BigInt) -> Self {
        Self::new(
            coeffs.iter().cloned().map(Rational::from_integer).collect(),
            Rational::from_integer(bound.clone()),
        )
    }

    pub fn with_provenance(mut self, tag: impl Into<String>) -> Self {
        self.provenance = Some(tag.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// `0 . x <= b`.
    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `0 . x <= b` with `b < 0`: no point satisfies it.
    pub fn is_contradiction(&self) -> bool {
        self.is_trivial() && self.bound.is_negative()
    }

    /// Coprime integer row `(a_1, .., a_d, b)` obtained by positive scaling.
    pub fn key(&self) -> Vec<BigInt> {
        let mut all: Vec<Rational> = self.coeffs.clone();
        all.push(self.bound.clone());
        let mut ints = clear_denominators(&all);
        crate::linalg::int::primitive(&mut ints);
        ints
    }

    pub fn normalize(&self) -> LinearInequality {
        let key = self.key();
        let (coeffs, bound) = key.split_at(self.dim());
        let mut out = LinearInequality::from_bigints(coeffs, &bound[0]);
        out.provenance = self.provenance.clone();
        out
    }

    /// Normalized row as machine integers, if every entry fits.
    pub fn small_key(&self) -> Option<Vec<i64>> {
        self.key().iter().map(ToPrimitive::to_i64).collect()
    }

    /// Left-hand side evaluated at a 0/1 point.
    pub fn eval_binary(&self, point: &[u8]) -> Rational {
        self.coeffs
            .iter()
            .zip(point)
            .filter(|(_, &p)| p != 0)
            .fold(Rational::zero(), |acc, (c, _)| acc + c)
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(point)
            .fold(Rational::zero(), |acc, (c, x)| acc + c * x)
    }

    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        self.eval(point) <= self.bound
    }

    pub fn negated(&self) -> LinearInequality {
        LinearInequality::new(
            self.coeffs.iter().map(|c| -c).collect(),
            -self.bound.clone(),
        )
    }
}

/// Lexicographic order on normalized integer rows.
pub fn cmp_rows(a: &LinearInequality, b: &LinearInequality) -> Ordering {
    a.key().cmp(&b.key())
}

impl fmt::Display for LinearInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        write!(f, "{} <= {}", toks.join(" "), format_rational(&self.bound))
    }
}

/// Renders `a . x <= b` using coordinate labels, e.g. `p13 + p14 - p1 <= 0`.
pub fn render_with_labels(ineq: &LinearInequality, labels: &[String]) -> String {
    let mut s = String::new();
    for (c, l) in ineq.coeffs.iter().zip(labels) {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let sign = if c.is_negative() { "-" } else { "+" };
        if s.is_empty() {
            if c.is_negative() {
                s.push('-');
            }
        } else {
            s.push_str(&format!(" {sign} "));
        }
        if !mag.is_one() {
            s.push_str(&format_rational(&mag));
        }
        s.push('p');
        s.push_str(l);
    }
    if s.is_empty() {
        s.push('0');
    }
    format!("{s} <= {}", format_rational(&ineq.bound))
}

#[derive(Clone, Debug)]
pub struct InequalitySystem {
    dim: usize,
    rows: Vec<LinearInequality>,
    labels: Option<Vec<String>>,
}

impl InequalitySystem {
    /// Builds a system; rows that coincide after normalization are kept once
    /// (first occurrence wins).
    pub fn new(dim: usize, rows: Vec<LinearInequality>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(rows.len());
        let mut kept = Vec::with_capacity(rows.len());
        for r in rows {
            if r.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.dim(),
                });
            }
            if seen.insert(r.key()) {
                kept.push(r);
            }
        }
        Ok(InequalitySystem {
            dim,
            rows: kept,
            labels: None,
        })
    }

    pub fn empty(dim: usize) -> Self {
        InequalitySystem {
            dim,
            rows: Vec::new(),
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn set_labels(&mut self, labels: Option<Vec<String>>) {
        self.labels = labels.filter(|l| l.len() == self.dim);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[LinearInequality] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<LinearInequality> {
        self.rows
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Adds a row unless an equal normalized row is already present.
    pub fn push(&mut self, row: LinearInequality) -> Result<bool> {
        if row.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: row.dim(),
            });
        }
        let k = row.key();
        if self.rows.iter().any(|r| r.key() == k) {
            return Ok(false);
        }
        self.rows.push(row);
        Ok(true)
    }

    pub fn without_row(&self, index: usize) -> InequalitySystem {
        let mut rows = self.rows.clone();
        rows.remove(index);
        InequalitySystem {
            dim: self.dim,
            rows,
            labels: self.labels.clone(),
        }
    }

    /// Normalized rows in lexicographic order of their integer form.
    pub fn canonical(&self) -> InequalitySystem {
        let mut keyed: Vec<(Vec<BigInt>, LinearInequality)> =
            self.rows.iter().map(|r| (r.key(), r.normalize())).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        InequalitySystem {
            dim: self.dim,
            rows: keyed.into_iter().map(|(_, r)| r).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn key_set(&self) -> HashSet<Vec<BigInt>> {
        self.rows.iter().map(LinearInequality::key).collect()
    }

    pub fn contains(&self, row: &LinearInequality) -> bool {
        let k = row.key();
        self.rows.iter().any(|r| r.key() == k)
    }

    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        self.rows.iter().all(|r| r.satisfied_by(point))
    }

    /// Keeps the rows selected by `keep`, preserving order.
    pub fn filter(&self, mut keep: impl FnMut(&LinearInequality) -> bool) -> InequalitySystem {
        InequalitySystem {
            dim: self.dim,
            rows: self.rows.iter().filter(|r| keep(r)).cloned().collect(),
            labels: self.labels.clone(),
        }
    }

    /// Reorders coordinates: column `j` of the result is column `perm[j]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<InequalitySystem> {
        if perm.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: perm.len(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|r| LinearInequality {
                coeffs: perm.iter().map(|&j| r.coeffs[j].clone()).collect(),
                bound: r.bound.clone(),
                provenance: r.provenance.clone(),
            })
            .collect();
        Ok(InequalitySystem {
            dim: self.dim,
            rows,
            labels: self
                .labels
                .as_ref()
                .map(|l| perm.iter().map(|&j| l[j].clone()).collect()),
        })
    }
}

/// The 0/1 vertices of a correlation polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    dim: usize,
    vertices: Vec<Vec<u8>>,
    labels: Option<Vec<String>>,
}

impl VertexSet {
    /// Rejects non-0/1 entries; repeated vertices are kept once.
    pub fn new(dim: usize, vertices: Vec<Vec<u8>>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(vertices.len());
        let mut kept = Vec::with_capacity(vertices.len());
        for v in vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|&x| x > 1) {
                return Err(Error::NonBinaryVertex(
                    v.iter().map(|x| x.to_string()).collect(),
                ));
            }
            if seen.insert(v.clone()) {
                kept.push(v);
            }
        }
        Ok(VertexSet {
            dim,
            vertices: kept,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn set_labels(&mut self, labels: Option<Vec<String>>) {
        self.labels = labels.filter(|l| l.len() == self.dim);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<u8>] {
        &self.vertices
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn as_rational(&self) -> Vec<RationalVector> {
        self.vertices
            .iter()
            .map(|v| {
                v.iter()
                    .map(|&x| Rational::from_integer(x.into()))
                    .collect()
            })
            .collect()
    }

    pub fn affine_dim(&self) -> i64 {
        binary_affine_dim(self.vertices.iter().map(Vec::as_slice))
    }

    /// Vertices in lexicographic order.
    pub fn sorted(&self) -> VertexSet {
        let mut v = self.vertices.clone();
        v.sort();
        VertexSet {
            dim: self.dim,
            vertices: v,
            labels: self.labels.clone(),
        }
    }

    /// Coordinate projection keeping `keep` (in that order), deduplicated.
    pub fn project(&self, keep: &[usize]) -> VertexSet {
        let verts = self
            .vertices
            .iter()
            .map(|v| keep.iter().map(|&j| v[j]).collect())
            .collect();
        let mut out = VertexSet::new(keep.len(), verts).expect("projection stays 0/1");
        if let Some(l) = &self.labels {
            out.labels = Some(keep.iter().map(|&j| l[j].clone()).collect());
        }
        out
    }

    pub fn same_set(&self, other: &VertexSet) -> bool {
        self.dim == other.dim && self.sorted().vertices == other.sorted().vertices
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Invalid,
    ValidNonFacet,
    Facet,
}

/// Integer view of a normalized row for fast evaluation on 0/1 points.
pub(crate) enum IntRow {
    Small(Vec<i64>, i64),
    Big(Vec<BigInt>, BigInt),
}

impl IntRow {
    pub(crate) fn new(ineq: &LinearInequality) -> Self {
        let key = ineq.key();
        if let Some(s) = key
            .iter()
            .map(ToPrimitive::to_i64)
            .collect::<Option<Vec<i64>>>()
        {
            // sums over at most `dim` entries; stay well inside i64
            if s.iter().all(|x| x.unsigned_abs() < (1 << 40)) {
                let b = *s.last().unwrap();
                return IntRow::Small(s[..s.len() - 1].to_vec(), b);
            }
        }
        let b = key.last().unwrap().clone();
        IntRow::Big(key[..key.len() - 1].to_vec(), b)
    }

    /// Sign of `bound - a . v`: positive strict, zero tight, negative violated.
    pub(crate) fn slack_sign(&self, v: &[u8]) -> i8 {
        match self {
            IntRow::Small(a, b) => {
                let s: i64 = a
                    .iter()
                    .zip(v)
                    .filter(|(_, &x)| x != 0)
                    .map(|(c, _)| c)
                    .sum();
                (b - s).signum() as i8
            }
            IntRow::Big(a, b) => {
                let s: BigInt = a
                    .iter()
                    .zip(v)
                    .filter(|(_, &x)| x != 0)
                    .map(|(c, _)| c)
                    .sum();
                ExactInt::signum(&(b - s))
            }
        }
    }
}

fn check_dims(ineq: &LinearInequality, v: &VertexSet) -> Result<()> {
    if ineq.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            found: ineq.dim(),
        });
    }
    Ok(())
}

pub fn is_valid(ineq: &LinearInequality, v: &VertexSet) -> Result<bool> {
    check_dims(ineq, v)?;
    let row = IntRow::new(ineq);
    Ok(v.vertices().iter().all(|p| row.slack_sign(p) >= 0))
}

pub fn saturating_vertices(ineq: &LinearInequality, v: &VertexSet) -> Result<VertexSet> {
    check_dims(ineq, v)?;
    let row = IntRow::new(ineq);
    let mut tight = Vec::new();
    for p in v.vertices() {
        match row.slack_sign(p) {
            s if s < 0 => return Err(Error::InvalidInequality),
            0 => tight.push(p.clone()),
            _ => {}
        }
    }
    let mut out = VertexSet::new(v.dim(), tight)?;
    out.labels = v.labels.clone();
    Ok(out)
}

/// Classification with the affine dimension of `v` supplied by the caller.
pub(crate) fn classify_with_dim(
    ineq: &LinearInequality,
    v: &VertexSet,
    vdim: i64,
) -> Classification {
    let row = IntRow::new(ineq);
    let mut tight: Vec<&[u8]> = Vec::new();
    for p in v.vertices() {
        match row.slack_sign(p) {
            s if s < 0 => return Classification::Invalid,
            0 => tight.push(p),
            _ => {}
        }
    }
    // a facet needs at least vdim affinely independent tight points
    if (tight.len() as i64) < vdim {
        return Classification::ValidNonFacet;
    }
    if binary_affine_dim(tight) == vdim - 1 && !ineq.is_trivial() {
        Classification::Facet
    } else {
        Classification::ValidNonFacet
    }
}

pub fn classify(ineq: &LinearInequality, v: &VertexSet) -> Result<Classification> {
    check_dims(ineq, v)?;
    Ok(classify_with_dim(ineq, v, v.affine_dim()))
}

pub fn classify_all(s: &InequalitySystem, v: &VertexSet) -> Result<Vec<Classification>> {
    if s.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            found: s.dim(),
        });
    }
    let vdim = v.affine_dim();
    Ok(s.rows()
        .par_iter()
        .map(|r| classify_with_dim(r, v, vdim))
        .collect())
}

/// The rows of `s` that are facets of `conv(v)`, normalized and sorted.
pub fn facet_subsystem(s: &InequalitySystem, v: &VertexSet) -> Result<InequalitySystem> {
    let cls = classify_all(s, v)?;
    let mut it = cls.iter();
    Ok(s.filter(|_| it.next() == Some(&Classification::Facet))
        .canonical())
}

/// True iff both systems contain the same facets of `conv(v)`.
pub fn systems_equivalent(
    a: &InequalitySystem,
    b: &InequalitySystem,
    v: &VertexSet,
) -> Result<bool> {
    if a.dim() != b.dim() {
        return Ok(false);
    }
    let fa = facet_subsystem(a, v)?.key_set();
    let fb = facet_subsystem(b, v)?.key_set();
    Ok(fa == fb)
}
