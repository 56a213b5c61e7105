//! Double description for cones `{y : h_i . y >= 0}` over the integers.
//!
//! The cone starts as the whole space (lineality basis = unit vectors) and
//! rows are intersected one at a time. Adjacency is decided combinatorially
//! from the sets of processed rows each ray is tight on.

use std::time::Instant;

use fixedbitset::FixedBitSet;
use log::trace;
use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::int::{convert_rows, dot, lincomb, primitive, ExactInt, Overflow};

/// Extreme rays (one per ray, primitive) and a basis of the lineality space.
#[derive(Clone, Debug)]
pub struct Cone {
    pub rays: Vec<Vec<BigInt>>,
    pub lineality: Vec<Vec<BigInt>>,
}

enum Stop {
    Overflow,
    Deadline,
}

impl From<Overflow> for Stop {
    fn from(_: Overflow) -> Self {
        Stop::Overflow
    }
}

struct Ray<T> {
    v: Vec<T>,
    tight: FixedBitSet,
}

fn past(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() > d)
}

fn run<T: ExactInt>(
    rows: &[Vec<T>],
    k: usize,
    deadline: Option<Instant>,
) -> std::result::Result<(Vec<Vec<T>>, Vec<Vec<T>>), Stop> {
    let m = rows.len();
    let mut lineality: Vec<Vec<T>> = (0..k)
        .map(|i| (0..k).map(|j| T::from_i64((i == j) as i64)).collect())
        .collect();
    let mut rays: Vec<Ray<T>> = Vec::new();
    let mut processed = FixedBitSet::with_capacity(m);
    let mut remaining: Vec<usize> = (0..m).collect();

    while !remaining.is_empty() {
        if past(deadline) {
            return Err(Stop::Deadline);
        }
        // a row that cuts the lineality space goes first
        let mut lin_hit = None;
        'outer: for (pos, &i) in remaining.iter().enumerate() {
            for (j, l) in lineality.iter().enumerate() {
                if !dot(&rows[i], l)?.is_zero() {
                    lin_hit = Some((pos, i, j));
                    break 'outer;
                }
            }
        }
        if let Some((pos, i, j)) = lin_hit {
            remaining.remove(pos);
            let h = &rows[i];
            let mut l = lineality.remove(j);
            let mut s = dot(h, &l)?;
            if s.signum() < 0 {
                l = l
                    .iter()
                    .map(|x| x.neg())
                    .collect::<std::result::Result<_, _>>()?;
                s = s.neg()?;
            }
            for other in lineality.iter_mut() {
                let t = dot(h, other)?;
                if !t.is_zero() {
                    let mut v = lincomb(&s, other, &t.neg()?, &l)?;
                    primitive(&mut v);
                    *other = v;
                }
            }
            for r in rays.iter_mut() {
                let t = dot(h, &r.v)?;
                if !t.is_zero() {
                    let mut v = lincomb(&s, &r.v, &t.neg()?, &l)?;
                    primitive(&mut v);
                    r.v = v;
                }
                r.tight.insert(i);
            }
            rays.push(Ray {
                v: l,
                tight: processed.clone(),
            });
            processed.insert(i);
            continue;
        }

        // fewest violated rays first, lowest index on ties
        let mut best: Option<(usize, usize)> = None;
        for (pos, &i) in remaining.iter().enumerate() {
            let cutoff = best.map_or(usize::MAX, |b| b.1);
            let mut count = 0;
            for r in &rays {
                if dot(&rows[i], &r.v)?.signum() < 0 {
                    count += 1;
                    if count >= cutoff {
                        break;
                    }
                }
            }
            if count < cutoff {
                best = Some((pos, count));
            }
        }
        let (pos, _) = best.expect("remaining is nonempty");
        let i = remaining.remove(pos);
        let h = &rows[i];

        let signs: Vec<T> = rays
            .par_iter()
            .map(|r| dot(h, &r.v))
            .collect::<std::result::Result<_, _>>()?;
        let plus: Vec<usize> = (0..rays.len()).filter(|&r| signs[r].signum() > 0).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&r| signs[r].signum() < 0).collect();

        let min_common = (k - lineality.len()) as i64 - 2;
        let new_rays: Vec<Ray<T>> = if minus.is_empty() {
            Vec::new()
        } else {
            let rays_ref = &rays;
            let signs_ref = &signs;
            let minus_ref = &minus;
            plus.par_iter()
                .map(|&p| -> std::result::Result<Vec<Ray<T>>, Stop> {
                    if past(deadline) {
                        return Err(Stop::Deadline);
                    }
                    let mut out = Vec::new();
                    for &n in minus_ref {
                        let mut z = rays_ref[p].tight.clone();
                        z.intersect_with(&rays_ref[n].tight);
                        if (z.count_ones(..) as i64) < min_common {
                            continue;
                        }
                        let adjacent = rays_ref
                            .iter()
                            .enumerate()
                            .all(|(q, r)| q == p || q == n || !z.is_subset(&r.tight));
                        if !adjacent {
                            continue;
                        }
                        let a = &signs_ref[p];
                        let b = signs_ref[n].neg()?;
                        let mut v = lincomb(a, &rays_ref[n].v, &b, &rays_ref[p].v)?;
                        primitive(&mut v);
                        z.insert(i);
                        out.push(Ray { v, tight: z });
                    }
                    Ok(out)
                })
                .collect::<std::result::Result<Vec<_>, _>>()?
                .into_iter()
                .flatten()
                .collect()
        };
        let mut kept = Vec::with_capacity(rays.len() + new_rays.len());
        for (r, s) in rays.into_iter().zip(&signs) {
            match s.signum() {
                x if x > 0 => kept.push(r),
                0 => {
                    let mut r = r;
                    r.tight.insert(i);
                    kept.push(r);
                }
                _ => {}
            }
        }
        kept.extend(new_rays);
        rays = kept;
        processed.insert(i);
        trace!(
            "row {i}: {} rays, lineality {}, {} rows left",
            rays.len(),
            lineality.len(),
            remaining.len()
        );
    }
    Ok((rays.into_iter().map(|r| r.v).collect(), lineality))
}

fn widen<T: ExactInt>(rows: Vec<Vec<T>>) -> Vec<Vec<BigInt>> {
    rows.into_iter()
        .map(|r| r.iter().map(ExactInt::to_bigint).collect())
        .collect()
}

/// Extreme rays and lineality of `{y in Q^k : h . y >= 0 for every row h}`.
pub fn cone(rows: &[Vec<BigInt>], k: usize, deadline: Option<Instant>) -> Result<Cone> {
    for r in rows {
        if r.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: r.len(),
            });
        }
    }
    if let Some(small) = convert_rows::<BigInt, i64>(rows) {
        match run(&small, k, deadline) {
            Ok((rays, lin)) => {
                return Ok(Cone {
                    rays: widen(rays),
                    lineality: widen(lin),
                })
            }
            Err(Stop::Deadline) => return Err(Error::DeadlineExceeded),
            Err(Stop::Overflow) => {
                log::debug!("double description overflowed machine integers; retrying exactly")
            }
        }
    }
    match run(rows, k, deadline) {
        Ok((rays, lineality)) => Ok(Cone { rays, lineality }),
        Err(Stop::Deadline) => Err(Error::DeadlineExceeded),
        Err(Stop::Overflow) => unreachable!("arbitrary precision cannot overflow"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn orthant() {
        let c = cone(&big(&[&[1, 0], &[0, 1]]), 2, None).unwrap();
        assert!(c.lineality.is_empty());
        let mut rays = c.rays;
        rays.sort();
        assert_eq!(rays, big(&[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn half_space_keeps_lineality() {
        let c = cone(&big(&[&[1, 1, 0]]), 3, None).unwrap();
        assert_eq!(c.lineality.len(), 2);
        assert_eq!(c.rays.len(), 1);
    }

    #[test]
    fn square_cone_has_four_rays() {
        // homogenized unit square: t >= 0, x >= 0, y >= 0, t - x >= 0, t - y >= 0
        let rows = big(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, -1, 0], &[1, 0, -1]]);
        let c = cone(&rows, 3, None).unwrap();
        assert!(c.lineality.is_empty());
        let mut rays = c.rays;
        rays.sort();
        assert_eq!(rays, big(&[&[1, 0, 0], &[1, 0, 1], &[1, 1, 0], &[1, 1, 1]]));
    }
}
