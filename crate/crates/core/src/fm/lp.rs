//! Exact simplex over the rationals with Bland's rule.
//!
//! Problems of the form `max c.x s.t. A x <= b` (x free) are solved through
//! their dual `min b.y s.t. A^T y = c, y >= 0`, whose tableau has only
//! `dim` rows no matter how many inequalities there are. The primal optimum
//! is recovered as the simplex multipliers of the final dual basis.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{solve_linear, Rational, RationalMatrix, RationalVector, Solution};
use crate::polyhedron::InequalitySystem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimum {
        value: Rational,
        witness: RationalVector,
    },
    Unbounded,
    Infeasible,
}

/// `min cost.y s.t. a y = rhs, y >= 0`.
struct StandardForm {
    a: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    cost: Vec<Rational>,
}

enum StandardOutcome {
    /// Multipliers `pi` with `a^T pi <= cost` and `rhs.pi = value`.
    Optimal {
        value: Rational,
        multipliers: Vec<Rational>,
    },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// reduced costs, one per column
    reduced: Vec<Rational>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in self.rows[i].iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        let f = self.reduced[c].clone();
        if !f.is_zero() {
            for (x, y) in self.reduced.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule over columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.reduced[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let e = &self.rows[i][c];
                if !e.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / e;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return false;
            };
            self.pivot(r, c);
        }
    }
}

fn solve_standard(lp: &StandardForm) -> StandardOutcome {
    let m = lp.a.len();
    let n = lp.cost.len();
    if m == 0 {
        return if lp.cost.iter().any(Signed::is_negative) {
            StandardOutcome::Unbounded
        } else {
            StandardOutcome::Optimal {
                value: Rational::zero(),
                multipliers: Vec::new(),
            }
        };
    }
    let mut flipped = vec![false; m];
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let neg = lp.rhs[i].is_negative();
        flipped[i] = neg;
        let mut r: Vec<Rational> = if neg {
            lp.a[i].iter().map(|x| -x).collect()
        } else {
            lp.a[i].clone()
        };
        r.extend((0..m).map(|k| {
            if k == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        }));
        rows.push(r);
        rhs.push(if neg {
            -lp.rhs[i].clone()
        } else {
            lp.rhs[i].clone()
        });
    }
    let original: Vec<Vec<Rational>> = rows.iter().map(|r| r[..n].to_vec()).collect();

    // phase 1: minimize the sum of artificials
    let mut reduced = vec![Rational::zero(); n + m];
    for j in 0..n {
        reduced[j] = -rows.iter().fold(Rational::zero(), |acc, r| acc + &r[j]);
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (n..n + m).collect(),
        reduced,
    };
    t.optimize(n + m);
    let infeasibility: Rational = (0..m)
        .filter(|&i| t.basis[i] >= n)
        .fold(Rational::zero(), |acc, i| acc + &t.rhs[i]);
    if infeasibility.is_positive() {
        return StandardOutcome::Infeasible;
    }

    // drive zero-level artificials out; rows where that fails are dependent
    let mut keep = vec![true; m];
    for i in 0..m {
        if t.basis[i] < n {
            continue;
        }
        match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
            Some(j) => t.pivot(i, j),
            None => keep[i] = false,
        }
    }
    let kept: Vec<usize> = (0..m).filter(|&i| keep[i]).collect();
    t.rows = kept.iter().map(|&i| t.rows[i].clone()).collect();
    t.rhs = kept.iter().map(|&i| t.rhs[i].clone()).collect();
    t.basis = kept.iter().map(|&i| t.basis[i]).collect();

    // phase 2
    let mut reduced = vec![Rational::zero(); n + m];
    for j in 0..n {
        let mut d = lp.cost[j].clone();
        for (row, &b) in t.rows.iter().zip(&t.basis) {
            if !row[j].is_zero() {
                d -= &lp.cost[b] * &row[j];
            }
        }
        reduced[j] = d;
    }
    t.reduced = reduced;
    if !t.optimize(n) {
        return StandardOutcome::Unbounded;
    }
    let value = t
        .basis
        .iter()
        .zip(&t.rhs)
        .fold(Rational::zero(), |acc, (&b, x)| acc + &lp.cost[b] * x);

    // multipliers: B^T pi = c_B over the kept rows
    let bt = RationalMatrix::from_rows(
        t.basis
            .iter()
            .map(|&b| kept.iter().map(|&i| original[i][b].clone()).collect())
            .collect(),
    )
    .expect("basis matrix is rectangular");
    let cb: Vec<Rational> = t.basis.iter().map(|&b| lp.cost[b].clone()).collect();
    let pi_kept = match solve_linear(&bt, &cb) {
        Ok(Solution::Unique(p)) => p,
        Ok(Solution::Infinite { particular, .. }) => particular,
        _ => unreachable!("basis matrix of a feasible basis is nonsingular"),
    };
    let mut multipliers = vec![Rational::zero(); m];
    for (k, &i) in kept.iter().enumerate() {
        multipliers[i] = if flipped[i] {
            -pi_kept[k].clone()
        } else {
            pi_kept[k].clone()
        };
    }
    StandardOutcome::Optimal { value, multipliers }
}

fn matrix(s: &InequalitySystem) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let a = s.rows().iter().map(|r| r.coeffs.clone()).collect();
    let b = s.rows().iter().map(|r| r.bound.clone()).collect();
    (a, b)
}

/// A point satisfying every row, or `None` if the system is infeasible.
pub fn feasible_point(s: &InequalitySystem) -> Option<RationalVector> {
    let d = s.dim();
    if s.is_empty() {
        return Some(vec![Rational::zero(); d]);
    }
    let (a, b) = matrix(s);
    let r = a.len();
    // min b.y  s.t.  A^T y = 0, 1.y + slack = 1  ==  max t s.t. A x + t <= b, t <= 0
    let mut rows: Vec<Vec<Rational>> = (0..d)
        .map(|k| {
            let mut row: Vec<Rational> = a.iter().map(|ai| ai[k].clone()).collect();
            row.push(Rational::zero());
            row
        })
        .collect();
    rows.push(vec![Rational::one(); r + 1]);
    let mut rhs = vec![Rational::zero(); d];
    rhs.push(Rational::one());
    let mut cost = b;
    cost.push(Rational::zero());
    match solve_standard(&StandardForm { a: rows, rhs, cost }) {
        StandardOutcome::Optimal { value, multipliers } => {
            if value.is_negative() {
                None
            } else {
                Some(multipliers[..d].to_vec())
            }
        }
        _ => unreachable!("the feasibility problem is feasible and bounded"),
    }
}

pub fn is_feasible(s: &InequalitySystem) -> bool {
    feasible_point(s).is_some()
}

pub fn lp_max(s: &InequalitySystem, objective: &[Rational]) -> Result<LpOutcome> {
    let d = s.dim();
    if objective.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: objective.len(),
        });
    }
    let Some(start) = feasible_point(s) else {
        return Ok(LpOutcome::Infeasible);
    };
    if s.is_empty() {
        return Ok(if objective.iter().all(Zero::is_zero) {
            LpOutcome::Optimum {
                value: Rational::zero(),
                witness: start,
            }
        } else {
            LpOutcome::Unbounded
        });
    }
    let (a, b) = matrix(s);
    let rows: Vec<Vec<Rational>> = (0..d)
        .map(|k| a.iter().map(|ai| ai[k].clone()).collect())
        .collect();
    let lp = StandardForm {
        a: rows,
        rhs: objective.to_vec(),
        cost: b,
    };
    Ok(match solve_standard(&lp) {
        StandardOutcome::Optimal { value, multipliers } => LpOutcome::Optimum {
            value,
            witness: multipliers,
        },
        StandardOutcome::Infeasible => LpOutcome::Unbounded,
        StandardOutcome::Unbounded => unreachable!("dual of a feasible problem is bounded"),
    })
}

/// Whether row `index` is implied by the remaining rows.
pub fn is_redundant(s: &InequalitySystem, index: usize) -> Result<bool> {
    let Some(row) = s.rows().get(index) else {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: index,
        });
    };
    let rest = s.without_row(index);
    Ok(match lp_max(&rest, &row.coeffs)? {
        LpOutcome::Infeasible => true,
        LpOutcome::Unbounded => false,
        LpOutcome::Optimum { value, .. } => value <= row.bound,
    })
}

/// Indices of rows kept by a sequential redundancy sweep in row order.
///
/// Rows that are irredundant against the full system are irredundant
/// against every subsystem, so they are settled in parallel first; only the
/// remaining candidates go through the order-dependent sequential pass.
pub fn irredundant_rows(s: &InequalitySystem) -> Result<Vec<usize>> {
    let n = s.len();
    let candidate: Vec<bool> = (0..n)
        .into_par_iter()
        .map(|i| is_redundant(s, i))
        .collect::<Result<_>>()?;
    let mut alive = vec![true; n];
    for i in 0..n {
        if !candidate[i] {
            continue;
        }
        let sub = InequalitySystem::new(
            s.dim(),
            (0..n)
                .filter(|&k| alive[k] && k != i)
                .map(|k| s.rows()[k].clone())
                .collect(),
        )?;
        let row = &s.rows()[i];
        let implied = match lp_max(&sub, &row.coeffs)? {
            LpOutcome::Infeasible => true,
            LpOutcome::Unbounded => false,
            LpOutcome::Optimum { value, .. } => value <= row.bound,
        };
        if implied {
            alive[i] = false;
        }
    }
    Ok((0..n).filter(|&i| alive[i]).collect())
}
