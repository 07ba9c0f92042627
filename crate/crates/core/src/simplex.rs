//! Dense exact simplex for `max c·x  s.t.  A x <= b, x >= 0` with `b >= 0`.
//!
//! The origin is the starting basis, so no phase one is needed. Pivots follow
//! Bland's rule, which rules out cycling on degenerate vertices.

use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("right-hand side {row} is negative; the origin is not feasible")]
    NegativeRhs { row: usize },
    #[error("objective is unbounded")]
    Unbounded,
    #[error("row {row} has {got} coefficients, expected {expected}")]
    Shape {
        row: usize,
        got: usize,
        expected: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub optimum: Rational,
    pub x: Vec<Rational>,
    pub pivots: usize,
}

pub fn maximize(
    objective: &[Rational],
    rows: &[Vec<Rational>],
    rhs: &[Rational],
) -> Result<LpSolution, LpError> {
    let n = objective.len();
    let m = rows.len();
    assert_eq!(m, rhs.len(), "one right-hand side per row");
    for (row, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(LpError::Shape {
                row,
                got: r.len(),
                expected: n,
            });
        }
    }
    if let Some(row) = rhs.iter().position(Rational::is_negative) {
        return Err(LpError::NegativeRhs { row });
    }

    let width = n + m;
    let mut tab: Vec<Vec<Rational>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut t = r.clone();
            t.resize(width, Rational::ZERO);
            t[n + i] = Rational::ONE;
            t
        })
        .collect();
    let mut b: Vec<Rational> = rhs.to_vec();
    let mut reduced: Vec<Rational> = objective.iter().map(|&c| -c).collect();
    reduced.resize(width, Rational::ZERO);
    let mut value = Rational::ZERO;
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut pivots = 0;

    while let Some(enter) = reduced.iter().position(Rational::is_negative) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            let coef = tab[i][enter];
            if !coef.is_positive() {
                continue;
            }
            let ratio = b[i] / coef;
            leave = match leave {
                None => Some((i, ratio)),
                Some((best, best_ratio)) => {
                    if ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[best]) {
                        Some((i, ratio))
                    } else {
                        Some((best, best_ratio))
                    }
                }
            };
        }
        let (row, _) = leave.ok_or(LpError::Unbounded)?;

        let piv = tab[row][enter];
        let inv = piv.recip();
        for v in tab[row].iter_mut() {
            *v = *v * inv;
        }
        b[row] = b[row] * inv;
        let pivot_row = tab[row].clone();
        let pivot_b = b[row];
        for i in 0..m {
            if i == row {
                continue;
            }
            let f = tab[i][enter];
            if f.is_zero() {
                continue;
            }
            for (v, &p) in tab[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= f * p;
                }
            }
            b[i] -= f * pivot_b;
        }
        let f = reduced[enter];
        for (v, &p) in reduced.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v -= f * p;
            }
        }
        value -= f * pivot_b;
        basis[row] = enter;
        pivots += 1;
    }

    let mut x = vec![Rational::ZERO; n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = b[i];
        }
    }
    Ok(LpSolution {
        optimum: value,
        x,
        pivots,
    })
}
