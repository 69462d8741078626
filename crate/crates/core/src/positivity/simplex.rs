//! Phase-one simplex over exact rationals for the system `M u >= 1`.
//!
//! The free vector `u` is split as `u+ - u-`; each row gets a surplus and an
//! artificial variable:
//!
//! ```text
//!   M u+ - M u- - s + a = 1,   u+, u-, s, a >= 0,   minimise sum(a)
//! ```
//!
//! A zero optimum yields a primal point. A positive optimum yields the
//! optimal dual `y` of the phase-one problem, which satisfies `y >= 0`,
//! `yᵀ M = 0` and `1ᵀ y = optimum > 0`. Bland's rule guarantees termination.

use num_traits::{One, Signed, Zero};

use crate::matrix::RationalMatrix;
use crate::rational::Rational;

pub(crate) enum Alternative {
    /// `u` with `M u >= 1`.
    Primal(Vec<Rational>),
    /// `y >= 0`, `y != 0`, `yᵀ M = 0`.
    Dual(Vec<Rational>),
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Reduced phase-one costs.
    cost: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v /= &pivot;
        }
        self.rhs[row] /= &pivot;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.rows.len() {
            if i == row || self.rows[i][col].is_zero() {
                continue;
            }
            let factor = self.rows[i][col].clone();
            for (v, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        if !self.cost[col].is_zero() {
            let factor = self.cost[col].clone();
            for (v, p) in self.cost.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Runs Bland's rule to optimality.
    fn optimise(&mut self) {
        loop {
            let Some(enter) = self.cost.iter().position(Signed::is_negative) else {
                return;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let coef = &self.rows[i][enter];
                if !coef.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / coef;
                let better = match &leave {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[i] < self.basis[*best])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            // Phase one is bounded below by zero, so a leaving row always exists.
            let (row, _) = leave.expect("phase-one objective is bounded");
            self.pivot(row, enter);
        }
    }
}

pub(crate) fn solve(m: &RationalMatrix) -> Alternative {
    let r = m.rows();
    let c = m.cols();
    let width = 2 * c + 2 * r;
    let art = 2 * c + r;

    let mut rows = Vec::with_capacity(r);
    for i in 0..r {
        let mut row = vec![Rational::zero(); width];
        for j in 0..c {
            let v = m.get(i, j);
            row[j] = v.clone();
            row[c + j] = -v;
        }
        row[2 * c + i] = -Rational::one();
        row[art + i] = Rational::one();
        rows.push(row);
    }
    // Reduced cost of column j with all artificials basic: c_j - 1ᵀ A_j.
    let mut cost = vec![Rational::zero(); width];
    for (j, cj) in cost.iter_mut().enumerate().take(art) {
        *cj = -rows.iter().fold(Rational::zero(), |acc, row| acc + &row[j]);
    }
    let mut t = Tableau {
        rows,
        rhs: vec![Rational::one(); r],
        cost,
        basis: (art..art + r).collect(),
    };
    t.optimise();

    let objective = t
        .basis
        .iter()
        .zip(&t.rhs)
        .filter(|(&b, _)| b >= art)
        .fold(Rational::zero(), |acc, (_, v)| acc + v);

    if objective.is_zero() {
        let mut x = vec![Rational::zero(); width];
        for (&b, v) in t.basis.iter().zip(&t.rhs) {
            x[b] = v.clone();
        }
        Alternative::Primal((0..c).map(|j| &x[j] - &x[c + j]).collect())
    } else {
        // Reduced cost of artificial k is 1 - y_k.
        Alternative::Dual(
            (0..r)
                .map(|k| Rational::one() - &t.cost[art + k])
                .collect(),
        )
    }
}
