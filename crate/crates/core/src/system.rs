//! Linear time-invariant pairs `(A, B)` and their controllability matrices.

use num_traits::{One, Zero};

use crate::error::{HerdError, Result};
use crate::matrix::RationalMatrix;

/// A state matrix `A` (n x n) with an input matrix `B` (n x m).
///
/// `leaders` is present exactly when `B` is a selection matrix, i.e. its
/// columns are distinct canonical vectors. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemPair {
    a: RationalMatrix,
    b: RationalMatrix,
    leaders: Option<Vec<usize>>,
}

impl SystemPair {
    pub fn new(a: RationalMatrix, b: RationalMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(HerdError::DimensionMismatch(format!(
                "A must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if b.rows() != a.rows() {
            return Err(HerdError::DimensionMismatch(format!(
                "B has {} rows but A is {}x{}",
                b.rows(),
                a.rows(),
                a.cols()
            )));
        }
        if b.cols() == 0 {
            return Err(HerdError::InvalidInput("B must have at least one column".into()));
        }
        let leaders = selection_rows(&b);
        Ok(Self { a, b, leaders })
    }

    /// Pair whose `B` selects the given (0-based) leader nodes, one column per
    /// leader in ascending index order.
    pub fn with_leaders(a: RationalMatrix, leaders: &[usize]) -> Result<Self> {
        let n = a.rows();
        let mut sorted = leaders.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() {
            return Err(HerdError::InvalidInput("leader set is empty".into()));
        }
        if sorted.len() != leaders.len() {
            return Err(HerdError::InvalidInput("leader set has duplicates".into()));
        }
        if let Some(&bad) = sorted.iter().find(|&&l| l >= n) {
            return Err(HerdError::InvalidInput(format!(
                "leader {bad} out of range for {n} nodes"
            )));
        }
        Self::new(a, selection_matrix(n, &sorted))
    }

    pub fn a(&self) -> &RationalMatrix {
        &self.a
    }

    pub fn b(&self) -> &RationalMatrix {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }

    /// Sorted leader indices, if `B` is a selection matrix.
    pub fn leaders(&self) -> Option<&[usize]> {
        self.leaders.as_deref()
    }
}

/// `n x |leaders|` selection matrix with column `k` equal to `e_{leaders[k]}`.
pub fn selection_matrix(n: usize, leaders: &[usize]) -> RationalMatrix {
    let mut b = RationalMatrix::zeros(n, leaders.len());
    for (k, &l) in leaders.iter().enumerate() {
        b.set(l, k, num_traits::One::one());
    }
    b
}

/// Rows hit by the columns of `b` when every column is a distinct canonical
/// vector; `None` otherwise.
fn selection_rows(b: &RationalMatrix) -> Option<Vec<usize>> {
    let mut rows = Vec::with_capacity(b.cols());
    for j in 0..b.cols() {
        let col = b.column(j);
        let mut nonzero = col.iter().enumerate().filter(|(_, v)| !v.is_zero());
        let (i, v) = nonzero.next()?;
        if nonzero.next().is_some() || !v.is_one() {
            return None;
        }
        rows.push(i);
    }
    rows.sort_unstable();
    let before = rows.len();
    rows.dedup();
    (rows.len() == before).then_some(rows)
}

/// `A^k B` by repeated multiplication.
pub fn matrix_power_column(
    a: &RationalMatrix,
    b: &RationalMatrix,
    k: usize,
) -> Result<RationalMatrix> {
    if !a.is_square() || a.cols() != b.rows() {
        return Err(HerdError::DimensionMismatch(format!(
            "A is {}x{}, B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut acc = b.clone();
    for _ in 0..k {
        acc = a.mul(&acc)?;
    }
    Ok(acc)
}

/// The controllability matrix `[B | AB | ... | A^{n-1} B]`.
pub fn controllability_matrix(pair: &SystemPair) -> RationalMatrix {
    power_blocks(pair.a(), pair.b(), pair.n())
        .and_then(|blocks| RationalMatrix::hstack(&blocks))
        .expect("SystemPair dimensions are validated at construction")
}

/// `[B, AB, ..., A^{count-1} B]`, each block built from the previous one.
pub fn power_blocks(
    a: &RationalMatrix,
    b: &RationalMatrix,
    count: usize,
) -> Result<Vec<RationalMatrix>> {
    if !a.is_square() || a.cols() != b.rows() {
        return Err(HerdError::DimensionMismatch(format!(
            "A is {}x{}, B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut blocks: Vec<RationalMatrix> = Vec::with_capacity(count);
    for k in 0..count {
        let next = match k {
            0 => b.clone(),
            _ => a.mul(&blocks[k - 1])?,
        };
        blocks.push(next);
    }
    Ok(blocks)
}
