//! Does the column space of a matrix contain a strictly positive vector?
//!
//! Every decision comes with a certificate that can be re-checked by exact
//! arithmetic alone:
//!
//! * primal: a coefficient vector `u` with `M u >= 1` entrywise;
//! * dual: a vector `y >= 0`, `y != 0`, with `yᵀ M = 0`.
//!
//! Exactly one of the two exists (Gordan's alternative).

mod simplex;

use std::ops::Range;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{HerdError, Result};
use crate::matrix::RationalMatrix;
use crate::rational::{max_of, serialize_rationals, Rational, Sign};
use crate::system::{controllability_matrix, SystemPair};

pub const DIRECT_METHOD: &str = "direct-feasibility";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "vector", rename_all = "lowercase")]
pub enum Certificate {
    Primal(#[serde(serialize_with = "serialize_rationals")] Vec<Rational>),
    Dual(#[serde(serialize_with = "serialize_rationals")] Vec<Rational>),
}

/// A herdability decision and the certificate backing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HerdabilityVerdict {
    pub herdable: bool,
    pub certificate: Certificate,
    /// Name of the procedure that produced the decision.
    pub method: String,
}

impl HerdabilityVerdict {
    pub fn primal(u: Vec<Rational>, method: impl Into<String>) -> Self {
        Self {
            herdable: true,
            certificate: Certificate::Primal(u),
            method: method.into(),
        }
    }

    pub fn dual(y: Vec<Rational>, method: impl Into<String>) -> Self {
        Self {
            herdable: false,
            certificate: Certificate::Dual(y),
            method: method.into(),
        }
    }

    pub fn primal_certificate(&self) -> Option<&[Rational]> {
        match &self.certificate {
            Certificate::Primal(u) => Some(u),
            Certificate::Dual(_) => None,
        }
    }

    pub fn dual_certificate(&self) -> Option<&[Rational]> {
        match &self.certificate {
            Certificate::Dual(y) => Some(y),
            Certificate::Primal(_) => None,
        }
    }

    /// Re-checks the certificate against `m` (the controllability matrix the
    /// verdict is about).
    pub fn verify(&self, m: &RationalMatrix) -> bool {
        match &self.certificate {
            Certificate::Primal(u) => self.herdable && verify_primal(m, u),
            Certificate::Dual(y) => !self.herdable && verify_dual(m, y),
        }
    }
}

/// `M u >= 1` entrywise.
pub fn verify_primal(m: &RationalMatrix, u: &[Rational]) -> bool {
    m.mul_vec(u)
        .map(|p| p.iter().all(|v| *v >= Rational::one()))
        .unwrap_or(false)
}

/// `y >= 0`, `y != 0` and `yᵀ M = 0`.
pub fn verify_dual(m: &RationalMatrix, y: &[Rational]) -> bool {
    y.iter().all(|v| !v.is_negative())
        && y.iter().any(|v| !v.is_zero())
        && m.left_mul_vec(y)
            .map(|row| row.iter().all(Zero::is_zero))
            .unwrap_or(false)
}

/// Decides whether `Im(M)` contains a strictly positive vector.
///
/// The search runs on a column basis of `M` (same image, smaller program);
/// the primal certificate is expanded back to all columns of `M`.
pub fn strictly_positive_in_image(m: &RationalMatrix) -> HerdabilityVerdict {
    if m.rows() == 0 {
        return HerdabilityVerdict::primal(vec![Rational::zero(); m.cols()], DIRECT_METHOD);
    }
    let basis = m.pivot_columns();
    let reduced = m.select_columns(&basis);
    let verdict = match simplex::solve(&reduced) {
        simplex::Alternative::Primal(u) => {
            let mut full = vec![Rational::zero(); m.cols()];
            for (&j, v) in basis.iter().zip(u) {
                full[j] = v;
            }
            HerdabilityVerdict::primal(full, DIRECT_METHOD)
        }
        simplex::Alternative::Dual(y) => HerdabilityVerdict::dual(y, DIRECT_METHOD),
    };
    assert!(
        verdict.verify(m),
        "feasibility certificate failed exact re-verification"
    );
    verdict
}

/// Direct decision on the controllability matrix of `pair`.
pub fn direct_verdict(pair: &SystemPair) -> HerdabilityVerdict {
    strictly_positive_in_image(&controllability_matrix(pair))
}

/// Nonzero with all nonzero entries of one sign.
pub fn is_unisigned(v: &[Rational]) -> bool {
    unisigned_sign(v).is_some()
}

/// Common sign of the nonzero entries, if `v` is unisigned.
pub fn unisigned_sign(v: &[Rational]) -> Option<Sign> {
    let mut signs = v.iter().filter_map(Sign::of);
    let first = signs.next()?;
    signs.all(|s| s == first).then_some(first)
}

/// Sufficient test: combine every unisigned column, each scaled by its sign
/// and the reciprocal of its smallest nonzero magnitude. If those columns
/// jointly cover every row the combination is `>= 1` entrywise.
pub fn unisigned_cover_check(m: &RationalMatrix) -> Option<Vec<Rational>> {
    let mut u = vec![Rational::zero(); m.cols()];
    let mut covered = vec![false; m.rows()];
    for (j, coef) in u.iter_mut().enumerate() {
        let col = m.column(j);
        let Some(sign) = unisigned_sign(&col) else {
            continue;
        };
        let smallest = col
            .iter()
            .filter(|v| !v.is_zero())
            .map(Signed::abs)
            .min()
            .expect("unisigned column has a nonzero entry");
        *coef = sign.unit() / smallest;
        for (c, v) in covered.iter_mut().zip(&col) {
            *c |= !v.is_zero();
        }
    }
    covered.iter().all(|&c| c).then_some(u)
}

/// Block upper-triangular sufficiency test.
///
/// `row_blocks` and `col_blocks` must tile `M` with the same number of
/// nonempty contiguous ranges and every block below the diagonal must be
/// zero. If each diagonal block has a strictly positive vector in its image,
/// a `u` with `M u >= 1` is assembled from the last block upwards, scaling
/// each block's own certificate enough to dominate the contribution of the
/// blocks to its right.
pub fn block_triangular_positive(
    m: &RationalMatrix,
    row_blocks: &[Range<usize>],
    col_blocks: &[Range<usize>],
) -> Result<Option<Vec<Rational>>> {
    check_tiling(row_blocks, m.rows(), "row")?;
    check_tiling(col_blocks, m.cols(), "column")?;
    if row_blocks.len() != col_blocks.len() {
        return Err(HerdError::InvalidInput(format!(
            "{} row blocks but {} column blocks",
            row_blocks.len(),
            col_blocks.len()
        )));
    }
    for (p, rows) in row_blocks.iter().enumerate() {
        for cols in &col_blocks[..p] {
            if !m.block(rows.clone(), cols.clone()).is_zero() {
                return Err(HerdError::InvalidInput(format!(
                    "block ({p}, ..) below the diagonal is nonzero"
                )));
            }
        }
    }

    let mut u = vec![Rational::zero(); m.cols()];
    for (rows, cols) in row_blocks.iter().zip(col_blocks).rev() {
        let diag = m.block(rows.clone(), cols.clone());
        let verdict = strictly_positive_in_image(&diag);
        let Some(local) = verdict.primal_certificate() else {
            return Ok(None);
        };
        // Contribution of the already fixed blocks to these rows.
        let offset: Vec<Rational> = rows
            .clone()
            .map(|i| {
                (cols.end..m.cols()).fold(Rational::zero(), |acc, j| acc + m.get(i, j) * &u[j])
            })
            .collect();
        let p = diag.mul_vec(local)?;
        let needed: Vec<Rational> = offset
            .iter()
            .zip(&p)
            .map(|(o, pi)| (Rational::one() - o) / pi)
            .collect();
        let one = Rational::one();
        let scale = max_of(needed.iter().chain(std::iter::once(&one)))
            .expect("nonempty")
            .clone();
        for (j, v) in cols.clone().zip(local) {
            u[j] = v * &scale;
        }
    }
    Ok(Some(u))
}

fn check_tiling(blocks: &[Range<usize>], len: usize, what: &str) -> Result<()> {
    let mut next = 0;
    for b in blocks {
        if b.start != next || b.end <= b.start {
            return Err(HerdError::InvalidInput(format!(
                "{what} partition does not tile 0..{len} with nonempty ranges"
            )));
        }
        next = b.end;
    }
    if next != len {
        return Err(HerdError::InvalidInput(format!(
            "{what} partition covers 0..{next}, expected 0..{len}"
        )));
    }
    Ok(())
}
