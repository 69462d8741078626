//! Verdict-preserving transformations of a pair.
//!
//! * input normalisation: `(A, B) -> (P A Pᵀ, P B T)` with `T` nonsingular and
//!   `P` a permutation, bringing `B` to the selection form `[I; 0]`;
//! * leader-block reduction: with `B = [B1; 0]`, `B1` of full row rank `r`,
//!   the pair is herdable iff `(A22, A21)` is, where the blocks come from
//!   splitting `A` at `r`;
//! * the closed-form decision for diagonal `A` with a zero-free input column.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{HerdError, Result};
use crate::matrix::RationalMatrix;
use crate::positivity::{direct_verdict, HerdabilityVerdict};
use crate::rational::{max_of, Rational, Sign};
use crate::system::{controllability_matrix, SystemPair};

pub const DIAGONAL_METHOD: &str = "diagonal-vandermonde";
pub const EMPTY_REDUCTION_METHOD: &str = "empty-reduction";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Transform {
    /// `B <- P B T`, keeping the first `kept_columns` columns.
    InputChange {
        #[serde(serialize_with = "serialize_matrix")]
        t: RationalMatrix,
        /// `permutation[new] = old` row/column index.
        permutation: Vec<usize>,
        kept_columns: usize,
    },
    /// Split at `leaders`; the state of the first block acts as input.
    LeaderSplit { leader_count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionStep {
    pub name: String,
    /// `(n, m)` before and after.
    pub input_shape: (usize, usize),
    pub output_shape: (usize, usize),
    pub transform: Transform,
}

/// Ordered log of the reductions applied to a pair.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
}

/// Result of a leader-block reduction: either a smaller pair, or nothing
/// left once every state is directly actuated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReducedPair {
    Pair(SystemPair),
    Empty,
}

impl ReducedPair {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            ReducedPair::Pair(p) => (p.n(), p.m()),
            ReducedPair::Empty => (0, 0),
        }
    }

    /// Direct verdict; the empty pair is herdable.
    pub fn verdict(&self) -> HerdabilityVerdict {
        match self {
            ReducedPair::Pair(p) => direct_verdict(p),
            ReducedPair::Empty => HerdabilityVerdict::primal(Vec::new(), EMPTY_REDUCTION_METHOD),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedInput {
    pub pair: SystemPair,
    pub transform: RationalMatrix,
    pub permutation: Vec<usize>,
}

impl NormalizedInput {
    pub fn step(&self, original: &SystemPair) -> ReductionStep {
        ReductionStep {
            name: "normalize-input".into(),
            input_shape: (original.n(), original.m()),
            output_shape: (self.pair.n(), self.pair.m()),
            transform: Transform::InputChange {
                t: self.transform.clone(),
                permutation: self.permutation.clone(),
                kept_columns: self.pair.m(),
            },
        }
    }
}

/// Brings `B` to the selection form `[I_r; 0]`, where `r` is the number of
/// nonzero rows of `B`.
///
/// Leader rows move to the top in ascending order. `T` is built from the
/// lowest-index set of independent columns of the nonzero row block `B1`,
/// so that `B1 T = [I_r 0]`; the trailing zero columns of `B T` are dropped.
pub fn normalize_input(pair: &SystemPair) -> Result<NormalizedInput> {
    let n = pair.n();
    let m = pair.m();
    let b = pair.b();
    let nonzero: Vec<usize> = (0..n)
        .filter(|&i| b.row(i).iter().any(|v| !v.is_zero()))
        .collect();
    let r = nonzero.len();
    if r == 0 {
        return Err(HerdError::NotNormalizable("B is zero".into()));
    }
    let all_cols: Vec<usize> = (0..m).collect();
    let b1 = b.select(&nonzero, &all_cols);
    let pivots = b1.pivot_columns();
    if pivots.len() != r {
        return Err(HerdError::NotNormalizable(format!(
            "the {r} nonzero rows of B have rank {}",
            pivots.len()
        )));
    }
    let others: Vec<usize> = all_cols.iter().copied().filter(|j| !pivots.contains(j)).collect();
    let c_inv = b1.select_columns(&pivots).inverse()?;
    let d = b1.select_columns(&others);
    let c_inv_d = c_inv.mul(&d)?;

    // T in the reordered column basis (pivots first), then mapped back.
    let order: Vec<usize> = pivots.iter().chain(&others).copied().collect();
    let mut t = RationalMatrix::zeros(m, m);
    for (k, &row) in order.iter().enumerate() {
        for l in 0..m {
            let v = match (k < r, l < r) {
                (true, true) => c_inv.get(k, l).clone(),
                (true, false) => -c_inv_d.get(k, l - r).clone(),
                (false, false) if k == l => Rational::one(),
                _ => Rational::zero(),
            };
            t.set(row, l, v);
        }
    }

    let permutation: Vec<usize> = nonzero
        .iter()
        .copied()
        .chain((0..n).filter(|i| !nonzero.contains(i)))
        .collect();
    let a = pair.a().select(&permutation, &permutation);
    let bt = b.mul(&t)?.select(&permutation, &all_cols);
    let expected = RationalMatrix::hstack(&[
        crate::system::selection_matrix(n, &(0..r).collect::<Vec<_>>()),
        RationalMatrix::zeros(n, m - r),
    ])?;
    if bt != expected {
        return Err(HerdError::Internal(format!(
            "input transform did not reach selection form: {bt}"
        )));
    }
    let kept: Vec<usize> = (0..r).collect();
    Ok(NormalizedInput {
        pair: SystemPair::new(a, bt.select_columns(&kept))?,
        transform: t,
        permutation,
    })
}

/// Number of leading rows of `B` that carry input, checked to be of full row
/// rank with all remaining rows zero.
fn leader_block_size(b: &RationalMatrix) -> Result<usize> {
    let r = (0..b.rows())
        .rev()
        .find(|&i| b.row(i).iter().any(|v| !v.is_zero()))
        .map(|i| i + 1)
        .ok_or_else(|| HerdError::Precondition("B is zero".into()))?;
    let b1 = b.block(0..r, 0..b.cols());
    if b1.rank() != r {
        return Err(HerdError::Precondition(format!(
            "the leading {r} rows of B are not of full row rank"
        )));
    }
    Ok(r)
}

/// `(A, [B1; 0]) -> (A22, A21)`.
pub fn leader_block_reduction(pair: &SystemPair) -> Result<ReducedPair> {
    let n = pair.n();
    let r = leader_block_size(pair.b())?;
    if r == n {
        return Ok(ReducedPair::Empty);
    }
    let a22 = pair.a().block(r..n, r..n);
    let a21 = pair.a().block(r..n, 0..r);
    Ok(ReducedPair::Pair(SystemPair::new(a22, a21)?))
}

/// Normalises the input and then splits off the leader block, recording
/// both steps.
pub fn reduce(pair: &SystemPair) -> Result<(ReducedPair, ReductionTrace)> {
    let normalized = normalize_input(pair)?;
    let mut trace = ReductionTrace::default();
    trace.steps.push(normalized.step(pair));
    let reduced = leader_block_reduction(&normalized.pair)?;
    trace.steps.push(ReductionStep {
        name: "leader-block-split".into(),
        input_shape: (normalized.pair.n(), normalized.pair.m()),
        output_shape: reduced.shape(),
        transform: Transform::LeaderSplit {
            leader_count: normalized.pair.m(),
        },
    });
    Ok((reduced, trace))
}

impl ReductionTrace {
    /// Re-applies every recorded step to `original`.
    pub fn replay(&self, original: &SystemPair) -> Result<ReducedPair> {
        let mut current = ReducedPair::Pair(original.clone());
        for step in &self.steps {
            let ReducedPair::Pair(pair) = &current else {
                return Err(HerdError::InvalidInput(format!(
                    "step `{}` applied to an empty pair",
                    step.name
                )));
            };
            current = match &step.transform {
                Transform::InputChange {
                    t,
                    permutation,
                    kept_columns,
                } => {
                    let cols: Vec<usize> = (0..pair.m()).collect();
                    let a = pair.a().select(permutation, permutation);
                    let b = pair.b().mul(t)?.select(permutation, &cols);
                    let kept: Vec<usize> = (0..*kept_columns).collect();
                    ReducedPair::Pair(SystemPair::new(a, b.select_columns(&kept))?)
                }
                Transform::LeaderSplit { leader_count } => {
                    let n = pair.n();
                    let r = *leader_count;
                    if r == n {
                        ReducedPair::Empty
                    } else {
                        ReducedPair::Pair(SystemPair::new(
                            pair.a().block(r..n, r..n),
                            pair.a().block(r..n, 0..r),
                        )?)
                    }
                }
            };
        }
        Ok(current)
    }
}

/// Closed-form decision for `(diag(lambda), gamma)` with `gamma` zero-free:
/// herdable iff equal eigenvalues always carry same-sign input entries.
///
/// Certificates refer to the controllability matrix of the pair. A primal
/// certificate solves the square Vandermonde system on the distinct
/// eigenvalues so that each eigenvalue group receives a same-sign
/// coefficient large enough to lift all its entries to at least 1. A dual
/// certificate is `gamma_j e_i - gamma_i e_j` for the first conflicting
/// pair, sign-normalised to be nonnegative.
pub fn diagonal_pair_herdability(
    lambda: &RationalMatrix,
    gamma: &[Rational],
) -> Result<HerdabilityVerdict> {
    if !lambda.is_diagonal() {
        return Err(HerdError::Precondition("Lambda is not diagonal".into()));
    }
    let n = lambda.rows();
    if gamma.len() != n {
        return Err(HerdError::DimensionMismatch(format!(
            "Lambda is {n}x{n} but Gamma has {} entries",
            gamma.len()
        )));
    }
    if let Some(i) = gamma.iter().position(Zero::is_zero) {
        return Err(HerdError::Precondition(format!("Gamma has a zero entry at {i}")));
    }
    let eig: Vec<&Rational> = (0..n).map(|i| lambda.get(i, i)).collect();

    for i in 0..n {
        for j in i + 1..n {
            if eig[i] == eig[j] && (&gamma[i] * &gamma[j]).is_negative() {
                let mut w = vec![Rational::zero(); n];
                w[i] = gamma[j].clone();
                w[j] = -gamma[i].clone();
                if w[i].is_negative() {
                    w[i] = -w[i].clone();
                    w[j] = -w[j].clone();
                }
                return Ok(HerdabilityVerdict::dual(w, DIAGONAL_METHOD));
            }
        }
    }

    // Distinct eigenvalues in order of first appearance, with their groups.
    let mut distinct: Vec<&Rational> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, e) in eig.iter().enumerate() {
        match distinct.iter().position(|d| d == e) {
            Some(h) => groups[h].push(i),
            None => {
                distinct.push(e);
                groups.push(vec![i]);
            }
        }
    }
    let s = distinct.len();
    let targets: Vec<Rational> = groups
        .iter()
        .map(|g| {
            let sign = Sign::of(&gamma[g[0]]).expect("gamma is zero-free");
            let recips: Vec<Rational> = g.iter().map(|&i| gamma[i].abs().recip()).collect();
            sign.unit() * max_of(&recips).expect("groups are nonempty")
        })
        .collect();
    let mut vandermonde = RationalMatrix::zeros(s, s);
    for (h, d) in distinct.iter().enumerate() {
        let mut power = Rational::one();
        for k in 0..s {
            vandermonde.set(h, k, power.clone());
            power *= *d;
        }
    }
    let mut u = vandermonde.solve(&targets)?;
    u.resize(n, Rational::zero());

    let verdict = HerdabilityVerdict::primal(u, DIAGONAL_METHOD);
    let pair = SystemPair::new(lambda.clone(), RationalMatrix::column_vector(gamma))?;
    if !verdict.verify(&controllability_matrix(&pair)) {
        return Err(HerdError::Internal(
            "diagonal-pair certificate failed re-verification".into(),
        ));
    }
    Ok(verdict)
}

fn serialize_matrix<S: serde::Serializer>(
    m: &RationalMatrix,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    use crate::rational::format_vector;
    serializer.collect_seq((0..m.rows()).map(|i| format_vector(m.row(i))))
}
