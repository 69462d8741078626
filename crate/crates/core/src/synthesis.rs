//! Open-loop input synthesis for herdable pairs.
//!
//! For `x(t+1) = A x(t) + B u(t)` the state after `n` steps is
//! `A^n x0 + R u` with `R` the controllability matrix and `u` the stacked
//! inputs in reverse time order. A primal certificate `R c >= 1` scaled by
//! a large enough `alpha` therefore lifts every coordinate above `h`.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{HerdError, Result};
use crate::positivity::{direct_verdict, HerdabilityVerdict};
use crate::rational::{max_of, serialize_rational, serialize_rational_rows, serialize_rationals, Rational};
use crate::system::{controllability_matrix, SystemPair};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HerdingPlan {
    /// Number of steps, always `n`.
    pub horizon: usize,
    /// `inputs[t]` is `u(t)`, of length `m`.
    #[serde(serialize_with = "serialize_rational_rows")]
    pub inputs: Vec<Vec<Rational>>,
    #[serde(serialize_with = "serialize_rational")]
    pub threshold: Rational,
    /// Scale applied to the certificate.
    #[serde(serialize_with = "serialize_rational")]
    pub alpha: Rational,
    #[serde(serialize_with = "serialize_rationals")]
    pub predicted_final_state: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Synthesis {
    Plan(HerdingPlan),
    /// The pair is not herdable; the verdict carries the dual certificate.
    NotHerdable(HerdabilityVerdict),
}

/// Runs the dynamics and returns `x(0), ..., x(T)`.
pub fn simulate(pair: &SystemPair, x0: &[Rational], inputs: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    if x0.len() != pair.n() {
        return Err(HerdError::DimensionMismatch(format!(
            "x0 has length {}, expected {}",
            x0.len(),
            pair.n()
        )));
    }
    let mut states = Vec::with_capacity(inputs.len() + 1);
    states.push(x0.to_vec());
    for (t, u) in inputs.iter().enumerate() {
        if u.len() != pair.m() {
            return Err(HerdError::DimensionMismatch(format!(
                "u({t}) has length {}, expected {}",
                u.len(),
                pair.m()
            )));
        }
        let drift = pair.a().mul_vec(states.last().expect("nonempty"))?;
        let push = pair.b().mul_vec(u)?;
        states.push(drift.into_iter().zip(push).map(|(a, b)| a + b).collect());
    }
    Ok(states)
}

/// Inputs driving `x0` to a state with every coordinate at least `h` in
/// exactly `n` steps, or the non-herdability verdict.
pub fn herding_input(pair: &SystemPair, x0: &[Rational], h: &Rational) -> Result<Synthesis> {
    if !h.is_positive() {
        return Err(HerdError::InvalidInput(format!("threshold must be positive, got {h}")));
    }
    let (n, m) = (pair.n(), pair.m());
    if x0.len() != n {
        return Err(HerdError::DimensionMismatch(format!(
            "x0 has length {}, expected {n}",
            x0.len()
        )));
    }
    let verdict = direct_verdict(pair);
    let Some(c) = verdict.primal_certificate() else {
        return Ok(Synthesis::NotHerdable(verdict));
    };
    let r = controllability_matrix(pair);
    let p = r.mul_vec(c)?;

    let free = simulate(pair, x0, &vec![vec![Rational::zero(); m]; n])?
        .pop()
        .expect("horizon states");
    let needed: Vec<Rational> = free
        .iter()
        .zip(&p)
        .map(|(f, pi)| (h - f) / pi)
        .collect();
    let alpha = max_of(&needed)
        .filter(|v| v.is_positive())
        .cloned()
        .unwrap_or_else(Rational::zero);

    let inputs: Vec<Vec<Rational>> = (0..n)
        .map(|t| {
            let block = n - 1 - t;
            c[block * m..(block + 1) * m]
                .iter()
                .map(|v| &alpha * v)
                .collect()
        })
        .collect();
    let final_state = simulate(pair, x0, &inputs)?.pop().expect("horizon states");
    if final_state.iter().any(|v| v < h) {
        return Err(HerdError::Internal(
            "synthesised inputs miss the threshold".into(),
        ));
    }
    Ok(Synthesis::Plan(HerdingPlan {
        horizon: n,
        inputs,
        threshold: h.clone(),
        alpha,
        predicted_final_state: final_state,
    }))
}
