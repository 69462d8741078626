//! Minimal leader sets.
//!
//! Adding a leader only enlarges the controllability image, so herdability
//! is monotone in the leader set. The search enumerates candidate sets by
//! size and skips supersets of sets already found to be herdable.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HerdError, Result};
use crate::matrix::RationalMatrix;
use crate::positivity::{direct_verdict, HerdabilityVerdict};
use crate::system::SystemPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesignOptions {
    /// Skip supersets of herdable sets.
    pub prune: bool,
    /// Evaluate pruned sets anyway and fail if one is not herdable.
    pub verify_prunes: bool,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self {
            prune: true,
            verify_prunes: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeaderSet {
    pub leaders: Vec<usize>,
    pub verdict: HerdabilityVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DesignResult {
    /// Ordered by size, then lexicographically.
    pub minimal_sets: Vec<LeaderSet>,
    /// Number of candidate sets whose herdability was computed.
    pub explored: usize,
    pub budget: usize,
}

pub fn herdable_with_leaders(a: &RationalMatrix, leaders: &[usize]) -> Result<HerdabilityVerdict> {
    if leaders.is_empty() {
        return Err(HerdError::InvalidInput("leader set is empty".into()));
    }
    let pair = SystemPair::with_leaders(a.clone(), leaders)?;
    Ok(direct_verdict(&pair))
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (0..k).rev().find(|&i| current[i] < n - k + i) else {
            return out;
        };
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

fn is_subset(small: &[usize], large: &[usize]) -> bool {
    small.iter().all(|v| large.binary_search(v).is_ok())
}

pub fn minimal_herdable_leader_sets(a: &RationalMatrix, max_size: usize) -> Result<DesignResult> {
    minimal_herdable_leader_sets_with(a, max_size, DesignOptions::default())
}

/// Inclusion-minimal herdable leader sets of size at most `max_size`.
pub fn minimal_herdable_leader_sets_with(
    a: &RationalMatrix,
    max_size: usize,
    options: DesignOptions,
) -> Result<DesignResult> {
    if !a.is_square() {
        return Err(HerdError::DimensionMismatch(format!(
            "A is {}x{}, expected square",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut herdable_sets: Vec<Vec<usize>> = Vec::new();
    let mut minimal_sets = Vec::new();
    let mut explored = 0;

    for size in 1..=max_size.min(n) {
        let candidates = combinations(n, size);
        let (pruned, open): (Vec<_>, Vec<_>) = candidates.into_iter().partition(|c| {
            options.prune && minimal_sets.iter().any(|s: &LeaderSet| is_subset(&s.leaders, c))
        });
        if options.verify_prunes {
            explored += pruned.len();
            let broken = pruned
                .par_iter()
                .map(|c| herdable_with_leaders(a, c).map(|v| (!v.herdable).then(|| c.clone())))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .next();
            if let Some(c) = broken {
                return Err(HerdError::Internal(format!(
                    "leader set {c:?} contains a herdable set but is not herdable"
                )));
            }
        }
        explored += open.len();
        let verdicts = open
            .par_iter()
            .map(|c| herdable_with_leaders(a, c))
            .collect::<Result<Vec<_>>>()?;
        for (leaders, verdict) in open.into_iter().zip(verdicts) {
            if !verdict.herdable {
                continue;
            }
            if !herdable_sets.iter().any(|s| is_subset(s, &leaders)) {
                minimal_sets.push(LeaderSet {
                    leaders: leaders.clone(),
                    verdict,
                });
            }
            herdable_sets.push(leaders);
        }
    }
    Ok(DesignResult {
        minimal_sets,
        explored,
        budget: max_size,
    })
}
