//! Graph-structural herdability criteria.
//!
//! Each check reports whether its hypotheses hold and, if so, the verdict
//! they imply. Sufficient criteria only ever imply "herdable"; the tree
//! criteria for depth one and two are exact characterisations.
//!
//! The direct feasibility check stays the ground truth: `run_all_criteria`
//! always computes it and flags any criterion that disagrees.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HerdError, Result};
use crate::graph::{
    clustering_balance, is_undirected_tree, layer_decomposition, structural_sides,
    ClusterPartition, Distance, SignedDigraph, TreeLayers,
};
use crate::matrix::RationalMatrix;
use crate::positivity::{direct_verdict, unisigned_sign, HerdabilityVerdict};
use crate::rational::{serialize_rationals, Rational, Sign};
use crate::reductions::{reduce, ReductionTrace};
use crate::system::SystemPair;

pub const CLUSTER_LEADERS: &str = "cluster-leaders";
pub const SPLIT_LEADERS: &str = "split-leaders";
pub const TREE_LAYER_SIGNS: &str = "tree-layer-signs";
pub const TREE_DEPTH1: &str = "tree-depth1";
pub const TREE_DEPTH2: &str = "tree-depth2";

/// Orientations tried for structurally balanced graphs whose negative-edge
/// skeleton falls apart into several pieces.
const MAX_FREE_PIECES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Sufficient,
    Iff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImpliedVerdict {
    Herdable,
    NotHerdable,
}

impl ImpliedVerdict {
    pub fn from_bool(herdable: bool) -> Self {
        if herdable {
            Self::Herdable
        } else {
            Self::NotHerdable
        }
    }

    pub fn is_herdable(self) -> bool {
        self == Self::Herdable
    }
}

/// Sign summary of a group of edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeSigns {
    Positive,
    Negative,
    Mixed,
    None,
}

impl EdgeSigns {
    fn of<'a>(weights: impl IntoIterator<Item = &'a Rational>) -> Self {
        let mut out = EdgeSigns::None;
        for w in weights {
            let s = match Sign::of(w) {
                Some(Sign::Positive) => EdgeSigns::Positive,
                Some(Sign::Negative) => EdgeSigns::Negative,
                None => continue,
            };
            out = match out {
                EdgeSigns::None => s,
                prev if prev == s => prev,
                _ => EdgeSigns::Mixed,
            };
        }
        out
    }

    pub fn is_uniform(self) -> bool {
        self != EdgeSigns::Mixed
    }
}

/// A follower, the leader that reaches it first, and their distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub follower: usize,
    pub leader: usize,
    pub distance: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairCondition {
    /// Leader edges to the two nodes differ in sign.
    LeaderEdgeSigns,
    /// Edges from the two nodes to the second layer are not one-signed.
    ChildEdgeSigns,
}

/// First pair of first-layer nodes with equal `Lambda` entries that breaks
/// the depth-two conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairFailure {
    pub first: usize,
    pub second: usize,
    pub condition: PairCondition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    /// Preconditions or hypotheses not met.
    Unmet { reason: String },
    Cluster {
        partition: ClusterPartition,
        witnesses: Vec<Witness>,
        /// The leader set is a union of several clusters of the finest
        /// balanced partition rather than one of them.
        leader_cluster_is_union: bool,
    },
    Split {
        partition: ClusterPartition,
        witnesses: Vec<Witness>,
    },
    LayerSigns {
        layers: TreeLayers,
        /// Sign of the edges between layer `d` and `d + 1`.
        signs: Vec<EdgeSigns>,
    },
    Star { signs: EdgeSigns },
    Depth2 {
        layers: TreeLayers,
        /// Diagonal of `A23 A32`, one entry per first-layer node.
        #[serde(serialize_with = "serialize_rationals")]
        lambda: Vec<Rational>,
        failure: Option<PairFailure>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionReport {
    pub criterion: String,
    pub hypotheses_hold: bool,
    pub implied_verdict: Option<ImpliedVerdict>,
    pub evidence: Evidence,
    pub strength: Strength,
}

impl CriterionReport {
    fn holds(criterion: &str, strength: Strength, verdict: ImpliedVerdict, evidence: Evidence) -> Self {
        Self {
            criterion: criterion.into(),
            hypotheses_hold: true,
            implied_verdict: Some(verdict),
            evidence,
            strength,
        }
    }

    fn unmet(criterion: &str, strength: Strength, reason: impl Into<String>) -> Self {
        Self::fails(criterion, strength, Evidence::Unmet { reason: reason.into() })
    }

    fn fails(criterion: &str, strength: Strength, evidence: Evidence) -> Self {
        Self {
            criterion: criterion.into(),
            hypotheses_hold: false,
            implied_verdict: None,
            evidence,
            strength,
        }
    }
}

fn selection_leaders(pair: &SystemPair) -> Result<&[usize]> {
    pair.leaders()
        .ok_or_else(|| HerdError::Precondition("B is not a selection matrix".into()))
}

/// Leader of `leaders` (lowest index first) that reaches `follower` strictly
/// before any node of `avoid`.
fn closest_leader(
    g: &SignedDigraph,
    leaders: &[usize],
    follower: usize,
    avoid: &[usize],
) -> Result<Option<Witness>> {
    for &l in leaders {
        let dist = g.distances_from(l)?;
        let Distance::Finite(d) = dist[follower] else {
            continue;
        };
        if avoid.iter().all(|&j| Distance::Finite(d) < dist[j]) {
            return Ok(Some(Witness {
                follower,
                leader: l,
                distance: d,
            }));
        }
    }
    Ok(None)
}

/// Clustering-balanced graph whose leader set is one cluster, with every
/// follower reached by some leader strictly before any node of the remaining
/// follower clusters.
pub fn check_cluster_leader_criterion(pair: &SystemPair) -> Result<CriterionReport> {
    const S: Strength = Strength::Sufficient;
    let leaders = selection_leaders(pair)?;
    let g = SignedDigraph::from_adjacency(pair.a())?;
    let Some(partition) = clustering_balance(&g, Some(leaders))? else {
        return Ok(CriterionReport::unmet(
            CLUSTER_LEADERS,
            S,
            "no clustering-balanced partition has the leader set as a cluster",
        ));
    };
    let mut witnesses = Vec::new();
    for (p, cluster) in partition.clusters.iter().enumerate().skip(1) {
        let avoid: Vec<usize> = partition
            .clusters
            .iter()
            .enumerate()
            .filter(|&(h, _)| h != 0 && h != p)
            .flat_map(|(_, c)| c.iter().copied())
            .collect();
        for &i in cluster {
            match closest_leader(&g, leaders, i, &avoid)? {
                Some(w) => witnesses.push(w),
                None => {
                    return Ok(CriterionReport::unmet(
                        CLUSTER_LEADERS,
                        S,
                        format!(
                            "follower {i} (cluster {p}) has no leader reaching it before the other follower clusters"
                        ),
                    ))
                }
            }
        }
    }
    let leader_cluster_is_union = clustering_balance(&g, None)?
        .is_some_and(|finest| !finest.clusters.iter().any(|c| c == &partition.clusters[0]));
    Ok(CriterionReport::holds(
        CLUSTER_LEADERS,
        S,
        ImpliedVerdict::Herdable,
        Evidence::Cluster {
            partition,
            witnesses,
            leader_cluster_is_union,
        },
    ))
}

/// Witnesses for conditions a) and b) under one orientation, or the first
/// follower that breaks them.
fn split_witnesses(
    g: &SignedDigraph,
    partition: &ClusterPartition,
    leaders: &[usize],
) -> Result<std::result::Result<Vec<Witness>, usize>> {
    let is_leader = |v: &usize| leaders.binary_search(v).is_ok();
    let mut witnesses = Vec::new();
    for (p, cluster) in partition.clusters.iter().enumerate() {
        let own_leaders: Vec<usize> = cluster.iter().copied().filter(is_leader).collect();
        let other_followers: Vec<usize> = partition.clusters[1 - p]
            .iter()
            .copied()
            .filter(|v| !is_leader(v))
            .collect();
        for &i in cluster.iter().filter(|v| !is_leader(v)) {
            match closest_leader(g, &own_leaders, i, &other_followers)? {
                Some(w) => witnesses.push(w),
                None => return Ok(Err(i)),
            }
        }
    }
    Ok(Ok(witnesses))
}

/// Structurally balanced graph with leaders on both sides, where every
/// follower is reached by a leader of its own side strictly before any
/// follower of the other side.
pub fn check_split_leader_criterion(pair: &SystemPair) -> Result<CriterionReport> {
    const S: Strength = Strength::Sufficient;
    let leaders = selection_leaders(pair)?;
    let g = SignedDigraph::from_adjacency(pair.a())?;
    let Some(sides) = structural_sides(&g) else {
        return Ok(CriterionReport::unmet(SPLIT_LEADERS, S, "graph is not structurally balanced"));
    };
    let free = sides.pieces.len().saturating_sub(1).min(MAX_FREE_PIECES);
    let mut first_failure = None;
    for mask in 0..(1u64 << free) {
        let partition = sides.oriented(mask << 1);
        if partition.k() != 2
            || !partition
                .clusters
                .iter()
                .all(|c| c.iter().any(|v| leaders.binary_search(v).is_ok()))
        {
            continue;
        }
        match split_witnesses(&g, &partition, leaders)? {
            Ok(witnesses) => {
                return Ok(CriterionReport::holds(
                    SPLIT_LEADERS,
                    S,
                    ImpliedVerdict::Herdable,
                    Evidence::Split {
                        partition,
                        witnesses,
                    },
                ))
            }
            Err(i) => {
                first_failure.get_or_insert(i);
            }
        }
    }
    let reason = match first_failure {
        Some(i) => format!("follower {i} has no same-side leader reaching it before the other side"),
        None => "no two-cluster partition has leaders in both clusters".to_string(),
    };
    Ok(CriterionReport::unmet(SPLIT_LEADERS, S, reason))
}

/// Tree, single leader, layer decomposition.
fn tree_setup(pair: &SystemPair) -> Result<(SignedDigraph, TreeLayers)> {
    let leader = match pair.leaders() {
        Some([l]) => *l,
        _ => {
            return Err(HerdError::Precondition(
                "B must be a single canonical column".into(),
            ))
        }
    };
    let g = SignedDigraph::from_adjacency(pair.a())?;
    if !is_undirected_tree(&g) {
        return Err(HerdError::Precondition("graph of A is not an undirected tree".into()));
    }
    let layers = layer_decomposition(&g, leader)?;
    Ok((g, layers))
}

fn layer_edge_signs(g: &SignedDigraph, layers: &TreeLayers) -> Vec<EdgeSigns> {
    (1..=layers.depth())
        .map(|d| {
            EdgeSigns::of(layers.layer(d).iter().map(|&v| {
                let parent = layers.parent[v].expect("followers have parents");
                g.weight(parent, v)
            }))
        })
        .collect()
}

/// Tree with one leader where all edges between consecutive layers share a
/// sign, layer by layer.
pub fn check_tree_layer_sign_criterion(pair: &SystemPair) -> Result<CriterionReport> {
    let (g, layers) = tree_setup(pair)?;
    let signs = layer_edge_signs(&g, &layers);
    let evidence = Evidence::LayerSigns {
        layers,
        signs: signs.clone(),
    };
    Ok(if signs.iter().all(|s| s.is_uniform()) {
        CriterionReport::holds(
            TREE_LAYER_SIGNS,
            Strength::Sufficient,
            ImpliedVerdict::Herdable,
            evidence,
        )
    } else {
        CriterionReport::fails(TREE_LAYER_SIGNS, Strength::Sufficient, evidence)
    })
}

/// Star around the leader: herdable iff all edges share a sign.
pub fn check_tree_depth1_criterion(pair: &SystemPair) -> Result<CriterionReport> {
    let (g, layers) = tree_setup(pair)?;
    if layers.depth() > 1 {
        return Err(HerdError::Precondition(format!(
            "tree has depth {} from the leader, expected at most 1",
            layers.depth()
        )));
    }
    let signs = layer_edge_signs(&g, &layers)
        .first()
        .copied()
        .unwrap_or(EdgeSigns::None);
    Ok(CriterionReport::holds(
        TREE_DEPTH1,
        Strength::Iff,
        ImpliedVerdict::from_bool(signs.is_uniform()),
        Evidence::Star { signs },
    ))
}

/// Tree of depth at most two: herdable iff for every pair `i, j` of
/// first-layer nodes (including `i = j`) with equal `[A23 A32]` diagonal
/// entries, the leader edges to `i` and `j` share a sign and the edges from
/// `i` and `j` to the second layer are jointly zero or one-signed.
pub fn check_tree_depth2_criterion(pair: &SystemPair) -> Result<CriterionReport> {
    let (_, layers) = tree_setup(pair)?;
    if layers.depth() > 2 {
        return Err(HerdError::Precondition(format!(
            "tree has depth {} from the leader, expected at most 2",
            layers.depth()
        )));
    }
    let a = pair.a();
    let leader = [layers.leader];
    let first = layers.layer(1).to_vec();
    let second = if layers.depth() == 2 {
        layers.layer(2).to_vec()
    } else {
        Vec::new()
    };
    let gamma: Vec<Rational> = a.select(&first, &leader).column(0);
    let a32 = a.select(&second, &first);
    let a23 = a.select(&first, &second);
    let lambda_matrix: RationalMatrix = a23.mul(&a32)?;
    if !lambda_matrix.is_diagonal() {
        return Err(HerdError::Internal(
            "A23 A32 is not diagonal on a tree".into(),
        ));
    }
    let lambda: Vec<Rational> = (0..first.len())
        .map(|i| lambda_matrix.get(i, i).clone())
        .collect();

    let mut failure = None;
    'pairs: for i in 0..first.len() {
        for j in i..first.len() {
            if lambda[i] != lambda[j] {
                continue;
            }
            let condition = if !(&gamma[i] * &gamma[j]).is_positive() {
                Some(PairCondition::LeaderEdgeSigns)
            } else {
                let combined: Vec<Rational> = (0..second.len())
                    .map(|r| {
                        if i == j {
                            a32.get(r, i).clone()
                        } else {
                            a32.get(r, i) + a32.get(r, j)
                        }
                    })
                    .collect();
                let zero = combined.iter().all(Zero::is_zero);
                (!zero && unisigned_sign(&combined).is_none())
                    .then_some(PairCondition::ChildEdgeSigns)
            };
            if let Some(condition) = condition {
                failure = Some(PairFailure {
                    first: first[i],
                    second: first[j],
                    condition,
                });
                break 'pairs;
            }
        }
    }
    Ok(CriterionReport::holds(
        TREE_DEPTH2,
        Strength::Iff,
        ImpliedVerdict::from_bool(failure.is_none()),
        Evidence::Depth2 {
            layers,
            lambda,
            failure,
        },
    ))
}

type Check = fn(&SystemPair) -> Result<CriterionReport>;

/// Canonical reporting order.
const CRITERIA: [(&str, Strength, Check); 5] = [
    (CLUSTER_LEADERS, Strength::Sufficient, check_cluster_leader_criterion),
    (SPLIT_LEADERS, Strength::Sufficient, check_split_leader_criterion),
    (TREE_LAYER_SIGNS, Strength::Sufficient, check_tree_layer_sign_criterion),
    (TREE_DEPTH1, Strength::Iff, check_tree_depth1_criterion),
    (TREE_DEPTH2, Strength::Iff, check_tree_depth2_criterion),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriteriaOutcome {
    pub reports: Vec<CriterionReport>,
    /// Direct feasibility verdict on the original pair.
    pub verdict: HerdabilityVerdict,
    /// Present when the input could be normalised.
    pub trace: Option<ReductionTrace>,
    /// Direct verdict on the reduced pair.
    pub reduced_verdict: Option<HerdabilityVerdict>,
    /// Disagreements between criteria, reductions and the direct verdict.
    pub inconsistencies: Vec<String>,
}

impl CriteriaOutcome {
    pub fn is_consistent(&self) -> bool {
        self.inconsistencies.is_empty()
    }

    /// Reports whose hypotheses hold.
    pub fn applicable(&self) -> impl Iterator<Item = &CriterionReport> {
        self.reports.iter().filter(|r| r.hypotheses_hold)
    }
}

/// Runs the reduction chain and every criterion, then the direct check.
///
/// Criteria whose preconditions fail are listed as not applicable. Any
/// criterion or reduction that contradicts the direct verdict is recorded
/// in `inconsistencies`.
pub fn run_all_criteria(pair: &SystemPair) -> Result<CriteriaOutcome> {
    let (trace, reduced_verdict) = match reduce(pair) {
        Ok((reduced, trace)) => (Some(trace), Some(reduced.verdict())),
        Err(HerdError::NotNormalizable(_)) => (None, None),
        Err(e) => return Err(e),
    };

    let reports = CRITERIA
        .par_iter()
        .map(|(name, strength, check)| match check(pair) {
            Err(HerdError::Precondition(reason)) => {
                Ok(CriterionReport::unmet(name, *strength, format!("not applicable: {reason}")))
            }
            other => other,
        })
        .collect::<Result<Vec<_>>>()?;

    let verdict = direct_verdict(pair);
    let mut inconsistencies = Vec::new();
    for report in &reports {
        let Some(implied) = report.implied_verdict else {
            continue;
        };
        let contradicts = match report.strength {
            Strength::Iff => implied.is_herdable() != verdict.herdable,
            Strength::Sufficient => implied.is_herdable() && !verdict.herdable,
        };
        if contradicts {
            inconsistencies.push(format!(
                "criterion `{}` implies {:?} but the direct check says herdable = {}",
                report.criterion, implied, verdict.herdable
            ));
        }
    }
    if let Some(reduced) = &reduced_verdict {
        if reduced.herdable != verdict.herdable {
            inconsistencies.push(format!(
                "reduced pair has herdable = {} but the original has {}",
                reduced.herdable, verdict.herdable
            ));
        }
    }
    Ok(CriteriaOutcome {
        reports,
        verdict,
        trace,
        reduced_verdict,
        inconsistencies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example2, layered_tree, star, undirected};
    use crate::rational::int;

    fn v(values: &[i64]) -> Vec<Rational> {
        values.iter().map(|&x| int(x)).collect()
    }

    fn leaders(rows: &[&[i64]], l: &[usize]) -> SystemPair {
        SystemPair::with_leaders(RationalMatrix::from_i64(rows), l).unwrap()
    }

    #[test]
    fn cluster_two_node_antagonists() {
        let pair = leaders(&[&[0, 0], &[-1, 0]], &[0]);
        let r = check_cluster_leader_criterion(&pair).unwrap();
        assert!(r.hypotheses_hold);
        assert_eq!(r.implied_verdict, Some(ImpliedVerdict::Herdable));
        let Evidence::Cluster { partition, witnesses, .. } = &r.evidence else {
            panic!("unexpected evidence {:?}", r.evidence);
        };
        assert_eq!(partition.clusters, vec![vec![0], vec![1]]);
        assert_eq!(witnesses, &[Witness { follower: 1, leader: 0, distance: 1 }]);
        assert!(direct_verdict(&pair).herdable);
    }

    #[test]
    fn cluster_rejects_unbalanced() {
        let pair = leaders(&[&[0, 1], &[-1, 0]], &[0]);
        assert!(!check_cluster_leader_criterion(&pair).unwrap().hypotheses_hold);
    }

    #[test]
    fn cluster_requires_reachability() {
        // Follower 1 is unreachable; the distance condition is vacuous with
        // two clusters but no walk exists.
        let pair = leaders(&[&[0, 0], &[0, 0]], &[0]);
        let r = check_cluster_leader_criterion(&pair).unwrap();
        assert!(!r.hypotheses_hold);
        assert!(!direct_verdict(&pair).herdable);
    }

    #[test]
    fn cluster_distance_ties_fail() {
        // Leader 0 reaches followers 1 and 2 (different clusters) in one step.
        let pair = leaders(&[&[0, 0, 0], &[-1, 0, -1], &[-1, -1, 0]], &[0]);
        let r = check_cluster_leader_criterion(&pair).unwrap();
        assert!(!r.hypotheses_hold);
    }

    #[test]
    fn cluster_requires_selection_matrix() {
        let pair = SystemPair::new(
            RationalMatrix::zeros(2, 2),
            RationalMatrix::column_vector(&v(&[2, 0])),
        )
        .unwrap();
        assert!(matches!(
            check_cluster_leader_criterion(&pair),
            Err(HerdError::Precondition(_))
        ));
    }

    #[test]
    fn split_disconnected_branches() {
        let mut a = RationalMatrix::zeros(4, 4);
        a.set(1, 0, int(1));
        a.set(3, 2, int(1));
        let pair = SystemPair::with_leaders(a, &[0, 2]).unwrap();
        let r = check_split_leader_criterion(&pair).unwrap();
        assert!(r.hypotheses_hold, "{:?}", r.evidence);
        let Evidence::Split { partition, .. } = &r.evidence else {
            panic!("unexpected evidence");
        };
        assert_eq!(partition.clusters, vec![vec![0, 1], vec![2, 3]]);
        assert!(direct_verdict(&pair).herdable);
    }

    #[test]
    fn split_needs_leaders_on_both_sides() {
        let a = undirected(4, &[(0, 1, int(1)), (1, 2, int(-1)), (2, 3, int(1))]);
        let pair = SystemPair::with_leaders(a, &[0, 1]).unwrap();
        let r = check_split_leader_criterion(&pair).unwrap();
        assert!(!r.hypotheses_hold);
    }

    #[test]
    fn layer_sign_examples() {
        let r = check_tree_layer_sign_criterion(&layered_tree()).unwrap();
        assert!(r.hypotheses_hold);
        let Evidence::LayerSigns { signs, .. } = &r.evidence else {
            panic!("unexpected evidence");
        };
        assert_eq!(signs, &[EdgeSigns::Positive, EdgeSigns::Negative, EdgeSigns::Positive]);
        assert!(direct_verdict(&layered_tree()).herdable);

        let mixed = check_tree_layer_sign_criterion(&star(&v(&[1, -1]))).unwrap();
        assert!(!mixed.hypotheses_hold);
        assert!(mixed.implied_verdict.is_none());

        let positive = check_tree_layer_sign_criterion(&example2(1, 2, 3)).unwrap();
        assert_eq!(positive.implied_verdict, Some(ImpliedVerdict::Herdable));
    }

    #[test]
    fn depth1_examples() {
        let cases = [(&[1, 2, 3][..], true), (&[1, -1][..], false), (&[-1, -4][..], true)];
        for (weights, herdable) in cases {
            let pair = star(&v(weights));
            let r = check_tree_depth1_criterion(&pair).unwrap();
            assert_eq!(r.strength, Strength::Iff);
            assert_eq!(r.implied_verdict, Some(ImpliedVerdict::from_bool(herdable)));
            assert_eq!(direct_verdict(&pair).herdable, herdable);
        }
        assert!(matches!(
            check_tree_depth1_criterion(&example2(1, 1, 1)),
            Err(HerdError::Precondition(_))
        ));
    }

    #[test]
    fn depth2_example2() {
        let r = check_tree_depth2_criterion(&example2(1, 1, 1)).unwrap();
        assert_eq!(r.implied_verdict, Some(ImpliedVerdict::Herdable));

        let r = check_tree_depth2_criterion(&example2(1, 1, -1)).unwrap();
        assert_eq!(r.implied_verdict, Some(ImpliedVerdict::NotHerdable));
        let Evidence::Depth2 { failure, lambda, .. } = &r.evidence else {
            panic!("unexpected evidence");
        };
        assert_eq!(lambda, &v(&[0, 2, 0]));
        assert_eq!(
            failure,
            &Some(PairFailure {
                first: 2,
                second: 2,
                condition: PairCondition::ChildEdgeSigns
            })
        );

        let r = check_tree_depth2_criterion(&example2(-3, 2, 5)).unwrap();
        assert_eq!(r.implied_verdict, Some(ImpliedVerdict::Herdable));
        let Evidence::Depth2 { lambda, .. } = &r.evidence else {
            panic!("unexpected evidence");
        };
        // Nodes 1 and 3 share Lambda = 0 and have leader edges 1 and 2.
        assert_eq!(lambda[0], lambda[2]);
    }

    #[test]
    fn depth2_leader_edge_clash() {
        // Two childless first-layer nodes with opposite leader edges.
        let pair = star(&v(&[1, -2]));
        let r = check_tree_depth2_criterion(&pair).unwrap();
        let Evidence::Depth2 { failure, .. } = &r.evidence else {
            panic!("unexpected evidence");
        };
        assert_eq!(failure.unwrap().condition, PairCondition::LeaderEdgeSigns);
        assert_eq!(r.implied_verdict, Some(ImpliedVerdict::NotHerdable));
    }

    #[test]
    fn run_all_on_example2() {
        let out = run_all_criteria(&example2(1, 1, 1)).unwrap();
        assert!(out.verdict.herdable);
        assert!(out.is_consistent(), "{:?}", out.inconsistencies);
        let names: Vec<&str> = out.reports.iter().map(|r| r.criterion.as_str()).collect();
        assert_eq!(
            names,
            [CLUSTER_LEADERS, SPLIT_LEADERS, TREE_LAYER_SIGNS, TREE_DEPTH1, TREE_DEPTH2]
        );
        let depth2 = &out.reports[4];
        assert_eq!(depth2.implied_verdict, Some(ImpliedVerdict::Herdable));
        assert!(out.trace.is_some());
    }

    #[test]
    fn run_all_with_identity_input() {
        let pair = SystemPair::new(
            RationalMatrix::from_i64(&[&[1, -2], &[3, 0]]),
            RationalMatrix::identity(2),
        )
        .unwrap();
        let out = run_all_criteria(&pair).unwrap();
        assert!(out.verdict.herdable);
        assert!(out.reduced_verdict.unwrap().herdable);
    }

    #[test]
    fn run_all_without_structure() {
        let a = RationalMatrix::from_i64(&[&[1, 2, -1], &[-3, 1, 2], &[2, -2, 1]]);
        let pair = SystemPair::with_leaders(a, &[0]).unwrap();
        let out = run_all_criteria(&pair).unwrap();
        assert_eq!(out.applicable().count(), 0);
        assert!(out.is_consistent());
        assert_eq!(out.verdict.herdable, direct_verdict(&pair).herdable);
    }

    #[test]
    fn run_all_with_dependent_input_rows() {
        let pair = SystemPair::new(
            RationalMatrix::zeros(2, 2),
            RationalMatrix::column_vector(&v(&[1, 1])),
        )
        .unwrap();
        let out = run_all_criteria(&pair).unwrap();
        assert!(out.trace.is_none());
        assert!(out.verdict.herdable);
    }

    #[test]
    fn hypotheses_depend_on_signs_only() {
        use crate::generators::InstanceGenerator;
        let mut g = InstanceGenerator::new(11);
        for _ in 0..60 {
            let pair = g.random_leader_pair(6, 2, 0.3);
            let signs = RationalMatrix::new(
                6,
                6,
                pair.a()
                    .entries()
                    .iter()
                    .map(|w| Sign::of(w).map_or_else(num_traits::Zero::zero, Sign::unit))
                    .collect(),
            )
            .unwrap();
            let sign_pair = SystemPair::new(signs, pair.b().clone()).unwrap();
            let a = run_all_criteria(&pair).unwrap();
            let b = run_all_criteria(&sign_pair).unwrap();
            for (x, y) in a.reports.iter().zip(&b.reports) {
                assert_eq!(x.hypotheses_hold, y.hypotheses_hold, "{}", x.criterion);
            }
        }
    }
}
