//! Signed, weighted digraph view of a state matrix.
//!
//! Node indices are 0-based. There is an arc `j -> i` exactly when
//! `A[i][j] != 0`, with weight `A[i][j]` (row is the head, column the tail).

use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{HerdError, Result};
use crate::matrix::RationalMatrix;
use crate::rational::Rational;

/// Minimum walk length; unreachable nodes are `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Distance::Finite(d) => s.serialize_u64(*d as u64),
            Distance::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub weight: Rational,
}

#[derive(Debug)]
pub struct SignedDigraph {
    adjacency: RationalMatrix,
    arcs: Vec<Arc>,
    successors: Vec<Vec<usize>>,
    distances: Vec<OnceLock<Vec<Distance>>>,
}

impl SignedDigraph {
    pub fn from_adjacency(a: &RationalMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(HerdError::DimensionMismatch(format!(
                "adjacency matrix must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut arcs = Vec::new();
        let mut successors = vec![Vec::new(); n];
        for j in 0..n {
            for i in 0..n {
                let w = a.get(i, j);
                if !w.is_zero() {
                    arcs.push(Arc {
                        from: j,
                        to: i,
                        weight: w.clone(),
                    });
                    successors[j].push(i);
                }
            }
        }
        Ok(Self {
            adjacency: a.clone(),
            arcs,
            successors,
            distances: (0..n).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.adjacency.rows()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn adjacency(&self) -> &RationalMatrix {
        &self.adjacency
    }

    /// Weight of the arc `from -> to` (zero when absent).
    pub fn weight(&self, from: usize, to: usize) -> &Rational {
        self.adjacency.get(to, from)
    }

    /// Breadth-first distances from `source`, computed once and cached.
    pub fn distances_from(&self, source: usize) -> Result<&[Distance]> {
        if source >= self.n() {
            return Err(HerdError::InvalidInput(format!(
                "node {source} out of range for {} nodes",
                self.n()
            )));
        }
        Ok(self.distances[source].get_or_init(|| self.bfs(source)))
    }

    pub fn distance(&self, from: usize, to: usize) -> Result<Distance> {
        Ok(self.distances_from(from)?[to])
    }

    fn bfs(&self, source: usize) -> Vec<Distance> {
        let mut dist = vec![Distance::Infinite; self.n()];
        dist[source] = Distance::Finite(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].finite().expect("queued nodes are reached");
            for &v in &self.successors[u] {
                if dist[v] == Distance::Infinite {
                    dist[v] = Distance::Finite(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Neighbours in the undirected support (either arc direction).
    fn undirected_neighbours(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&v| {
            v != u && (!self.adjacency.get(u, v).is_zero() || !self.adjacency.get(v, u).is_zero())
        })
    }
}

pub fn graph_from_adjacency(a: &RationalMatrix) -> Result<SignedDigraph> {
    SignedDigraph::from_adjacency(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BalanceKind {
    Clustering,
    Structural,
}

/// Node partition with nonnegative intra-cluster and nonpositive
/// inter-cluster entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterPartition {
    pub clusters: Vec<Vec<usize>>,
    pub kind: BalanceKind,
}

impl ClusterPartition {
    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    /// Cluster index of every node.
    pub fn labels(&self, n: usize) -> Vec<usize> {
        let mut labels = vec![usize::MAX; n];
        for (c, cluster) in self.clusters.iter().enumerate() {
            for &v in cluster {
                labels[v] = c;
            }
        }
        labels
    }

    /// Entrywise re-check of the sign conditions and of the covering.
    pub fn is_valid_for(&self, a: &RationalMatrix) -> bool {
        let n = a.rows();
        let labels = self.labels(n);
        let sizes: usize = self.clusters.iter().map(Vec::len).sum();
        if sizes != n || labels.contains(&usize::MAX) {
            return false;
        }
        if self.kind == BalanceKind::Structural && self.k() > 2 {
            return false;
        }
        (0..n).all(|i| {
            (0..n).all(|j| {
                let v = a.get(i, j);
                if labels[i] == labels[j] {
                    !v.is_negative()
                } else {
                    !v.is_positive()
                }
            })
        })
    }
}

/// Finest valid partition of `nodes` within the induced subgraph: connected
/// components of the positive support, provided no negative entry falls
/// inside a component. Components are ordered by their smallest node.
fn finest_partition(a: &RationalMatrix, nodes: &[usize]) -> Option<Vec<Vec<usize>>> {
    let n = a.rows();
    let mut member = vec![false; n];
    for &v in nodes {
        member[v] = true;
    }
    let mut label = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    for &start in &sorted {
        if label[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut comp = vec![start];
        label[start] = id;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if member[v]
                    && label[v] == usize::MAX
                    && (a.get(u, v).is_positive() || a.get(v, u).is_positive())
                {
                    label[v] = id;
                    comp.push(v);
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    let internal_negative = components.iter().any(|comp| {
        comp.iter()
            .any(|&i| comp.iter().any(|&j| a.get(i, j).is_negative()))
    });
    (!internal_negative).then_some(components)
}

/// Clustering balance detection.
///
/// Without `required_first_cluster`, returns the finest valid partition.
/// With it, returns a valid partition whose first cluster is exactly that
/// set: intra-set entries must be nonnegative, every entry between the set
/// and the rest nonpositive, and the remaining nodes are split finest-first.
pub fn clustering_balance(
    g: &SignedDigraph,
    required_first_cluster: Option<&[usize]>,
) -> Result<Option<ClusterPartition>> {
    let a = g.adjacency();
    let n = g.n();
    let all: Vec<usize> = (0..n).collect();
    let clusters = match required_first_cluster {
        None => finest_partition(a, &all),
        Some(first) => {
            let mut first = first.to_vec();
            first.sort_unstable();
            first.dedup();
            if first.is_empty() {
                return Err(HerdError::InvalidInput("required cluster is empty".into()));
            }
            if let Some(&bad) = first.iter().find(|&&v| v >= n) {
                return Err(HerdError::InvalidInput(format!(
                    "node {bad} out of range for {n} nodes"
                )));
            }
            let mut inside = vec![false; n];
            for &v in &first {
                inside[v] = true;
            }
            let rest: Vec<usize> = all.iter().copied().filter(|&v| !inside[v]).collect();
            let intra_ok = first
                .iter()
                .all(|&i| first.iter().all(|&j| !a.get(i, j).is_negative()));
            let cross_ok = first.iter().all(|&i| {
                rest.iter()
                    .all(|&j| !a.get(i, j).is_positive() && !a.get(j, i).is_positive())
            });
            if intra_ok && cross_ok {
                finest_partition(a, &rest).map(|others| {
                    let mut clusters = vec![first];
                    clusters.extend(others);
                    clusters
                })
            } else {
                None
            }
        }
    };
    Ok(clusters.map(|clusters| ClusterPartition {
        clusters,
        kind: BalanceKind::Clustering,
    }))
}

/// The two-colourings admitted by a structurally balanced graph.
///
/// Positive components are contracted and the graph of negative entries
/// between them is 2-coloured. Each connected piece of that graph can be
/// oriented independently, so the result lists, per piece, the node sets on
/// its two sides (the side holding the piece's smallest node first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralSides {
    pub pieces: Vec<(Vec<usize>, Vec<usize>)>,
}

impl StructuralSides {
    /// Partition obtained by flipping the pieces whose bit is set in `mask`.
    pub fn oriented(&self, mask: u64) -> ClusterPartition {
        let mut first = Vec::new();
        let mut second = Vec::new();
        for (p, (side0, side1)) in self.pieces.iter().enumerate() {
            let flip = p < 64 && (mask >> p) & 1 == 1;
            let (a, b) = if flip { (side1, side0) } else { (side0, side1) };
            first.extend_from_slice(a);
            second.extend_from_slice(b);
        }
        first.sort_unstable();
        second.sort_unstable();
        let clusters = match (first.is_empty(), second.is_empty()) {
            (false, false) => vec![first, second],
            (false, true) => vec![first],
            (true, false) => vec![second],
            (true, true) => vec![],
        };
        ClusterPartition {
            clusters,
            kind: BalanceKind::Structural,
        }
    }
}

pub fn structural_sides(g: &SignedDigraph) -> Option<StructuralSides> {
    let a = g.adjacency();
    let all: Vec<usize> = (0..g.n()).collect();
    let components = finest_partition(a, &all)?;
    let c = components.len();
    let mut comp_of = vec![0; g.n()];
    for (k, comp) in components.iter().enumerate() {
        for &v in comp {
            comp_of[v] = k;
        }
    }
    let mut neg = vec![Vec::new(); c];
    for arc in g.arcs() {
        if arc.weight.is_negative() {
            let (p, q) = (comp_of[arc.from], comp_of[arc.to]);
            neg[p].push(q);
            neg[q].push(p);
        }
    }
    let mut colour = vec![None::<bool>; c];
    let mut pieces = Vec::new();
    for start in 0..c {
        if colour[start].is_some() {
            continue;
        }
        colour[start] = Some(false);
        let mut sides = (Vec::new(), Vec::new());
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            let col = colour[p].expect("queued components are coloured");
            if col {
                sides.1.extend_from_slice(&components[p]);
            } else {
                sides.0.extend_from_slice(&components[p]);
            }
            for &q in &neg[p] {
                match colour[q] {
                    None => {
                        colour[q] = Some(!col);
                        queue.push_back(q);
                    }
                    Some(cq) if cq == col => return None,
                    Some(_) => {}
                }
            }
        }
        sides.0.sort_unstable();
        sides.1.sort_unstable();
        pieces.push(sides);
    }
    Some(StructuralSides { pieces })
}

/// Structural balance: at most two clusters. When the negative-edge graph
/// of contracted components is disconnected, each piece is oriented with
/// its smallest node in the first cluster.
pub fn structural_balance(g: &SignedDigraph) -> Option<ClusterPartition> {
    structural_sides(g).map(|s| s.oriented(0))
}

/// Symmetric, zero diagonal, connected, and exactly `n - 1` edges.
pub fn is_undirected_tree(g: &SignedDigraph) -> bool {
    let a = g.adjacency();
    let n = g.n();
    if n == 0 || !a.is_symmetric() || (0..n).any(|i| !a.get(i, i).is_zero()) {
        return false;
    }
    let edges = g.arcs().len() / 2;
    if edges != n - 1 {
        return false;
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for v in g.undirected_neighbours(u) {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

/// Followers of a tree grouped by distance from the leader.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeLayers {
    pub leader: usize,
    /// `layers[d - 1]` holds the nodes at distance `d`, sorted.
    pub layers: Vec<Vec<usize>>,
    /// Unique neighbour one layer closer; `None` for the leader.
    pub parent: Vec<Option<usize>>,
}

impl TreeLayers {
    /// Eccentricity of the leader.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Layer `d` with `F_0 = {leader}`.
    pub fn layer(&self, d: usize) -> &[usize] {
        if d == 0 {
            std::slice::from_ref(&self.leader)
        } else {
            &self.layers[d - 1]
        }
    }
}

pub fn layer_decomposition(g: &SignedDigraph, leader: usize) -> Result<TreeLayers> {
    if leader >= g.n() {
        return Err(HerdError::InvalidInput(format!(
            "leader {leader} out of range for {} nodes",
            g.n()
        )));
    }
    if !is_undirected_tree(g) {
        return Err(HerdError::Precondition("graph is not an undirected tree".into()));
    }
    let dist = g.distances_from(leader)?;
    let mut layers: Vec<Vec<usize>> = Vec::new();
    let mut parent = vec![None; g.n()];
    for (v, d) in dist.iter().enumerate() {
        let d = d.finite().expect("trees are connected");
        if d == 0 {
            continue;
        }
        if layers.len() < d {
            layers.resize(d, Vec::new());
        }
        layers[d - 1].push(v);
        parent[v] = g
            .undirected_neighbours(v)
            .find(|&u| dist[u] == Distance::Finite(d - 1));
    }
    Ok(TreeLayers {
        leader,
        layers,
        parent,
    })
}
