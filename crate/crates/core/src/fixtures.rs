//! Named reference systems used by tests, the acceptance suite and the CLI.

use crate::matrix::RationalMatrix;
use crate::rational::{int, Rational};
use crate::system::SystemPair;

/// Symmetric adjacency matrix of an undirected weighted graph on `n` nodes.
pub fn undirected(n: usize, edges: &[(usize, usize, Rational)]) -> RationalMatrix {
    let mut a = RationalMatrix::zeros(n, n);
    for (u, v, w) in edges {
        a.set(*u, *v, w.clone());
        a.set(*v, *u, w.clone());
    }
    a
}

/// The depth-2 tree with leader 0, first layer {1, 2, 3}, second layer
/// {4, 5} hanging off node 2:
///
/// ```text
///     0 -1- 1
///     0 -a- 2 -b- 4
///              \c- 5
///     0 -2- 3
/// ```
///
/// Herdable from node 0 exactly when `b * c > 0`.
pub fn example2_matrix(a: i64, b: i64, c: i64) -> RationalMatrix {
    undirected(
        6,
        &[
            (0, 1, int(1)),
            (0, 2, int(a)),
            (0, 3, int(2)),
            (2, 4, int(b)),
            (2, 5, int(c)),
        ],
    )
}

pub fn example2(a: i64, b: i64, c: i64) -> SystemPair {
    SystemPair::with_leaders(example2_matrix(a, b, c), &[0]).expect("fixture is well formed")
}

/// Star with center 0 and one leaf per weight.
pub fn star_matrix(weights: &[Rational]) -> RationalMatrix {
    let edges: Vec<_> = weights
        .iter()
        .enumerate()
        .map(|(k, w)| (0, k + 1, w.clone()))
        .collect();
    undirected(weights.len() + 1, &edges)
}

pub fn star(weights: &[Rational]) -> SystemPair {
    SystemPair::with_leaders(star_matrix(weights), &[0]).expect("fixture is well formed")
}

/// A nine-node tree of depth 3 whose layer-to-layer edges are uniform in
/// sign (`+`, `-`, `+`), so the reachable blocks of successive layers are
/// positive, negative and negative. Node 1 is reached through positive walks
/// while node 8 is reached through negative ones, so the odd layers are not
/// sign-homogeneous.
pub fn layered_tree_matrix() -> RationalMatrix {
    undirected(
        9,
        &[
            (0, 1, int(1)),
            (0, 2, int(2)),
            (1, 3, int(-1)),
            (1, 4, int(-3)),
            (2, 5, int(-2)),
            (3, 6, int(2)),
            (5, 7, int(1)),
            (5, 8, int(3)),
        ],
    )
}

pub fn layered_tree() -> SystemPair {
    SystemPair::with_leaders(layered_tree_matrix(), &[0]).expect("fixture is well formed")
}
