//! Seeded random instance generators for property tests, the acceptance
//! suite and the CLI's `fuzz` command.
//!
//! Weights are drawn from `{±1, ±2, ±3, ±1/2}` unless stated otherwise.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::RationalMatrix;
use crate::rational::{int, ratio, Rational, Sign};
use crate::system::SystemPair;

/// Shape of a clustered signed digraph.
#[derive(Debug, Clone)]
pub struct ClusterSpec {
    pub sizes: Vec<usize>,
    /// Probability of a (positive) arc between two nodes of one cluster.
    pub intra_density: f64,
    /// Probability of a (negative) arc between nodes of different clusters.
    pub inter_density: f64,
}

pub struct InstanceGenerator {
    rng: ChaCha8Rng,
}

impl InstanceGenerator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn magnitude(&mut self) -> Rational {
        match self.rng.gen_range(0..4) {
            0 => int(1),
            1 => int(2),
            2 => int(3),
            _ => ratio(1, 2),
        }
    }

    pub fn sign(&mut self) -> Sign {
        if self.rng.gen_bool(0.5) {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn weight(&mut self) -> Rational {
        let s = self.sign();
        s.unit() * self.magnitude()
    }

    /// Each entry nonzero with probability `density`.
    pub fn sparse_matrix(&mut self, rows: usize, cols: usize, density: f64) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if self.rng.gen_bool(density) {
                    let w = self.weight();
                    m.set(i, j, w);
                }
            }
        }
        m
    }

    /// Dense-ish random pair with an arbitrary (not selection) input matrix.
    pub fn random_pair(&mut self, n: usize, m: usize, density: f64) -> SystemPair {
        let a = self.sparse_matrix(n, n, density);
        let mut b = self.sparse_matrix(n, m, 0.5);
        if b.is_zero() {
            b.set(0, 0, int(1));
        }
        SystemPair::new(a, b).expect("shapes are consistent")
    }

    /// Random pair whose `B` selects `leaders` random nodes.
    pub fn random_leader_pair(&mut self, n: usize, leaders: usize, density: f64) -> SystemPair {
        let a = self.sparse_matrix(n, n, density);
        let set = self.subset(n, leaders);
        SystemPair::with_leaders(a, &set).expect("leaders are in range")
    }

    /// Sorted random subset of `0..n` of the given size.
    pub fn subset(&mut self, n: usize, size: usize) -> Vec<usize> {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut self.rng);
        let mut s = all[..size.min(n)].to_vec();
        s.sort_unstable();
        s
    }

    /// Pair with `B = [B1; 0]`, `B1` an `r x m` block of full row rank.
    pub fn block_input_pair(&mut self, n: usize, r: usize, m: usize, density: f64) -> SystemPair {
        assert!(r <= m && r <= n, "need r <= m and r <= n");
        let a = self.sparse_matrix(n, n, density);
        let b1 = loop {
            let b1 = self.sparse_matrix(r, m, 0.7);
            if b1.rank() == r {
                break b1;
            }
        };
        let b = RationalMatrix::from_rows(
            (0..n)
                .map(|i| {
                    if i < r {
                        b1.row(i).to_vec()
                    } else {
                        vec![Rational::zero(); m]
                    }
                })
                .collect(),
        )
        .expect("rectangular");
        SystemPair::new(a, b).expect("shapes are consistent")
    }

    pub fn nonsingular(&mut self, m: usize) -> RationalMatrix {
        loop {
            let t = self.sparse_matrix(m, m, 0.8);
            if t.rank() == m {
                return t;
            }
        }
    }

    /// Clustered digraph satisfying clustering balance by construction.
    /// Clusters are consecutive index ranges in the order of `spec.sizes`.
    pub fn clustered_graph(&mut self, spec: &ClusterSpec) -> (RationalMatrix, Vec<Vec<usize>>) {
        let n: usize = spec.sizes.iter().sum();
        let mut clusters = Vec::new();
        let mut label = Vec::with_capacity(n);
        let mut next = 0;
        for (c, &size) in spec.sizes.iter().enumerate() {
            clusters.push((next..next + size).collect::<Vec<_>>());
            label.extend(std::iter::repeat_n(c, size));
            next += size;
        }
        let mut a = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let same = label[i] == label[j];
                let p = if same { spec.intra_density } else { spec.inter_density };
                if self.rng.gen_bool(p) {
                    let mag = self.magnitude();
                    a.set(i, j, if same { mag } else { -mag });
                }
            }
        }
        (a, clusters)
    }

    /// Tree with leader 0 and `profile[d]` nodes at distance `d + 1`.
    /// Nodes are numbered layer by layer; each node picks a random parent in
    /// the previous layer. Edges between layers `d` and `d + 1` get sign
    /// `signs[d]` when given, a random sign otherwise.
    pub fn layered_tree(&mut self, profile: &[usize], signs: &[Option<Sign>]) -> RationalMatrix {
        let n = 1 + profile.iter().sum::<usize>();
        let mut a = RationalMatrix::zeros(n, n);
        let mut prev: Vec<usize> = vec![0];
        let mut next_id = 1;
        for (d, &size) in profile.iter().enumerate() {
            let layer: Vec<usize> = (next_id..next_id + size).collect();
            next_id += size;
            for &v in &layer {
                let parent = *prev.choose(&mut self.rng).expect("previous layer is nonempty");
                let sign = signs.get(d).copied().flatten().unwrap_or_else(|| self.sign());
                let w = sign.unit() * self.magnitude();
                a.set(v, parent, w.clone());
                a.set(parent, v, w);
            }
            prev = layer;
        }
        a
    }

    /// Random layer profile with `depth` nonempty layers and at most
    /// `max_nodes` nodes in total.
    pub fn profile(&mut self, depth: usize, max_nodes: usize) -> Vec<usize> {
        assert!(max_nodes > depth, "need room for one node per layer");
        let mut profile = vec![1; depth];
        let budget = self.rng.gen_range(0..=max_nodes - 1 - depth);
        for _ in 0..budget {
            let d = self.rng.gen_range(0..depth);
            profile[d] += 1;
        }
        profile
    }

    /// Diagonal `Lambda` and zero-free `Gamma` of size `n`, with eigenvalues
    /// drawn from a pool of `max(1, n / 2)` values so repetitions are common.
    pub fn diagonal_pair(&mut self, n: usize) -> (RationalMatrix, Vec<Rational>) {
        let pool: Vec<Rational> = (0..(n / 2).max(1))
            .map(|_| {
                if self.rng.gen_bool(0.2) {
                    Rational::zero()
                } else {
                    self.weight()
                }
            })
            .collect();
        let eig: Vec<Rational> = (0..n)
            .map(|_| pool.choose(&mut self.rng).expect("pool is nonempty").clone())
            .collect();
        let gamma: Vec<Rational> = (0..n).map(|_| self.weight()).collect();
        (RationalMatrix::diagonal(&eig), gamma)
    }

    /// Random vector with integer entries in `lo..=hi`.
    pub fn int_vector(&mut self, len: usize, lo: i64, hi: i64) -> Vec<Rational> {
        (0..len).map(|_| int(self.rng.gen_range(lo..=hi))).collect()
    }
}
