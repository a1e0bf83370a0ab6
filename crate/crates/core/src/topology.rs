//! Undirected agent graph with leader links.
//!
//! Node 0 is the exosystem (leader); agents are 1..=N. The module builds the
//! Laplacian `L`, the leader-augmented matrix `H = diag(a_i0) + L`, and the
//! fractional-weight variants `H̄`, `H̃` whose edge weights are raised to
//! `2b/(a+b)` and `2b/(3b-a)` respectively. For 0/1 weights all three
//! coincide.

use crate::numkit::{sym_eig_extrema, Matrix};
use crate::{Error, Result};

/// Which exponent to apply to edge weights when assembling `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HVariant {
    /// plain weights
    Plain,
    /// weights raised to `2b/(a+b)`
    Bar,
    /// weights raised to `2b/(3b-a)`
    Tilde,
}

/// Agent communication graph plus leader links.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    n: usize,
    adj: Matrix,
    leader: Vec<f64>,
}

impl Topology {
    /// Build from a symmetric zero-diagonal adjacency matrix and a leader
    /// link vector.
    pub fn new(adj: Matrix, leader: Vec<f64>) -> Result<Self> {
        if !adj.is_square() {
            return Err(Error::NonSquare { rows: adj.rows(), cols: adj.cols() });
        }
        let n = adj.rows();
        if leader.len() != n {
            return Err(Error::Dimension(format!(
                "leader vector has length {}, expected {}",
                leader.len(),
                n
            )));
        }
        if adj.asymmetry() > 0.0 {
            return Err(Error::invalid("adjacency", "matrix must be symmetric"));
        }
        for i in 0..n {
            if adj[(i, i)] != 0.0 {
                return Err(Error::invalid("adjacency", "diagonal must be zero"));
            }
        }
        for i in 0..n {
            if adj.row(i).iter().any(|&w| w < 0.0) || leader[i] < 0.0 {
                return Err(Error::invalid("adjacency", "weights must be nonnegative"));
            }
        }
        Ok(Topology { n, adj, leader })
    }

    /// Build a 0/1 graph from agent-agent edges and leader-linked agents,
    /// all 1-based agent indices.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], leader_links: &[usize]) -> Result<Self> {
        let mut adj = Matrix::zeros(n, n);
        for &(i, j) in edges {
            if i == 0 || j == 0 || i > n || j > n || i == j {
                return Err(Error::invalid("edge", format!("({i},{j}) out of range for n={n}")));
            }
            adj[(i - 1, j - 1)] = 1.0;
            adj[(j - 1, i - 1)] = 1.0;
        }
        let mut leader = vec![0.0; n];
        for &i in leader_links {
            if i == 0 || i > n {
                return Err(Error::invalid("leader link", format!("{i} out of range for n={n}")));
            }
            leader[i - 1] = 1.0;
        }
        Topology::new(adj, leader)
    }

    pub fn agent_count(&self) -> usize {
        self.n
    }

    /// Weight of the (undirected) edge between graph nodes `i` and `j`,
    /// where node 0 is the leader.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => 0.0,
            (0, k) | (k, 0) => self.leader[k - 1],
            (p, q) if p == q => 0.0,
            (p, q) => self.adj[(p - 1, q - 1)],
        }
    }

    /// Edges of the leader-augmented graph with nonzero weight, as node
    /// pairs `(i, j)` with `i > j` (node 0 = leader).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            if self.leader[i - 1] != 0.0 {
                out.push((i, 0));
            }
        }
        for i in 1..=self.n {
            for j in 1..i {
                if self.adj[(i - 1, j - 1)] != 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Graph Laplacian: `l_ii = sum_j a_ij`, `l_ij = -a_ij`.
    pub fn laplacian(&self) -> Matrix {
        weighted_laplacian(&self.adj, 1.0)
    }

    /// `H = diag(a_10, ..., a_N0) + L`, with edge weights raised to the
    /// variant exponent defined by the observer's odd pair `(num, den)`.
    pub fn h_matrix(&self, num: u32, den: u32, variant: HVariant) -> Matrix {
        let exp = match variant {
            HVariant::Plain => 1.0,
            HVariant::Bar => 2.0 * den as f64 / (num as f64 + den as f64),
            HVariant::Tilde => 2.0 * den as f64 / (3.0 * den as f64 - num as f64),
        };
        let mut h = weighted_laplacian(&self.adj, exp);
        for i in 0..self.n {
            h[(i, i)] += pow_weight(self.leader[i], exp);
        }
        h
    }

    /// Smallest eigenvalue of the plain `H`.
    pub fn lambda_min_h(&self) -> Result<f64> {
        Ok(sym_eig_extrema(&self.h_matrix(1, 1, HVariant::Plain))?.0)
    }

    /// Spectral test for Assumption "node 0 globally reachable":
    /// `H > 0` iff every agent is reachable from the leader.
    pub fn leader_globally_reachable(&self) -> bool {
        self.lambda_min_h().map(|l| l > 1e-9).unwrap_or(false)
    }

    /// Breadth-first search from node 0 over the leader-augmented graph;
    /// independent oracle for [`Self::leader_globally_reachable`].
    pub fn leader_reachable_bfs(&self) -> bool {
        let mut seen = vec![false; self.n + 1];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for v in 0..=self.n {
                if !seen[v] && self.weight(u, v) > 0.0 {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

fn pow_weight(w: f64, exp: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        w.powf(exp)
    }
}

fn weighted_laplacian(adj: &Matrix, exp: f64) -> Matrix {
    let n = adj.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        let mut deg = 0.0;
        for j in 0..n {
            if i != j {
                let w = pow_weight(adj[(i, j)], exp);
                deg += w;
                l[(i, j)] = -w;
            }
        }
        l[(i, i)] = deg;
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Section-IV bench graph: 4-cycle 1-2-3-4-1 with leader into 1 and 2.
    pub(crate) fn bench_topology() -> Topology {
        Topology::from_edges(4, &[(1, 2), (2, 3), (3, 4), (4, 1)], &[1, 2]).unwrap()
    }

    #[test]
    fn laplacian_single_edge() {
        let t = Topology::from_edges(2, &[(1, 2)], &[]).unwrap();
        let l = t.laplacian();
        assert_eq!(l, Matrix::from_rows(&[&[1.0, -1.0], &[-1.0, 1.0]]));
    }

    #[test]
    fn laplacian_empty_graph() {
        let t = Topology::from_edges(3, &[], &[]).unwrap();
        assert_eq!(t.laplacian(), Matrix::zeros(3, 3));
    }

    #[test]
    fn bench_h_matrix() {
        let t = bench_topology();
        let h = t.h_matrix(1, 1, HVariant::Plain);
        let expect = Matrix::from_rows(&[
            &[3.0, -1.0, 0.0, -1.0],
            &[-1.0, 3.0, -1.0, 0.0],
            &[0.0, -1.0, 2.0, -1.0],
            &[-1.0, 0.0, -1.0, 2.0],
        ]);
        assert_eq!(h, expect);
        // L = H - diag(a0)
        let mut l = h.clone();
        l[(0, 0)] -= 1.0;
        l[(1, 1)] -= 1.0;
        assert_eq!(t.laplacian(), l);
    }

    #[test]
    fn bar_tilde_match_plain_for_unit_weights() {
        let t = bench_topology();
        let plain = t.h_matrix(3, 7, HVariant::Plain);
        assert_eq!(t.h_matrix(3, 7, HVariant::Bar), plain);
        assert_eq!(t.h_matrix(3, 7, HVariant::Tilde), plain);
    }

    #[test]
    fn single_agent_leader_only() {
        let t = Topology::from_edges(1, &[], &[1]).unwrap();
        let h = t.h_matrix(3, 7, HVariant::Bar);
        assert_eq!(h, Matrix::from_rows(&[&[1.0]]));
    }

    #[test]
    fn bench_lambda_min() {
        let t = bench_topology();
        assert_relative_eq!(t.lambda_min_h().unwrap(), 0.3820, epsilon = 5e-4);
        assert!(t.leader_globally_reachable());
        assert!(t.leader_reachable_bfs());
    }

    #[test]
    fn ring_without_leader_is_unreachable() {
        let t = Topology::from_edges(4, &[(1, 2), (2, 3), (3, 4), (4, 1)], &[]).unwrap();
        assert!(!t.leader_globally_reachable());
        assert!(!t.leader_reachable_bfs());
    }

    #[test]
    fn isolated_agent_is_unreachable() {
        let t = Topology::from_edges(2, &[], &[1]).unwrap();
        assert!(!t.leader_globally_reachable());
        assert!(!t.leader_reachable_bfs());
    }

    proptest! {
        /// spectral reachability agrees with the BFS oracle on random graphs
        #[test]
        fn reachability_matches_bfs(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=8usize);
            let mut adj = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..i {
                    if rng.gen_bool(0.3) {
                        adj[(i, j)] = 1.0;
                        adj[(j, i)] = 1.0;
                    }
                }
            }
            let leader: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.3) { 1.0 } else { 0.0 }).collect();
            let t = Topology::new(adj, leader).unwrap();
            prop_assert_eq!(t.leader_globally_reachable(), t.leader_reachable_bfs());
        }

        /// every H variant is positive semidefinite
        #[test]
        fn h_variants_psd(seed in 0u64..300) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=6usize);
            let mut adj = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..i {
                    if rng.gen_bool(0.4) {
                        adj[(i, j)] = 1.0;
                        adj[(j, i)] = 1.0;
                    }
                }
            }
            let leader: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.4) { 1.0 } else { 0.0 }).collect();
            let t = Topology::new(adj, leader).unwrap();
            for v in [HVariant::Plain, HVariant::Bar, HVariant::Tilde] {
                let (lo, _) = sym_eig_extrema(&t.h_matrix(3, 7, v)).unwrap();
                prop_assert!(lo >= -1e-9, "variant {:?} lambda_min {}", v, lo);
            }
        }
    }
}
