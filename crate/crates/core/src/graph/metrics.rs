//! Random-walk entropy metrics: determinism, degeneracy and effective information.
//!
//! All three are computed over the non-isolated nodes only. With `n` the
//! number of non-isolated nodes and `W` the row-normalized adjacency matrix:
//!
//! ```text
//! Det(G) = log2(n) - (1/n) * sum_i H(W_i)
//! Deg(G) = log2(n) - H((1/n) * sum_i W_i)
//! EI(G)  = Det(G) - Deg(G)
//! ```
//!
//! `H` is Shannon entropy in bits with `0 * log2(0) = 0`. Both Det and Deg are
//! bounded by `log2(n)`, which is used to normalize them.

use serde::Serialize;

use super::{GraphError, WeightedGraph};

/// Shannon entropy in bits of a (sub-)probability vector. Zero entries contribute nothing.
pub fn shannon_entropy_bits<I: IntoIterator<Item = f64>>(probabilities: I) -> f64 {
    probabilities
        .into_iter()
        .filter(|p| *p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// Row-stochastic random-walk matrix of a [`WeightedGraph`], stored sparsely.
///
/// Rows and columns follow the graph's node order. Isolated nodes keep an
/// empty (all-zero) row and are flagged inactive.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    rows: Vec<Vec<(usize, f64)>>,
    active: Vec<bool>,
}

impl TransitionMatrix {
    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    /// Number of non-isolated nodes.
    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.active[i]
    }

    /// Non-zero entries of row `i` as `(column, probability)`, sorted by column.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .binary_search_by_key(&j, |(col, _)| *col)
            .map(|pos| self.rows[i][pos].1)
            .unwrap_or(0.0)
    }

    /// Dense copy of row `i`.
    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        for (j, p) in &self.rows[i] {
            out[*j] = *p;
        }
        out
    }

    /// Average of the active rows: where a walker started uniformly at random lands next.
    pub fn mean_active_row(&self) -> Vec<f64> {
        let n_active = self.active_count();
        let mut mean = vec![0.0; self.dimension()];
        if n_active == 0 {
            return mean;
        }
        for (row, active) in self.rows.iter().zip(&self.active) {
            if *active {
                for (j, p) in row {
                    mean[*j] += p;
                }
            }
        }
        let scale = 1.0 / n_active as f64;
        mean.iter_mut().for_each(|m| *m *= scale);
        mean
    }
}

/// Builds the transition matrix by dividing every row of the adjacency matrix
/// by the node strength.
pub fn transition_matrix<N: Ord + Clone + std::fmt::Debug>(graph: &WeightedGraph<N>) -> TransitionMatrix {
    let index: std::collections::BTreeMap<&N, usize> =
        graph.nodes().enumerate().map(|(i, n)| (n, i)).collect();
    let n = index.len();
    let mut weights: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
    for (u, v, w) in graph.edges() {
        let (iu, iv) = (index[u], index[v]);
        weights[iu].push((iv, w));
        weights[iv].push((iu, w));
    }
    let mut rows = Vec::with_capacity(n);
    let mut active = Vec::with_capacity(n);
    for mut row in weights {
        row.sort_unstable_by_key(|(j, _)| *j);
        let strength: u64 = row.iter().map(|(_, w)| *w).sum();
        active.push(strength > 0);
        let s = strength as f64;
        rows.push(row.into_iter().map(|(j, w)| (j, w as f64 / s)).collect());
    }
    TransitionMatrix { rows, active }
}

fn require_active(matrix: &TransitionMatrix) -> Result<usize, GraphError> {
    let n_active = matrix.active_count();
    if n_active < 2 {
        return Err(GraphError::TooFewActiveNodes(n_active));
    }
    Ok(n_active)
}

fn determinism_bits(matrix: &TransitionMatrix, n_active: usize) -> f64 {
    let total_entropy: f64 = (0..matrix.dimension())
        .filter(|i| matrix.is_active(*i))
        .map(|i| shannon_entropy_bits(matrix.row(i).iter().map(|(_, p)| *p)))
        .sum();
    (n_active as f64).log2() - total_entropy / n_active as f64
}

fn degeneracy_bits(matrix: &TransitionMatrix, n_active: usize) -> f64 {
    (n_active as f64).log2() - shannon_entropy_bits(matrix.mean_active_row())
}

/// Average certainty of a random walker's next step, in bits.
pub fn determinism<N: Ord + Clone + std::fmt::Debug>(graph: &WeightedGraph<N>) -> Result<f64, GraphError> {
    let matrix = transition_matrix(graph);
    let n_active = require_active(&matrix)?;
    Ok(determinism_bits(&matrix, n_active))
}

/// Concentration of the walker's averaged target distribution, in bits.
pub fn degeneracy<N: Ord + Clone + std::fmt::Debug>(graph: &WeightedGraph<N>) -> Result<f64, GraphError> {
    let matrix = transition_matrix(graph);
    let n_active = require_active(&matrix)?;
    Ok(degeneracy_bits(&matrix, n_active))
}

/// Determinism, degeneracy and effective information of one graph, raw and normalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureMetrics {
    pub determinism_bits: f64,
    pub degeneracy_bits: f64,
    pub effective_information_bits: f64,
    pub determinism_norm: f64,
    pub degeneracy_norm: f64,
    pub effective_information_norm: f64,
    pub active_n: usize,
}

/// Computes all structure metrics from one transition matrix.
pub fn effective_information<N: Ord + Clone + std::fmt::Debug>(
    graph: &WeightedGraph<N>,
) -> Result<StructureMetrics, GraphError> {
    let matrix = transition_matrix(graph);
    let n_active = require_active(&matrix)?;
    let det = determinism_bits(&matrix, n_active);
    let deg = degeneracy_bits(&matrix, n_active);
    let max_bits = (n_active as f64).log2();
    Ok(StructureMetrics {
        determinism_bits: det,
        degeneracy_bits: deg,
        effective_information_bits: det - deg,
        determinism_norm: det / max_bits,
        degeneracy_norm: deg / max_bits,
        effective_information_norm: (det - deg) / max_bits,
        active_n: n_active,
    })
}
