//! Weighted undirected interaction graphs.
//!
//! Edge weights are exact integer interaction counts. Probabilities are only
//! materialized when a [`TransitionMatrix`] is derived for the structure
//! metrics in [`metrics`].

pub mod edge_list;
pub mod metrics;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use metrics::{
    degeneracy, determinism, effective_information, shannon_entropy_bits, transition_matrix,
    StructureMetrics, TransitionMatrix,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop rejected: {0}")]
    SelfLoop(String),
    #[error("unknown node: {0}")]
    UnknownNode(String),
    #[error("graph has no non-isolated nodes")]
    NoActiveNodes,
    #[error("structure metrics need at least 2 non-isolated nodes, found {0}")]
    TooFewActiveNodes(usize),
    #[error("edge weight must be positive (edge {0})")]
    ZeroWeight(String),
    #[error("edge list line {line}: {reason}")]
    Format { line: usize, reason: String },
}

/// An undirected graph whose edges carry positive integer weights.
///
/// Each unordered pair is stored once under `(min, max)`, so symmetry holds
/// by construction. Nodes may be isolated (present with no incident edge).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph<N: Ord = String> {
    nodes: BTreeSet<N>,
    edges: BTreeMap<(N, N), u64>,
}

impl<N: Ord> Default for WeightedGraph<N> {
    fn default() -> Self {
        Self {
            nodes: BTreeSet::new(),
            edges: BTreeMap::new(),
        }
    }
}

fn ordered<N: Ord>(u: N, v: N) -> (N, N) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

impl<N: Ord + Clone + std::fmt::Debug> WeightedGraph<N> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node without edges. Existing nodes are left untouched.
    pub fn add_node(&mut self, node: N) {
        self.nodes.insert(node);
    }

    /// Records one interaction between `u` and `v`.
    pub fn add_interaction(&mut self, u: N, v: N) -> Result<(), GraphError> {
        self.add_weight(u, v, 1)
    }

    /// Adds `weight` interactions between `u` and `v` at once.
    pub fn add_weight(&mut self, u: N, v: N, weight: u64) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(format!("{u:?}")));
        }
        if weight == 0 {
            return Err(GraphError::ZeroWeight(format!("{u:?} - {v:?}")));
        }
        self.nodes.insert(u.clone());
        self.nodes.insert(v.clone());
        *self.edges.entry(ordered(u, v)).or_insert(0) += weight;
        Ok(())
    }

    /// Weight of the unordered pair; 0 when the pair is not linked.
    pub fn weight(&self, u: &N, v: &N) -> u64 {
        let key = ordered(u.clone(), v.clone());
        self.edges.get(&key).copied().unwrap_or(0)
    }

    pub fn contains(&self, node: &N) -> bool {
        self.nodes.contains(node)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Nodes in their canonical (sorted) order.
    pub fn nodes(&self) -> impl Iterator<Item = &N> {
        self.nodes.iter()
    }

    /// Edges as `(u, v, weight)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (&N, &N, u64)> {
        self.edges.iter().map(|((u, v), w)| (u, v, *w))
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Sum of weights of the edges incident to `node`.
    pub fn node_strength(&self, node: &N) -> Result<u64, GraphError> {
        if !self.nodes.contains(node) {
            return Err(GraphError::UnknownNode(format!("{node:?}")));
        }
        Ok(self
            .edges
            .iter()
            .filter(|((u, v), _)| u == node || v == node)
            .map(|(_, w)| *w)
            .sum())
    }

    /// Strength of every node, in node order.
    pub fn strengths(&self) -> BTreeMap<&N, u64> {
        let mut out: BTreeMap<&N, u64> = self.nodes.iter().map(|n| (n, 0)).collect();
        for ((u, v), w) in &self.edges {
            *out.get_mut(u).expect("edge endpoint is a node") += w;
            *out.get_mut(v).expect("edge endpoint is a node") += w;
        }
        out
    }

    /// Number of nodes with at least one incident edge.
    pub fn active_count(&self) -> usize {
        self.strengths().values().filter(|s| **s > 0).count()
    }

    /// Mean strength over non-isolated nodes.
    pub fn average_strength(&self) -> Result<f64, GraphError> {
        let strengths = self.strengths();
        let active: Vec<u64> = strengths.values().copied().filter(|s| *s > 0).collect();
        if active.is_empty() {
            return Err(GraphError::NoActiveNodes);
        }
        Ok(active.iter().sum::<u64>() as f64 / active.len() as f64)
    }

    /// Returns a copy with every node mapped through `f`. `f` must be injective.
    pub fn relabel<M: Ord + Clone + std::fmt::Debug>(&self, mut f: impl FnMut(&N) -> M) -> WeightedGraph<M> {
        let mut out = WeightedGraph::new();
        for n in &self.nodes {
            out.add_node(f(n));
        }
        for ((u, v), w) in &self.edges {
            out.add_weight(f(u), f(v), *w)
                .expect("relabel must be injective");
        }
        out
    }
}
