//! Tab-separated edge-list serialization.
//!
//! One line per edge, `u\tv\tweight`, sorted by `(u, v)` with `u < v`,
//! followed by one `node\t0` line for every isolated node.

use std::fmt::Write as _;

use super::{GraphError, WeightedGraph};

pub fn write_edge_list(graph: &WeightedGraph<String>) -> String {
    let mut out = String::new();
    for (u, v, w) in graph.edges() {
        let _ = writeln!(out, "{u}\t{v}\t{w}");
    }
    let strengths = graph.strengths();
    for (node, strength) in strengths {
        if strength == 0 {
            let _ = writeln!(out, "{node}\t0");
        }
    }
    out
}

pub fn read_edge_list(text: &str) -> Result<WeightedGraph<String>, GraphError> {
    let mut graph = WeightedGraph::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        let bad = |reason: &str| GraphError::Format {
            line,
            reason: reason.to_string(),
        };
        match fields.as_slice() {
            [node, zero] => {
                if zero.trim() != "0" {
                    return Err(bad("node line must have weight 0"));
                }
                if node.is_empty() {
                    return Err(bad("empty node name"));
                }
                graph.add_node(node.to_string());
            }
            [u, v, w] => {
                let weight: u64 = w.trim().parse().map_err(|_| bad("weight is not a non-negative integer"))?;
                if u.is_empty() || v.is_empty() {
                    return Err(bad("empty node name"));
                }
                graph
                    .add_weight(u.to_string(), v.to_string(), weight)
                    .map_err(|e| bad(&e.to_string()))?;
            }
            _ => return Err(bad("expected 2 or 3 tab-separated fields")),
        }
    }
    Ok(graph)
}
