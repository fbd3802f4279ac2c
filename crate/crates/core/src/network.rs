//! Per-project direct-communication networks and member coverage.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::graph::WeightedGraph;
use crate::wikitext::PostRecord;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("project {0:?} has no members")]
    NoMembers(String),
    #[error("no quality entry for project {0:?}")]
    MissingQuality(String),
}

/// Which posts become edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EdgeScope {
    /// Author and page owner must both be project members.
    #[default]
    MembersOnly,
    /// At least one endpoint must be a member; non-members become extra nodes.
    AnyMemberEndpoint,
}

/// Folds posts into an undirected interaction graph for one project.
///
/// A post by `A` on the talk page of `B` adds one interaction `A - B` when
/// `A != B` and the pair is in scope. Every member is a node, so members
/// without counted interactions appear as isolated nodes. Mass-message posts
/// are skipped.
pub fn build_network(posts: &[PostRecord], members: &BTreeSet<String>, scope: EdgeScope) -> WeightedGraph<String> {
    let mut graph = WeightedGraph::new();
    for m in members {
        graph.add_node(m.clone());
    }
    for post in posts {
        if post.mass_message || post.author == post.page_owner {
            continue;
        }
        let author_in = members.contains(&post.author);
        let owner_in = members.contains(&post.page_owner);
        let counted = match scope {
            EdgeScope::MembersOnly => author_in && owner_in,
            EdgeScope::AnyMemberEndpoint => author_in || owner_in,
        };
        if counted {
            graph
                .add_interaction(post.author.clone(), post.page_owner.clone())
                .expect("author differs from owner");
        }
    }
    graph
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectRecord {
    pub project: String,
    pub members: BTreeSet<String>,
    #[serde(skip)]
    pub network: WeightedGraph<String>,
    pub member_count: usize,
    /// Members with at least one counted interaction.
    pub active_members: usize,
    pub fraction_in_network: f64,
}

impl ProjectRecord {
    pub fn new(
        project: impl Into<String>,
        members: BTreeSet<String>,
        network: WeightedGraph<String>,
    ) -> Result<Self, NetworkError> {
        let project = project.into();
        if members.is_empty() {
            return Err(NetworkError::NoMembers(project));
        }
        let active_members = network
            .strengths()
            .into_iter()
            .filter(|(node, s)| *s > 0 && members.contains(*node))
            .count();
        let member_count = members.len();
        Ok(Self {
            project,
            members,
            network,
            member_count,
            active_members,
            fraction_in_network: active_members as f64 / member_count as f64,
        })
    }

    /// Non-isolated nodes of the network.
    pub fn active_nodes(&self) -> usize {
        self.network.active_count()
    }
}

/// Keeps projects with at least `min_active_nodes` non-isolated network nodes
/// and at least one FA/GA article. Input order is preserved.
pub fn filter_projects(
    records: &[ProjectRecord],
    quality_counts: &BTreeMap<String, u64>,
    min_active_nodes: usize,
) -> Result<Vec<ProjectRecord>, NetworkError> {
    let mut kept = Vec::new();
    for record in records {
        let n_quality = quality_counts
            .get(&record.project)
            .ok_or_else(|| NetworkError::MissingQuality(record.project.clone()))?;
        if record.active_nodes() >= min_active_nodes && *n_quality >= 1 {
            kept.push(record.clone());
        }
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn post(author: &str, owner: &str) -> PostRecord {
        PostRecord {
            page_owner: owner.into(),
            thread: "t".into(),
            author: author.into(),
            timestamp: "2020-01-01T00:00:00Z".into(),
            depth: 0,
            mass_message: false,
        }
    }

    fn members(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn counts_messages_both_directions() {
        let posts = vec![post("A", "B"), post("A", "B"), post("B", "A")];
        let g = build_network(&posts, &members(&["A", "B"]), EdgeScope::MembersOnly);
        assert_eq!(g.weight(&"A".into(), &"B".into()), 3);
    }

    #[test]
    fn own_page_and_non_members_excluded() {
        let posts = vec![post("A", "A"), post("A", "C")];
        let g = build_network(&posts, &members(&["A", "B"]), EdgeScope::MembersOnly);
        assert_eq!(g.edge_count(), 0);
        assert!(!g.contains(&"C".to_string()));
        assert_eq!(g.node_count(), 2);

        let g = build_network(&posts, &members(&["A", "B"]), EdgeScope::AnyMemberEndpoint);
        assert_eq!(g.weight(&"A".into(), &"C".into()), 1);
    }

    #[test]
    fn mass_messages_skipped() {
        let mut p = post("A", "B");
        p.mass_message = true;
        let g = build_network(&[p], &members(&["A", "B"]), EdgeScope::MembersOnly);
        assert_eq!(g.total_weight(), 0);
    }

    #[test]
    fn fraction_in_network() {
        let names: Vec<String> = (0..10).map(|i| format!("U{i}")).collect();
        let set: BTreeSet<String> = names.iter().cloned().collect();
        let posts = vec![post("U0", "U1"), post("U2", "U3"), post("U4", "U0")];
        let g = build_network(&posts, &set, EdgeScope::MembersOnly);
        let rec = ProjectRecord::new("P", set.clone(), g).unwrap();
        assert_eq!(rec.member_count, 10);
        assert_eq!(rec.active_nodes(), 5);
        assert_eq!(rec.fraction_in_network, 0.5);

        let idle = ProjectRecord::new("Q", set.clone(), build_network(&[], &set, EdgeScope::MembersOnly)).unwrap();
        assert_eq!(idle.fraction_in_network, 0.0);

        assert_eq!(
            ProjectRecord::new("E", BTreeSet::new(), WeightedGraph::new()),
            Err(NetworkError::NoMembers("E".into()))
        );
    }

    fn record_with_active(name: &str, active: usize) -> ProjectRecord {
        let set: BTreeSet<String> = (0..active.max(1)).map(|i| format!("U{i}")).collect();
        let posts: Vec<PostRecord> = (1..active).map(|i| post("U0", &format!("U{i}"))).collect();
        let g = build_network(&posts, &set, EdgeScope::MembersOnly);
        ProjectRecord::new(name, set, g).unwrap()
    }

    #[test]
    fn filter_thresholds() {
        let records = vec![record_with_active("Four", 4), record_with_active("Five", 5), record_with_active("Dry", 6)];
        assert_eq!(records[0].active_nodes(), 4);
        let quality: BTreeMap<String, u64> = [("Four", 3), ("Five", 2), ("Dry", 0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let kept = filter_projects(&records, &quality, 5).unwrap();
        let names: Vec<_> = kept.iter().map(|r| r.project.as_str()).collect();
        assert_eq!(names, ["Five"]);
        assert_eq!(filter_projects(&kept, &quality, 5).unwrap(), kept);
    }

    #[test]
    fn filter_missing_quality_names_project() {
        let records = vec![record_with_active("Lost", 5)];
        assert_eq!(
            filter_projects(&records, &BTreeMap::new(), 5),
            Err(NetworkError::MissingQuality("Lost".into()))
        );
    }
}
