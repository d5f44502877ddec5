//! Exas-style structural feature vectors over usage graphs.
//!
//! Two feature families are counted: n-paths (simple directed paths of two
//! to four nodes, keyed by the interleaved node and edge labels) and
//! (p,q)-nodes (a node label together with its in- and out-degree over all
//! edges). Single nodes are not paths; they only contribute their
//! (p,q)-node feature. Every feature also carries an api flag: whether any
//! node it touches has non-empty API type information.

use std::collections::BTreeMap;
use std::fmt;

use crate::graph::{GraphEdge, UsageGraph, UsageGraphBuilder};

/// Longest counted path, in nodes.
const MAX_PATH_NODES: usize = 4;

/// One countable structural feature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureKey {
    /// Node label with its in-degree `p` and out-degree `q`.
    PqNode {
        label: String,
        incoming: usize,
        outgoing: usize,
    },
    /// Interleaved labels of a simple directed path: node, edge, node, ...
    /// Always an odd number of parts, between 3 (two nodes) and 7 (four).
    NPath { parts: Vec<String> },
}

impl fmt::Display for FeatureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureKey::PqNode {
                label,
                incoming,
                outgoing,
            } => write!(f, "{label}-{incoming}-{outgoing}"),
            FeatureKey::NPath { parts } => write!(f, "[{}]", parts.join(", ")),
        }
    }
}

/// Occurrence count and api flag of one feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureStat {
    pub count: u64,
    pub api: bool,
}

/// Feature multiset of one usage graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExasVector {
    entries: BTreeMap<FeatureKey, FeatureStat>,
}

impl ExasVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, key: &FeatureKey) -> u64 {
        self.entries.get(key).map_or(0, |s| s.count)
    }

    pub fn is_api(&self, key: &FeatureKey) -> bool {
        self.entries.get(key).is_some_and(|s| s.api)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FeatureKey, &FeatureStat)> {
        self.entries.iter()
    }

    fn bump(&mut self, key: FeatureKey, api: bool) {
        let stat = self
            .entries
            .entry(key)
            .or_insert(FeatureStat { count: 0, api: false });
        stat.count += 1;
        stat.api |= api;
    }

    /// Keeps only features whose api flag is set.
    pub fn filter_api_features(&self) -> ExasVector {
        ExasVector {
            entries: self
                .entries
                .iter()
                .filter(|(_, s)| s.api)
                .map(|(k, s)| (k.clone(), *s))
                .collect(),
        }
    }

    /// Replaces every count with 1. Idempotent.
    pub fn to_indicator(&self) -> ExasVector {
        ExasVector {
            entries: self
                .entries
                .iter()
                .map(|(k, s)| (k.clone(), FeatureStat { count: 1, api: s.api }))
                .collect(),
        }
    }

    /// Aligned counts of the features present in both vectors, in key order.
    pub fn shared_counts(&self, other: &ExasVector) -> Vec<(u64, u64)> {
        self.entries
            .iter()
            .filter_map(|(k, s)| other.entries.get(k).map(|o| (s.count, o.count)))
            .collect()
    }

    /// Number of features present in both vectors.
    pub fn shared_feature_count(&self, other: &ExasVector) -> usize {
        self.entries
            .keys()
            .filter(|k| other.entries.contains_key(*k))
            .count()
    }

    #[cfg(test)]
    pub(crate) fn from_entries(entries: BTreeMap<FeatureKey, FeatureStat>) -> Self {
        ExasVector { entries }
    }
}

/// Counts all (p,q)-node and n-path features of `g`.
pub fn vectorize(g: &UsageGraph) -> ExasVector {
    let mut vector = ExasVector::default();
    let n = g.node_count();

    for (i, node) in g.nodes().iter().enumerate() {
        vector.bump(
            FeatureKey::PqNode {
                label: node.label.clone(),
                incoming: g.in_degree(i),
                outgoing: g.out_degree(i),
            },
            !node.api_type.is_empty(),
        );
    }

    let mut adjacency: Vec<Vec<&GraphEdge>> = vec![Vec::new(); n];
    for e in g.edges() {
        if e.source < n && e.target < n {
            adjacency[e.source].push(e);
        }
    }
    for list in &mut adjacency {
        list.sort_by_key(|e| (e.target, e.label));
    }

    let mut on_path = vec![false; n];
    for start in 0..n {
        let mut parts = vec![g.node(start).label.clone()];
        on_path[start] = true;
        walk_paths(
            g,
            &adjacency,
            start,
            !g.node(start).api_type.is_empty(),
            1,
            &mut parts,
            &mut on_path,
            &mut vector,
        );
        on_path[start] = false;
    }
    vector
}

#[allow(clippy::too_many_arguments)]
fn walk_paths(
    g: &UsageGraph,
    adjacency: &[Vec<&GraphEdge>],
    current: usize,
    api_so_far: bool,
    nodes_on_path: usize,
    parts: &mut Vec<String>,
    on_path: &mut [bool],
    vector: &mut ExasVector,
) {
    if nodes_on_path == MAX_PATH_NODES {
        return;
    }
    for e in &adjacency[current] {
        if on_path[e.target] {
            continue;
        }
        let node = g.node(e.target);
        parts.push(e.label.to_string());
        parts.push(node.label.clone());
        let api = api_so_far || !node.api_type.is_empty();
        vector.bump(FeatureKey::NPath { parts: parts.clone() }, api);
        on_path[e.target] = true;
        walk_paths(
            g,
            adjacency,
            e.target,
            api,
            nodes_on_path + 1,
            parts,
            on_path,
            vector,
        );
        on_path[e.target] = false;
        parts.pop();
        parts.pop();
    }
}

/// Group label every node is routed to when a graph is split: the first
/// three dot-separated segments of the package part of its API type.
/// Unresolved types and bare class names share the `<misc>` group.
pub fn split_group_label(api_type: &str) -> String {
    if api_type.is_empty() || !api_type.contains('.') {
        return "<misc>".to_string();
    }
    let segments: Vec<&str> = api_type.split('.').collect();
    let package = &segments[..segments.len() - 1];
    let take = package.len().min(3);
    package[..take].join(".")
}

/// Splits a graph into per-package sub-graphs. Each node lands in exactly
/// one group; a group keeps only the edges internal to it.
pub fn split_graph(g: &UsageGraph) -> BTreeMap<String, UsageGraph> {
    let mut members: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, node) in g.nodes().iter().enumerate() {
        members
            .entry(split_group_label(&node.api_type))
            .or_default()
            .push(i);
    }
    members
        .into_iter()
        .map(|(label, indices)| {
            let mut remap = BTreeMap::new();
            let mut b =
                UsageGraphBuilder::new(format!("{}#{}", g.method_id(), label));
            for &i in &indices {
                let node = g.node(i);
                remap.insert(
                    i,
                    b.add_node(node.kind, node.label.clone(), node.api_type.clone()),
                );
            }
            for e in g.edges() {
                if let (Some(&s), Some(&t)) = (remap.get(&e.source), remap.get(&e.target)) {
                    b.add_edge(s, t, e.label);
                }
            }
            (label, b.build())
        })
        .collect()
}
