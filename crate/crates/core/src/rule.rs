//! Change-rule inference: comparing the usage graph of a flawed method
//! version against its corrected version and distilling the difference into
//! a reusable rule.
//!
//! The inference pipeline:
//!
//! 1. Both graphs are brought to the same node count by padding the smaller
//!    side with placeholder (epsilon) nodes, and the textual-order relation
//!    of each side is transitively closed.
//! 2. A cost is assigned to every cross-graph node pair — label mismatch
//!    plus the symmetric difference of the incoming and outgoing edge-label
//!    multisets — and to every node-versus-placeholder pair (one plus the
//!    node's degree). A minimum-cost bijection between the two node sets is
//!    computed; ties are broken toward the lexicographically smallest
//!    assignment so inference is deterministic.
//! 3. Pairs with positive cost are retained: they capture what changed.
//! 4. The retained set is widened twice so the rule keeps its anchoring
//!    context: first by mapped pairs adjacent to a retained node through a
//!    data-flow or finally edge (in either direction), then by mapped pairs
//!    reachable from those newly added nodes over one outgoing data-flow
//!    edge.
//! 5. The rule's two sides are the subgraphs induced by the retained pairs,
//!    index-aligned (node `k` on the flawed side corresponds to node `k` on
//!    the corrected side), with the order relation transitively reduced.
//!    Pairs where both members are real nodes are recorded as transform
//!    links.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::assignment::kuhn_munkres;
use crate::graph::{EdgeLabel, NodeKind, UsageGraph, UsageGraphBuilder};

/// Label of the placeholder nodes that stand in for "no counterpart".
pub const EPSILON_LABEL: &str = "<eps>";

/// Edge labels that anchor neighbourhood widening (step 4 above).
const ANCHOR_LABELS: [EdgeLabel; 4] =
    [EdgeLabel::Recv, EdgeLabel::Para, EdgeLabel::Def, EdgeLabel::Finally];

/// Edge labels followed by the second widening step.
const DATA_FLOW_LABELS: [EdgeLabel; 3] = [EdgeLabel::Recv, EdgeLabel::Para, EdgeLabel::Def];

/// A change rule: the flawed-side pattern, the corrected-side pattern, and
/// the node correspondence between them. The two sides have the same node
/// count and are index-aligned; `transform` lists the indices whose nodes
/// are real on both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeRule {
    /// Identifier of the method pair the rule was inferred from.
    pub origin: String,
    /// Pattern present in the flawed version.
    pub misuse: UsageGraph,
    /// Pattern present in the corrected version.
    pub fix: UsageGraph,
    /// Index pairs `(flawed, corrected)` linking nodes that exist on both
    /// sides. With index-aligned sides the two members are always equal;
    /// they are stored as pairs to keep the correspondence explicit.
    pub transform: Vec<(usize, usize)>,
}

impl ChangeRule {
    /// A rule with nothing on either side detects nothing.
    pub fn is_empty(&self) -> bool {
        self.misuse.is_empty() && self.fix.is_empty()
    }

    /// Renders the rule interchange document.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rule serialization cannot fail")
    }

    /// Parses a rule interchange document and checks its shape.
    pub fn from_json(text: &str) -> Result<ChangeRule, RuleReadError> {
        let rule: ChangeRule = serde_json::from_str(text)?;
        if rule.misuse.node_count() != rule.fix.node_count() {
            return Err(RuleReadError::Shape(format!(
                "rule sides must be index-aligned: {} vs {} nodes",
                rule.misuse.node_count(),
                rule.fix.node_count()
            )));
        }
        for &(flawed, corrected) in &rule.transform {
            if flawed >= rule.misuse.node_count() || corrected >= rule.fix.node_count() {
                return Err(RuleReadError::Shape(format!(
                    "transform pair ({flawed}, {corrected}) is out of range"
                )));
            }
        }
        Ok(rule)
    }
}

/// Error raised while reading a rule document.
#[derive(Debug, thiserror::Error)]
pub enum RuleReadError {
    #[error("rule document rejected: {0}")]
    Json(#[from] serde_json::Error),
    #[error("rule document rejected: {0}")]
    Shape(String),
}

/// The cost of treating node `flawed` of `gm` and node `corrected` of `gf`
/// as counterparts: one if the labels differ, plus the size of the symmetric
/// difference of the incoming edge-label multisets, plus the same for the
/// outgoing multisets. Zero means the nodes are indistinguishable.
pub fn node_cost(gm: &UsageGraph, flawed: usize, gf: &UsageGraph, corrected: usize) -> u64 {
    let label_cost = u64::from(gm.node(flawed).label != gf.node(corrected).label);
    let incoming = multiset_symdiff(
        label_multiset(gm.in_edges(flawed).map(|e| e.label)),
        label_multiset(gf.in_edges(corrected).map(|e| e.label)),
    );
    let outgoing = multiset_symdiff(
        label_multiset(gm.out_edges(flawed).map(|e| e.label)),
        label_multiset(gf.out_edges(corrected).map(|e| e.label)),
    );
    label_cost + incoming + outgoing
}

/// The cost of leaving node `index` of `g` without a counterpart: one for
/// the label plus every incident edge.
pub fn epsilon_cost(g: &UsageGraph, index: usize) -> u64 {
    1 + (g.in_degree(index) + g.out_degree(index)) as u64
}

fn label_multiset(labels: impl Iterator<Item = EdgeLabel>) -> BTreeMap<EdgeLabel, u64> {
    let mut counts = BTreeMap::new();
    for label in labels {
        *counts.entry(label).or_insert(0) += 1;
    }
    counts
}

fn multiset_symdiff(a: BTreeMap<EdgeLabel, u64>, b: BTreeMap<EdgeLabel, u64>) -> u64 {
    let mut diff = 0;
    for (label, &count) in &a {
        diff += count.abs_diff(b.get(label).copied().unwrap_or(0));
    }
    for (label, &count) in &b {
        if !a.contains_key(label) {
            diff += count;
        }
    }
    diff
}

/// One matched pair of the minimum-cost bijection. `None` stands for a
/// padding placeholder on that side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MappedPair {
    pub flawed: Option<usize>,
    pub corrected: Option<usize>,
    pub cost: u64,
}

/// The minimum-cost node bijection between two (padded) graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeMapping {
    /// All pairs, by ascending flawed-side index; placeholder rows follow
    /// the real rows.
    pub pairs: Vec<MappedPair>,
    pub total_cost: u64,
}

/// Computes the minimum-cost bijection between the nodes of the two graphs,
/// padding the smaller side with placeholders. Both graphs should already
/// carry their closed order relation; this function does not close them.
pub fn map_nodes(gm: &UsageGraph, gf: &UsageGraph) -> NodeMapping {
    let rows = gm.node_count().max(gf.node_count());
    let mut matrix = vec![vec![0u64; rows]; rows];
    #[allow(clippy::needless_range_loop)]
    for i in 0..rows {
        for j in 0..rows {
            matrix[i][j] = match (i < gm.node_count(), j < gf.node_count()) {
                (true, true) => node_cost(gm, i, gf, j),
                (true, false) => epsilon_cost(gm, i),
                (false, true) => epsilon_cost(gf, j),
                (false, false) => 0,
            };
        }
    }
    let solved = kuhn_munkres(&matrix).expect("cost matrix is square by construction");
    let pairs = solved
        .row_to_col
        .iter()
        .enumerate()
        .map(|(i, &j)| MappedPair {
            flawed: (i < gm.node_count()).then_some(i),
            corrected: (j < gf.node_count()).then_some(j),
            cost: matrix[i][j],
        })
        .collect();
    NodeMapping { pairs, total_cost: solved.total_cost }
}

/// Selects the pairs that make up the rule: every positive-cost pair, then
/// the two context-widening passes described at module level. The returned
/// pairs preserve discovery order (changed pairs first, then the widening
/// additions).
pub fn select_pairs(gm: &UsageGraph, gf: &UsageGraph, mapping: &NodeMapping) -> Vec<MappedPair> {
    let mut selected: Vec<MappedPair> = Vec::new();
    let mut taken: HashSet<(Option<usize>, Option<usize>)> = HashSet::new();
    let mut flawed_members: HashSet<usize> = HashSet::new();
    let mut corrected_members: HashSet<usize> = HashSet::new();

    for pair in &mapping.pairs {
        if pair.cost > 0 {
            selected.push(*pair);
            taken.insert((pair.flawed, pair.corrected));
            if let Some(index) = pair.flawed {
                flawed_members.insert(index);
            }
            if let Some(index) = pair.corrected {
                corrected_members.insert(index);
            }
        }
    }
    if selected.is_empty() {
        return selected;
    }

    let anchored = |g: &UsageGraph, node: usize, members: &HashSet<usize>| {
        g.in_edges(node)
            .filter(|e| ANCHOR_LABELS.contains(&e.label))
            .any(|e| members.contains(&e.source))
            || g.out_edges(node)
                .filter(|e| ANCHOR_LABELS.contains(&e.label))
                .any(|e| members.contains(&e.target))
    };

    // First widening pass: mapped pairs touching a changed node through an
    // anchoring edge. Anchoring is judged against the changed set only, so
    // the pass does not cascade.
    let mut widened: Vec<MappedPair> = Vec::new();
    for pair in &mapping.pairs {
        if taken.contains(&(pair.flawed, pair.corrected)) {
            continue;
        }
        let hooked = match (pair.flawed, pair.corrected) {
            (Some(flawed), Some(corrected)) => {
                anchored(gm, flawed, &flawed_members) || anchored(gf, corrected, &corrected_members)
            }
            _ => false,
        };
        if hooked {
            selected.push(*pair);
            taken.insert((pair.flawed, pair.corrected));
            widened.push(*pair);
        }
    }

    // Second widening pass: follow one outgoing data-flow edge from the
    // nodes just added and pull in the mapped pair of each target.
    let pair_of_flawed: HashMap<usize, MappedPair> = mapping
        .pairs
        .iter()
        .filter_map(|p| p.flawed.map(|index| (index, *p)))
        .collect();
    let pair_of_corrected: HashMap<usize, MappedPair> = mapping
        .pairs
        .iter()
        .filter_map(|p| p.corrected.map(|index| (index, *p)))
        .collect();
    for pair in widened {
        let mut reached: Vec<MappedPair> = Vec::new();
        if let Some(flawed) = pair.flawed {
            for edge in gm.out_edges(flawed).filter(|e| DATA_FLOW_LABELS.contains(&e.label)) {
                if let Some(&next) = pair_of_flawed.get(&edge.target) {
                    reached.push(next);
                }
            }
        }
        if let Some(corrected) = pair.corrected {
            for edge in gf.out_edges(corrected).filter(|e| DATA_FLOW_LABELS.contains(&e.label)) {
                if let Some(&next) = pair_of_corrected.get(&edge.target) {
                    reached.push(next);
                }
            }
        }
        for next in reached {
            if taken.insert((next.flawed, next.corrected)) {
                selected.push(next);
            }
        }
    }
    selected
}

/// Infers the change rule for a flawed/corrected method pair. The inputs
/// are closed over the order relation first (a side whose order relation is
/// cyclic is used as given); the resulting rule sides carry a transitively
/// reduced order relation. The rule's origin is the flawed graph's method
/// id.
pub fn build_change_rule(misuse: &UsageGraph, fix: &UsageGraph) -> ChangeRule {
    let gm = misuse.order_closure().unwrap_or_else(|_| misuse.clone());
    let gf = fix.order_closure().unwrap_or_else(|_| fix.clone());
    let mapping = map_nodes(&gm, &gf);
    let pairs = select_pairs(&gm, &gf, &mapping);

    let mut flawed_index: HashMap<usize, usize> = HashMap::new();
    let mut corrected_index: HashMap<usize, usize> = HashMap::new();
    let mut flawed_side = UsageGraphBuilder::new(gm.method_id());
    let mut corrected_side = UsageGraphBuilder::new(gf.method_id());
    let mut transform = Vec::new();
    for (slot, pair) in pairs.iter().enumerate() {
        match pair.flawed {
            Some(original) => {
                let node = gm.node(original);
                flawed_side.add_node(node.kind, &node.label, &node.api_type);
                flawed_index.insert(original, slot);
            }
            None => {
                flawed_side.data(EPSILON_LABEL, "");
            }
        }
        match pair.corrected {
            Some(original) => {
                let node = gf.node(original);
                corrected_side.add_node(node.kind, &node.label, &node.api_type);
                corrected_index.insert(original, slot);
            }
            None => {
                corrected_side.data(EPSILON_LABEL, "");
            }
        }
        if pair.flawed.is_some() && pair.corrected.is_some() {
            transform.push((slot, slot));
        }
    }
    for edge in gm.edges() {
        if let (Some(&source), Some(&target)) =
            (flawed_index.get(&edge.source), flawed_index.get(&edge.target))
        {
            flawed_side.add_edge(source, target, edge.label);
        }
    }
    for edge in gf.edges() {
        if let (Some(&source), Some(&target)) =
            (corrected_index.get(&edge.source), corrected_index.get(&edge.target))
        {
            corrected_side.add_edge(source, target, edge.label);
        }
    }
    ChangeRule {
        origin: misuse.method_id().to_owned(),
        misuse: flawed_side.build().transitive_reduce_order(),
        fix: corrected_side.build().transitive_reduce_order(),
        transform,
    }
}

/// True when the node stands for "no counterpart" on a rule side.
pub fn is_epsilon(g: &UsageGraph, index: usize) -> bool {
    g.node(index).kind == NodeKind::Data && g.node(index).label == EPSILON_LABEL
}
