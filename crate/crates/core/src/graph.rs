//! API usage graphs: directed labeled multigraphs describing one method's
//! API usage.
//!
//! Data nodes stand for objects and constants, Action nodes for calls,
//! constructor invocations and returns. Edges carry one of a fixed set of
//! labels, each belonging to a family: `sel`, `order` and `finally` are
//! control flow; `recv`, `para` and `def` are data flow; `transform` marks
//! node correspondence inside change rules. At most one edge exists per
//! (source, target, label) triple; parallel edges must differ in label.
//! Node identity is positional: the node index within the graph.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserialize, Deserializer};
use serde::ser::{Serialize, Serializer};

/// Node kind. Data nodes carry a type name, a constant literal or `UNKNOWN`;
/// Action nodes carry a call signature, `Type.<init>` or `<return>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Data,
    Action,
}

/// Edge label family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeFamily {
    ControlFlow,
    DataFlow,
    Transform,
}

/// Edge label. The label fixes the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeLabel {
    /// Condition action guards an action in its then-block.
    Sel,
    /// Source action textually precedes the target action (kept transitively
    /// closed on full usage graphs).
    Order,
    /// Source action sits in a try-block whose finally-block holds the target.
    Finally,
    /// Receiver object flows into a call.
    Recv,
    /// Argument flows into a call.
    Para,
    /// Call or constructor result defines a data node.
    Def,
    /// Misuse-side node corresponds to a fix-side node within a change rule.
    Transform,
}

pub const EDGE_LABELS: [EdgeLabel; 7] = [
    EdgeLabel::Sel,
    EdgeLabel::Order,
    EdgeLabel::Finally,
    EdgeLabel::Recv,
    EdgeLabel::Para,
    EdgeLabel::Def,
    EdgeLabel::Transform,
];

impl EdgeLabel {
    pub fn family(self) -> EdgeFamily {
        match self {
            EdgeLabel::Sel | EdgeLabel::Order | EdgeLabel::Finally => EdgeFamily::ControlFlow,
            EdgeLabel::Recv | EdgeLabel::Para | EdgeLabel::Def => EdgeFamily::DataFlow,
            EdgeLabel::Transform => EdgeFamily::Transform,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeLabel::Sel => "sel",
            EdgeLabel::Order => "order",
            EdgeLabel::Finally => "finally",
            EdgeLabel::Recv => "recv",
            EdgeLabel::Para => "para",
            EdgeLabel::Def => "def",
            EdgeLabel::Transform => "transform",
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EdgeLabel {
    type Err = UnknownEdgeLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sel" => Ok(EdgeLabel::Sel),
            "order" => Ok(EdgeLabel::Order),
            "finally" => Ok(EdgeLabel::Finally),
            "recv" => Ok(EdgeLabel::Recv),
            "para" => Ok(EdgeLabel::Para),
            "def" => Ok(EdgeLabel::Def),
            "transform" => Ok(EdgeLabel::Transform),
            other => Err(UnknownEdgeLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown edge label `{0}`")]
pub struct UnknownEdgeLabel(pub String);

impl Serialize for EdgeLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for EdgeLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// One node of a usage graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct GraphNode {
    pub kind: NodeKind,
    pub label: String,
    /// Fully qualified type of the referred API member, or empty when
    /// unresolved.
    pub api_type: String,
}

/// One edge of a usage graph. Endpoints are node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct GraphEdge {
    #[serde(rename = "src")]
    pub source: usize,
    #[serde(rename = "dst")]
    pub target: usize,
    pub label: EdgeLabel,
}

/// Directed labeled multigraph of one method's API usage.
///
/// Immutable after construction; build through [`UsageGraphBuilder`] or
/// [`UsageGraph::from_parts`]. Both collapse duplicate (source, target,
/// label) triples, keeping the first occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageGraph {
    method_id: String,
    nodes: Vec<GraphNode>,
    edges: Vec<GraphEdge>,
}

impl UsageGraph {
    pub fn from_parts(
        method_id: impl Into<String>,
        nodes: Vec<GraphNode>,
        edges: Vec<GraphEdge>,
    ) -> Self {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut deduped = Vec::with_capacity(edges.len());
        for e in edges {
            if seen.insert((e.source, e.target, e.label)) {
                deduped.push(e);
            }
        }
        UsageGraph {
            method_id: method_id.into(),
            nodes,
            edges: deduped,
        }
    }

    pub fn method_id(&self) -> &str {
        &self.method_id
    }

    pub fn with_method_id(mut self, method_id: impl Into<String>) -> Self {
        self.method_id = method_id.into();
        self
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, index: usize) -> &GraphNode {
        &self.nodes[index]
    }

    pub fn has_edge(&self, source: usize, target: usize, label: EdgeLabel) -> bool {
        self.edges
            .iter()
            .any(|e| e.source == source && e.target == target && e.label == label)
    }

    pub fn in_edges(&self, node: usize) -> impl Iterator<Item = &GraphEdge> {
        self.edges.iter().filter(move |e| e.target == node)
    }

    pub fn out_edges(&self, node: usize) -> impl Iterator<Item = &GraphEdge> {
        self.edges.iter().filter(move |e| e.source == node)
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.in_edges(node).count()
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out_edges(node).count()
    }

    pub fn edges_with_label(&self, label: EdgeLabel) -> impl Iterator<Item = &GraphEdge> {
        self.edges.iter().filter(move |e| e.label == label)
    }

    /// Checks every type invariant and returns the full violation list.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.nodes.len();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.label.is_empty() {
                violations.push(Violation::EmptyNodeLabel { node: i });
            }
            match node.kind {
                NodeKind::Data => {
                    if node.label.ends_with("()") && node.label.contains('.') {
                        violations.push(Violation::DataNodeCallLabel {
                            node: i,
                            label: node.label.clone(),
                        });
                    }
                }
                NodeKind::Action => {
                    if node.label == "UNKNOWN" {
                        violations.push(Violation::ActionNodeUnknownLabel { node: i });
                    }
                }
            }
        }
        let mut seen = HashSet::new();
        for (idx, e) in self.edges.iter().enumerate() {
            if e.source >= n || e.target >= n {
                violations.push(Violation::DanglingEdge {
                    edge: idx,
                    source: e.source,
                    target: e.target,
                });
                continue;
            }
            if e.label == EdgeLabel::Order && e.source == e.target {
                violations.push(Violation::OrderSelfLoop { node: e.source });
            }
            if !seen.insert((e.source, e.target, e.label)) {
                violations.push(Violation::DuplicateEdge {
                    source: e.source,
                    target: e.target,
                    label: e.label,
                });
            }
        }
        ValidationReport { violations }
    }

    /// True when the subgraph restricted to `labels` has no directed cycle.
    pub fn is_acyclic(&self, labels: &[EdgeLabel]) -> bool {
        let n = self.nodes.len();
        let mut indegree = vec![0usize; n];
        let mut adjacency = vec![Vec::new(); n];
        for e in &self.edges {
            if labels.contains(&e.label) && e.source < n && e.target < n {
                adjacency[e.source].push(e.target);
                indegree[e.target] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut visited = 0usize;
        while let Some(v) = queue.pop() {
            visited += 1;
            for &w in &adjacency[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push(w);
                }
            }
        }
        visited == n
    }

    /// Adds every transitively implied `order` edge. All other edges are kept
    /// untouched; an already closed graph comes back unchanged. Idempotent.
    pub fn order_closure(&self) -> Result<UsageGraph, OrderCycleError> {
        if !self.is_acyclic(&[EdgeLabel::Order]) {
            return Err(OrderCycleError);
        }
        let reach = self.reachability(EdgeLabel::Order);
        let mut edges = self.edges.clone();
        let mut present: HashSet<(usize, usize)> = self
            .edges_with_label(EdgeLabel::Order)
            .map(|e| (e.source, e.target))
            .collect();
        for u in 0..self.nodes.len() {
            for v in 0..self.nodes.len() {
                if u != v && reach[u][v] && present.insert((u, v)) {
                    edges.push(GraphEdge {
                        source: u,
                        target: v,
                        label: EdgeLabel::Order,
                    });
                }
            }
        }
        Ok(UsageGraph {
            method_id: self.method_id.clone(),
            nodes: self.nodes.clone(),
            edges,
        })
    }

    /// Replaces the `order` edge set with its unique minimum equivalent
    /// subset: same order-reachability, fewest edges. Only defined on acyclic
    /// order relations; a cyclic one leaves the graph unchanged. Every other
    /// edge survives as is.
    pub fn transitive_reduce_order(&self) -> UsageGraph {
        if !self.is_acyclic(&[EdgeLabel::Order]) {
            return self.clone();
        }
        let reach = self.reachability(EdgeLabel::Order);
        let order_out: Vec<Vec<usize>> = {
            let mut adj = vec![Vec::new(); self.nodes.len()];
            for e in self.edges_with_label(EdgeLabel::Order) {
                adj[e.source].push(e.target);
            }
            adj
        };
        // On a DAG an order edge (u, v) is redundant exactly when some other
        // direct successor of u still reaches v.
        let redundant =
            |u: usize, v: usize| order_out[u].iter().any(|&w| w != v && reach[w][v]);
        let edges = self
            .edges
            .iter()
            .filter(|e| {
                e.label != EdgeLabel::Order || !redundant(e.source, e.target)
            })
            .cloned()
            .collect();
        UsageGraph {
            method_id: self.method_id.clone(),
            nodes: self.nodes.clone(),
            edges,
        }
    }

    /// reach[u][v]: v reachable from u via one or more `label` edges.
    fn reachability(&self, label: EdgeLabel) -> Vec<Vec<bool>> {
        let n = self.nodes.len();
        let mut adjacency = vec![Vec::new(); n];
        for e in self.edges_with_label(label) {
            if e.source < n && e.target < n {
                adjacency[e.source].push(e.target);
            }
        }
        let mut reach = vec![vec![false; n]; n];
        for start in 0..n {
            let mut stack: Vec<usize> = adjacency[start].clone();
            while let Some(v) = stack.pop() {
                if !reach[start][v] {
                    reach[start][v] = true;
                    stack.extend(adjacency[v].iter().copied());
                }
            }
        }
        reach
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("order edges form a cycle")]
pub struct OrderCycleError;

/// Incremental construction of a usage graph.
#[derive(Debug, Clone)]
pub struct UsageGraphBuilder {
    method_id: String,
    nodes: Vec<GraphNode>,
    edges: Vec<GraphEdge>,
    seen: HashSet<(usize, usize, EdgeLabel)>,
}

impl UsageGraphBuilder {
    pub fn new(method_id: impl Into<String>) -> Self {
        UsageGraphBuilder {
            method_id: method_id.into(),
            nodes: Vec::new(),
            edges: Vec::new(),
            seen: HashSet::new(),
        }
    }

    pub fn add_node(
        &mut self,
        kind: NodeKind,
        label: impl Into<String>,
        api_type: impl Into<String>,
    ) -> usize {
        self.nodes.push(GraphNode {
            kind,
            label: label.into(),
            api_type: api_type.into(),
        });
        self.nodes.len() - 1
    }

    pub fn data(&mut self, label: impl Into<String>, api_type: impl Into<String>) -> usize {
        self.add_node(NodeKind::Data, label, api_type)
    }

    pub fn action(&mut self, label: impl Into<String>, api_type: impl Into<String>) -> usize {
        self.add_node(NodeKind::Action, label, api_type)
    }

    /// Duplicate (source, target, label) triples are dropped silently.
    pub fn add_edge(&mut self, source: usize, target: usize, label: EdgeLabel) {
        if self.seen.insert((source, target, label)) {
            self.edges.push(GraphEdge {
                source,
                target,
                label,
            });
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn build(self) -> UsageGraph {
        UsageGraph {
            method_id: self.method_id,
            nodes: self.nodes,
            edges: self.edges,
        }
    }
}

/// One invariant violation found by [`UsageGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DanglingEdge {
        edge: usize,
        source: usize,
        target: usize,
    },
    OrderSelfLoop {
        node: usize,
    },
    EmptyNodeLabel {
        node: usize,
    },
    DataNodeCallLabel {
        node: usize,
        label: String,
    },
    ActionNodeUnknownLabel {
        node: usize,
    },
    DuplicateEdge {
        source: usize,
        target: usize,
        label: EdgeLabel,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DanglingEdge {
                edge,
                source,
                target,
            } => write!(
                f,
                "edge {edge} references a missing node ({source} -> {target})"
            ),
            Violation::OrderSelfLoop { node } => {
                write!(f, "order edge loops on node {node}")
            }
            Violation::EmptyNodeLabel { node } => write!(f, "node {node} has an empty label"),
            Violation::DataNodeCallLabel { node, label } => {
                write!(f, "data node {node} carries call signature `{label}`")
            }
            Violation::ActionNodeUnknownLabel { node } => {
                write!(f, "action node {node} is labeled UNKNOWN")
            }
            Violation::DuplicateEdge {
                source,
                target,
                label,
            } => write!(
                f,
                "duplicate edge {source} -{label}-> {target}"
            ),
        }
    }
}

/// Result of [`UsageGraph::validate`]: empty exactly when all invariants hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

mod doc {
    use super::*;

    #[derive(serde::Serialize, serde::Deserialize)]
    pub(super) struct GraphDoc {
        pub method_id: String,
        pub nodes: Vec<GraphNode>,
        pub edges: Vec<GraphEdge>,
    }

    impl From<&UsageGraph> for GraphDoc {
        fn from(g: &UsageGraph) -> Self {
            GraphDoc {
                method_id: g.method_id.clone(),
                nodes: g.nodes.clone(),
                edges: g.edges.clone(),
            }
        }
    }
}

impl Serialize for UsageGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        doc::GraphDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UsageGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let d = doc::GraphDoc::deserialize(deserializer)?;
        Ok(UsageGraph::from_parts(d.method_id, d.nodes, d.edges))
    }
}

#[derive(Debug, thiserror::Error)]
#[error("graph document rejected: {0}")]
pub struct GraphReadError(#[from] serde_json::Error);

/// Renders the graph interchange document.
pub fn to_json(g: &UsageGraph) -> String {
    serde_json::to_string_pretty(g).expect("graph serialization cannot fail")
}

/// Parses a graph interchange document. Errors carry the text position; an
/// unrecognized edge label is reported as `unknown edge label`.
pub fn from_json(text: &str) -> Result<UsageGraph, GraphReadError> {
    Ok(serde_json::from_str(text)?)
}
