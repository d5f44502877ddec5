//! Fixtures shared by the core integration tests: the guarded-call worked
//! example, a seeded random graph generator, graph surgery helpers, and a
//! minimal git driver for repository fixtures.

use std::path::Path;
use std::process::Command;

use augrule::frontend::{build_aug, parse};
use augrule::graph::{EdgeLabel, GraphNode, NodeKind, UsageGraph, UsageGraphBuilder};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Flawed version of the worked example: `doSomething` runs unconditionally.
pub const GUARD_MISUSE: &str = "\
package de.example.app;

import de.example.lib.Foo;
import de.example.lib.Bar;
import de.example.lib.Baz;

public class Client {
    public void process(Foo fooObj, Bar barObj, Baz bazObj) {
        var state = fooObj.currentState();
        barObj.prepare(state);
        Object characteristic = bazObj.describe(state);
        bazObj.doSomething();
    }
}
";

/// Fixed version: the fix wraps `doSomething` in a characteristic check and
/// returns from the guarded branch.
pub const GUARD_FIX: &str = "\
package de.example.app;

import de.example.lib.Foo;
import de.example.lib.Bar;
import de.example.lib.Baz;

public class Client {
    public void process(Foo fooObj, Bar barObj, Baz bazObj) {
        var state = fooObj.currentState();
        barObj.prepare(state);
        Object characteristic = bazObj.describe(state);
        if (characteristic.hasCharacteristic()) {
            bazObj.doSomething();
            return;
        }
    }
}
";

/// The flawed version with every local variable renamed.
pub const GUARD_MISUSE_RENAMED: &str = "\
package de.example.app;

import de.example.lib.Foo;
import de.example.lib.Bar;
import de.example.lib.Baz;

public class Client {
    public void process(Foo f, Bar b, Baz z) {
        var snapshot = f.currentState();
        b.prepare(snapshot);
        Object trait0 = z.describe(snapshot);
        z.doSomething();
    }
}
";

/// The fixed version with every local variable renamed.
pub const GUARD_FIX_RENAMED: &str = "\
package de.example.app;

import de.example.lib.Foo;
import de.example.lib.Bar;
import de.example.lib.Baz;

public class Client {
    public void process(Foo f, Bar b, Baz z) {
        var snapshot = f.currentState();
        b.prepare(snapshot);
        Object trait0 = z.describe(snapshot);
        if (trait0.hasCharacteristic()) {
            z.doSomething();
            return;
        }
    }
}
";

/// Parses `source` and builds the usage graph of `method`, panicking with
/// the offending source on failure.
pub fn build_from(source: &str, method: &str) -> UsageGraph {
    let unit = parse(source).unwrap_or_else(|e| panic!("fixture must parse: {e}\n{source}"));
    build_aug(&unit, method).unwrap_or_else(|e| panic!("fixture must build: {e}"))
}

/// All node labels of a graph, in node order.
pub fn labels(g: &UsageGraph) -> Vec<&str> {
    g.nodes().iter().map(|n| n.label.as_str()).collect()
}

/// Index of the unique node carrying `label`.
pub fn node_index(g: &UsageGraph, label: &str) -> usize {
    let hits: Vec<usize> = (0..g.node_count()).filter(|&i| g.node(i).label == label).collect();
    assert_eq!(hits.len(), 1, "expected exactly one `{label}` in {:?}", labels(g));
    hits[0]
}

const DATA_LABELS: [&str; 5] = ["Widget", "Stream", "Registry", "\"text\"", "UNKNOWN"];
const ACTION_LABELS: [&str; 5] =
    ["Widget.draw()", "Stream.read()", "Registry.put()", "Widget.<init>", "<return>"];
const API_TYPES: [&str; 4] = ["", "toolkit.Widget", "io.util.Stream", "a.b.c.d.Registry"];
const EDGE_POOL: [EdgeLabel; 6] = [
    EdgeLabel::Sel,
    EdgeLabel::Order,
    EdgeLabel::Finally,
    EdgeLabel::Recv,
    EdgeLabel::Para,
    EdgeLabel::Def,
];

/// Generates a random graph with up to `max_nodes` nodes. Order edges are
/// oriented from lower to higher index, so the order relation is acyclic;
/// every other edge may point anywhere. Roughly half the nodes carry API
/// type information.
pub fn random_graph(rng: &mut ChaCha8Rng, max_nodes: usize) -> UsageGraph {
    let n = rng.random_range(0..=max_nodes);
    let mut b = UsageGraphBuilder::new("generated");
    for _ in 0..n {
        let (kind, label) = if rng.random_bool(0.5) {
            (NodeKind::Data, DATA_LABELS[rng.random_range(0..DATA_LABELS.len())])
        } else {
            (NodeKind::Action, ACTION_LABELS[rng.random_range(0..ACTION_LABELS.len())])
        };
        let api = if rng.random_bool(0.5) {
            API_TYPES[rng.random_range(1..API_TYPES.len())]
        } else {
            ""
        };
        b.add_node(kind, label, api);
    }
    if n > 1 {
        let attempts = rng.random_range(0..=3 * n);
        for _ in 0..attempts {
            let label = EDGE_POOL[rng.random_range(0..EDGE_POOL.len())];
            let mut s = rng.random_range(0..n);
            let mut t = rng.random_range(0..n);
            if s == t {
                continue;
            }
            if label == EdgeLabel::Order && s > t {
                std::mem::swap(&mut s, &mut t);
            }
            b.add_edge(s, t, label);
        }
    }
    b.build()
}

/// Copies a graph and appends the given nodes without any edges.
pub fn append_isolated(g: &UsageGraph, extra: &[GraphNode]) -> UsageGraph {
    let mut b = UsageGraphBuilder::new(g.method_id());
    for node in g.nodes() {
        b.add_node(node.kind, node.label.clone(), node.api_type.clone());
    }
    for e in g.edges() {
        b.add_edge(e.source, e.target, e.label);
    }
    for node in extra {
        b.add_node(node.kind, node.label.clone(), node.api_type.clone());
    }
    b.build()
}

/// Disjoint union of a graph with itself: the feature set is unchanged
/// while every feature count doubles.
pub fn self_union(g: &UsageGraph) -> UsageGraph {
    let n = g.node_count();
    let mut b = UsageGraphBuilder::new(g.method_id());
    for copy in 0..2 {
        let offset = copy * n;
        for node in g.nodes() {
            b.add_node(node.kind, node.label.clone(), node.api_type.clone());
        }
        for e in g.edges() {
            b.add_edge(offset + e.source, offset + e.target, e.label);
        }
    }
    b.build()
}

/// Runs one git command in `repo`, panicking on failure.
pub fn git(repo: &Path, args: &[&str]) -> String {
    let output = Command::new("git")
        .arg("-C")
        .arg(repo)
        .args([
            "-c",
            "user.name=fixture",
            "-c",
            "user.email=fixture@localhost",
            "-c",
            "commit.gpgsign=false",
        ])
        .args(args)
        .output()
        .expect("git must be runnable");
    assert!(
        output.status.success(),
        "git {args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8_lossy(&output.stdout).into_owned()
}

/// Initializes a repository whose `file` passes through the given states,
/// one commit each; returns the commit hashes oldest first.
pub fn seeded_repo(repo: &Path, file: &str, states: &[&[u8]]) -> Vec<String> {
    git(repo, &["init", "--quiet"]);
    let path = repo.join(file);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).expect("fixture directory");
    }
    let mut commits = Vec::new();
    for (i, state) in states.iter().enumerate() {
        std::fs::write(&path, state).expect("fixture write");
        git(repo, &["add", "."]);
        // Identical consecutive states still need their own commit.
        git(repo, &["commit", "--quiet", "--allow-empty", "-m", &format!("state {i}")]);
        commits.push(git(repo, &["rev-parse", "HEAD"]).trim().to_owned());
    }
    commits
}
