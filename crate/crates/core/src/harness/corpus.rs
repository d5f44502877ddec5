//! Mining change rules and usage graphs from manifests.

use log::{info, warn};

use crate::detector::GroundTruth;
use crate::frontend::{build_aug, parse, ParseError};
use crate::graph::UsageGraph;
use crate::rule::{build_change_rule, ChangeRule};

use super::manifest::ManifestEntry;
use super::vcs::{extract_versions, show_file, vcs_binary, VcsError};

/// Methods whose graph reaches this many nodes are skipped: beyond it the
/// path features explode and such methods are poor usage examples anyway.
pub const DEFAULT_NODE_LIMIT: usize = 100;

/// Knobs of the mining pipeline.
#[derive(Debug, Clone)]
pub struct MiningOptions {
    /// Version-control binary to invoke.
    pub vcs: String,
    /// Graphs with at least this many nodes are skipped.
    pub node_limit: usize,
}

impl Default for MiningOptions {
    fn default() -> Self {
        MiningOptions { vcs: vcs_binary(None), node_limit: DEFAULT_NODE_LIMIT }
    }
}

/// Which side of a fixing commit a problem occurred on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Flawed,
    Corrected,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Flawed => "flawed version",
            Side::Corrected => "corrected version",
        })
    }
}

/// Why a manifest entry contributed nothing.
#[derive(Debug, thiserror::Error)]
pub enum SkipReason {
    #[error("{0}")]
    Vcs(#[from] VcsError),
    #[error("{side} does not parse: {error}")]
    Parse { side: Side, error: ParseError },
    #[error("{side} does not declare method `{method}`")]
    MethodMissing { side: Side, method: String },
    #[error("graph has {nodes} nodes, limit is {limit}")]
    TooLarge { nodes: usize, limit: usize },
    #[error("versions are behaviourally identical, no rule to mine")]
    EmptyRule,
    #[error("usage manifest row lacks the misuse/correct label")]
    MissingLabel,
}

/// One skipped manifest entry with its reason.
#[derive(Debug)]
pub struct Skip {
    pub entry_id: String,
    pub reason: SkipReason,
}

/// A successfully mined manifest entry.
#[derive(Debug, Clone)]
pub struct MinedRule {
    /// Manifest entry id; also the rule's origin.
    pub id: String,
    pub repo: String,
    pub rule: ChangeRule,
    /// Usage graph of the method before the fix.
    pub flawed_graph: UsageGraph,
    /// Usage graph of the method after the fix.
    pub corrected_graph: UsageGraph,
}

/// A labelled usage graph to scan.
#[derive(Debug, Clone)]
pub struct UsageCase {
    /// Identifier of the entry the usage came from; rules originating from
    /// the same entry are not applied to it.
    pub id: String,
    pub repo: String,
    pub truth: GroundTruth,
    pub graph: UsageGraph,
}

fn graph_for(
    source: &str,
    side: Side,
    entry: &ManifestEntry,
    options: &MiningOptions,
) -> Result<UsageGraph, SkipReason> {
    let unit = parse(source).map_err(|error| SkipReason::Parse { side, error })?;
    let graph = build_aug(&unit, entry.method_name())
        .map_err(|_| SkipReason::MethodMissing { side, method: entry.method_name().to_owned() })?;
    if graph.node_count() >= options.node_limit {
        return Err(SkipReason::TooLarge { nodes: graph.node_count(), limit: options.node_limit });
    }
    Ok(graph.with_method_id(entry.id()))
}

fn mine_one(entry: &ManifestEntry, options: &MiningOptions) -> Result<MinedRule, SkipReason> {
    let pair = extract_versions(&options.vcs, &entry.repo, &entry.commit, &entry.file_path)?;
    let flawed_graph = graph_for(&pair.flawed, Side::Flawed, entry, options)?;
    let corrected_graph = graph_for(&pair.corrected, Side::Corrected, entry, options)?;
    let rule = build_change_rule(&flawed_graph, &corrected_graph);
    if rule.is_empty() {
        return Err(SkipReason::EmptyRule);
    }
    Ok(MinedRule {
        id: entry.id(),
        repo: entry.repo.clone(),
        rule,
        flawed_graph,
        corrected_graph,
    })
}

/// Mines a change rule from every manifest entry that survives extraction,
/// parsing, and the size filter. Skipped entries are returned alongside and
/// logged.
pub fn mine_rules(
    entries: &[ManifestEntry],
    options: &MiningOptions,
) -> (Vec<MinedRule>, Vec<Skip>) {
    let mut mined = Vec::new();
    let mut skips = Vec::new();
    for entry in entries {
        match mine_one(entry, options) {
            Ok(rule) => {
                info!("mined rule from {}", rule.id);
                mined.push(rule);
            }
            Err(reason) => {
                warn!("skipping {}: {reason}", entry.id());
                skips.push(Skip { entry_id: entry.id(), reason });
            }
        }
    }
    (mined, skips)
}

fn load_one(entry: &ManifestEntry, options: &MiningOptions) -> Result<UsageCase, SkipReason> {
    let truth = entry.label.ok_or(SkipReason::MissingLabel)?;
    let source = show_file(&options.vcs, &entry.repo, &entry.commit, &entry.file_path)?;
    let graph = graph_for(&source, Side::Corrected, entry, options)?;
    Ok(UsageCase { id: entry.id(), repo: entry.repo.clone(), truth, graph })
}

/// Loads labelled usages from a usage manifest: each entry's file is read
/// at its commit and the named method becomes one usage graph.
pub fn load_usages(
    entries: &[ManifestEntry],
    options: &MiningOptions,
) -> (Vec<UsageCase>, Vec<Skip>) {
    let mut usages = Vec::new();
    let mut skips = Vec::new();
    for entry in entries {
        match load_one(entry, options) {
            Ok(usage) => usages.push(usage),
            Err(reason) => {
                warn!("skipping usage {}: {reason}", entry.id());
                skips.push(Skip { entry_id: entry.id(), reason });
            }
        }
    }
    (usages, skips)
}

/// Derives an evaluation usage set from mined entries themselves: each
/// entry's flawed graph is a known misuse and its corrected graph a known
/// correct usage.
pub fn derived_usages(rules: &[MinedRule]) -> Vec<UsageCase> {
    let mut usages = Vec::with_capacity(rules.len() * 2);
    for mined in rules {
        usages.push(UsageCase {
            id: mined.id.clone(),
            repo: mined.repo.clone(),
            truth: GroundTruth::Misuse,
            graph: mined.flawed_graph.clone(),
        });
        usages.push(UsageCase {
            id: mined.id.clone(),
            repo: mined.repo.clone(),
            truth: GroundTruth::Correct,
            graph: mined.corrected_graph.clone(),
        });
    }
    usages
}
