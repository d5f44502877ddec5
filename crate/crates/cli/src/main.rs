//! Command-line interface: build usage graphs from source files, infer
//! change rules from graph pairs, inspect feature vectors and distances,
//! scan single usages, and run full corpus evaluations.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use augrule::detector::detect;
use augrule::distance::{dist_fn, DistanceFn};
use augrule::exas::{split_graph, vectorize, ExasVector};
use augrule::frontend::{build_aug, parse};
use augrule::graph::{self, UsageGraph};
use augrule::harness::{
    cross_validate, derived_usages, evaluate_all, load_usages, mine_rules, read_manifest,
    vcs_binary, write_reports, MiningOptions, DEFAULT_NODE_LIMIT,
};
use augrule::rule::{build_change_rule, ChangeRule};

#[derive(Parser)]
#[command(
    name = "augrule",
    version,
    about = "Mine API-usage change rules from fixing commits and scan usages with them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a source file and write the usage graph of one method.
    BuildAug {
        /// Source file to parse.
        file: PathBuf,
        /// Method to translate.
        #[arg(long)]
        method: String,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Infer the change rule between two usage graphs.
    InferRule {
        /// Graph of the flawed version.
        #[arg(long)]
        misuse: PathBuf,
        /// Graph of the corrected version.
        #[arg(long)]
        fix: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the feature vector of a usage graph.
    Vectorize {
        /// Graph file.
        graph: PathBuf,
        /// Keep only features that touch resolved API types.
        #[arg(long)]
        api_only: bool,
        /// Collapse counts to presence flags.
        #[arg(long)]
        indicator: bool,
        /// Vectorize per API-package group instead of the whole graph.
        #[arg(long)]
        split: bool,
    },
    /// Print the distance between two usage graphs under one variant.
    Distance {
        first: PathBuf,
        second: PathBuf,
        /// Distance variant name.
        #[arg(long = "fn")]
        function: DistanceVariant,
    },
    /// Apply one rule to one usage.
    Detect {
        /// Rule file.
        #[arg(long)]
        rule: PathBuf,
        /// Usage graph file.
        #[arg(long)]
        usage: PathBuf,
        /// Distance variant name.
        #[arg(long = "fn")]
        function: DistanceVariant,
        /// Applicability threshold.
        #[arg(long)]
        threshold: f64,
    },
    /// Mine rules from a manifest and evaluate them over the corpus.
    Evaluate {
        /// Manifest of fixing commits to mine rules from.
        #[arg(long)]
        rules: PathBuf,
        /// Manifest of labelled usages; when omitted, the mined entries'
        /// own flawed/corrected graphs are scanned.
        #[arg(long)]
        usages: Option<PathBuf>,
        /// Distance variants to evaluate (comma separated); all twelve when
        /// omitted.
        #[arg(long = "fns", value_delimiter = ',')]
        functions: Vec<DistanceVariant>,
        /// Thresholds to sweep (comma separated); 0.1..1.1 when omitted.
        #[arg(long, value_delimiter = ',')]
        thresholds: Vec<f64>,
        /// Skip methods whose graph reaches this many nodes.
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: usize,
        /// Cross-validation folds; 1 evaluates everything in one pass.
        #[arg(long, default_value_t = 10)]
        folds: usize,
        /// Version-control binary (overrides $VCS_BIN, defaults to git).
        #[arg(long)]
        vcs_bin: Option<String>,
        /// Directory for report.tsv and report.json.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Newtype so clap can parse distance-variant names with a helpful error.
#[derive(Clone, Copy)]
struct DistanceVariant(DistanceFn);

impl std::str::FromStr for DistanceVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(DistanceVariant).map_err(|_| {
            let names: Vec<&str> = DistanceFn::ALL.iter().map(|f| f.as_str()).collect();
            format!("unknown distance function `{s}`; choose one of: {}", names.join(", "))
        })
    }
}

fn read_graph(path: &Path) -> Result<UsageGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    graph::from_json(&text).with_context(|| format!("parsing graph {}", path.display()))
}

fn read_rule(path: &Path) -> Result<ChangeRule> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ChangeRule::from_json(&text).with_context(|| format!("parsing rule {}", path.display()))
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{content}"),
    }
    Ok(())
}

fn print_vector(vector: &ExasVector, api_only: bool, indicator: bool) {
    let filtered = if api_only { vector.filter_api_features() } else { vector.clone() };
    let shaped = if indicator { filtered.to_indicator() } else { filtered };
    println!("features: {}", shaped.len());
    for (key, stat) in shaped.iter() {
        let flag = if stat.api { "api" } else { "-" };
        println!("{}\t{}\t{}", stat.count, flag, key);
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::BuildAug { file, method, out } => {
            let source =
                fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let unit = parse(&source).with_context(|| format!("parsing {}", file.display()))?;
            let graph = build_aug(&unit, &method)?;
            emit(out.as_deref(), &graph::to_json(&graph))?;
        }
        Command::InferRule { misuse, fix, out } => {
            let flawed = read_graph(&misuse)?;
            let corrected = read_graph(&fix)?;
            let rule = build_change_rule(&flawed, &corrected);
            if rule.is_empty() {
                eprintln!("note: the two graphs are behaviourally identical; the rule is empty");
            }
            emit(out.as_deref(), &rule.to_json())?;
        }
        Command::Vectorize { graph, api_only, indicator, split } => {
            let usage = read_graph(&graph)?;
            if split {
                for (group, subgraph) in split_graph(&usage) {
                    println!("== group {group} ==");
                    print_vector(&vectorize(&subgraph), api_only, indicator);
                }
            } else {
                print_vector(&vectorize(&usage), api_only, indicator);
            }
        }
        Command::Distance { first, second, function } => {
            let a = read_graph(&first)?;
            let b = read_graph(&second)?;
            println!("{:.6}", dist_fn(&a, &b, function.0));
        }
        Command::Detect { rule, usage, function, threshold } => {
            let change_rule = read_rule(&rule)?;
            let graph = read_graph(&usage)?;
            let verdict = detect(&change_rule, &graph, &function.0.config(), threshold);
            println!("flawed_distance: {:.6}", verdict.flawed_distance);
            println!("corrected_distance: {:.6}", verdict.corrected_distance);
            println!("applicable: {}", verdict.applicable);
            println!("is_misuse: {}", verdict.is_misuse);
        }
        Command::Evaluate {
            rules,
            usages,
            functions,
            thresholds,
            node_limit,
            folds,
            vcs_bin,
            out,
        } => {
            if node_limit == 0 {
                bail!("--node-limit must be positive");
            }
            let variants: Vec<DistanceFn> = if functions.is_empty() {
                DistanceFn::ALL.to_vec()
            } else {
                functions.iter().map(|variant| variant.0).collect()
            };
            let sweep: Vec<f64> = if thresholds.is_empty() {
                augrule::harness::default_thresholds()
            } else {
                thresholds
            };
            if sweep.iter().any(|t| !t.is_finite() || *t < 0.0) {
                bail!("thresholds must be non-negative numbers");
            }

            let options =
                MiningOptions { vcs: vcs_binary(vcs_bin.as_deref()), node_limit };
            let entries = read_manifest(&rules)?;
            let (mined, skipped) = mine_rules(&entries, &options);
            println!(
                "mined {} rules from {} entries ({} skipped)",
                mined.len(),
                entries.len(),
                skipped.len()
            );
            if mined.is_empty() {
                bail!("no rules could be mined; nothing to evaluate");
            }
            let usage_cases = match usages {
                Some(path) => {
                    let rows = read_manifest(&path)?;
                    let (cases, usage_skips) = load_usages(&rows, &options);
                    println!(
                        "loaded {} usages from {} rows ({} skipped)",
                        cases.len(),
                        rows.len(),
                        usage_skips.len()
                    );
                    cases
                }
                None => {
                    let cases = derived_usages(&mined);
                    println!("derived {} usages from the mined entries", cases.len());
                    cases
                }
            };
            if usage_cases.is_empty() {
                bail!("no usages to scan");
            }
            let report = if folds >= 2 {
                cross_validate(&mined, &usage_cases, folds, &variants, &sweep)
            } else {
                evaluate_all(&mined, &usage_cases, &variants, &sweep)
            };
            println!("evaluated {} folds", report.folds.len());
            if let Some(best) = report
                .overall
                .iter()
                .max_by(|a, b| {
                    a.conservative_precision.total_cmp(&b.conservative_precision)
                })
                .filter(|cell| cell.folds > 0)
            {
                println!(
                    "best overall: {} at threshold {:.2}: conservative precision {:.3}, \
                     recall {:.3}",
                    best.distance_fn.as_str(),
                    best.threshold,
                    best.conservative_precision,
                    best.recall
                );
            }
            let (tsv, json) = write_reports(&out, &report)?;
            println!("wrote {}", tsv.display());
            println!("wrote {}", json.display());
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(error) = run() {
        eprintln!("error: {error:#}");
        std::process::exit(1);
    }
}
