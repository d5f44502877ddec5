//! Corpus harness: manifests of fixing commits, version extraction from
//! version control, rule mining, repository bucketing, and the evaluation
//! grid over distance variants and thresholds, including cross-validation.

mod bucket;
mod corpus;
mod cv;
mod eval;
mod manifest;
mod report;
mod vcs;

pub use bucket::assign_buckets;
pub use corpus::{
    derived_usages, load_usages, mine_rules, MinedRule, MiningOptions, Side, Skip, SkipReason,
    UsageCase, DEFAULT_NODE_LIMIT,
};
pub use cv::{cross_validate, evaluate_all, CvReport, FoldReport, MeanCell};
pub use eval::{
    aggregate_counts, default_thresholds, distance_table, evaluate_grid, flagged_pairs,
    DistanceRecord, GridCell,
};
pub use manifest::{parse_manifest, read_manifest, ManifestEntry, ManifestError};
pub use report::write_reports;
pub use vcs::{extract_versions, show_file, vcs_binary, VcsError, VersionPair};
