//! The evaluation grid: every distance variant crossed with every
//! applicability threshold.
//!
//! Distances are the expensive part, and they do not depend on the
//! threshold, so each (variant, rule, usage) distance pair is computed
//! exactly once — in parallel — and the threshold sweep reuses the table.

use rayon::prelude::*;

use crate::detector::{classify, verdict_from_distances, OutcomeCounts};
use crate::distance::DistanceFn;

use super::corpus::{MinedRule, UsageCase};

/// The default threshold sweep: 0.1 through 1.1 in steps of 0.1. The last
/// value exceeds the distance range on purpose, making every rule
/// applicable everywhere.
pub fn default_thresholds() -> Vec<f64> {
    (1..=11).map(|tenths| tenths as f64 / 10.0).collect()
}

/// Both rule-side distances for one (rule, usage) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceRecord {
    /// Index into the rule slice.
    pub rule: usize,
    /// Index into the usage slice.
    pub usage: usize,
    pub flawed: f64,
    pub corrected: f64,
}

/// Computes the distance table for one variant over all (rule, usage)
/// pairs, in parallel. Pairs where the usage stems from the rule's own
/// origin entry are excluded: a rule must not be scored on the very example
/// it was mined from.
pub fn distance_table(
    rules: &[MinedRule],
    usages: &[UsageCase],
    variant: DistanceFn,
) -> Vec<DistanceRecord> {
    let cfg = variant.config();
    let pairs: Vec<(usize, usize)> = (0..rules.len())
        .flat_map(|rule| (0..usages.len()).map(move |usage| (rule, usage)))
        .filter(|&(rule, usage)| rules[rule].id != usages[usage].id)
        .collect();
    pairs
        .par_iter()
        .map(|&(rule, usage)| {
            let (flawed, corrected) =
                crate::detector::rule_distances(&rules[rule].rule, &usages[usage].graph, &cfg);
            DistanceRecord { rule, usage, flawed, corrected }
        })
        .collect()
}

/// One cell of the evaluation grid: one distance variant at one threshold,
/// aggregated over all rules.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub distance_fn: DistanceFn,
    pub threshold: f64,
    /// Rules that were applicable to at least one usage.
    pub applicable_rules: usize,
    /// Rules that flagged at least one usage.
    pub flagging_rules: usize,
    /// Mean precision over the rules that flagged something; `None` when no
    /// rule flagged anything.
    pub relative_precision: Option<f64>,
    /// Mean precision over all evaluated rules, counting rules that flagged
    /// nothing as zero.
    pub conservative_precision: f64,
    /// Mean recall over all evaluated rules.
    pub recall: f64,
    /// Total confirmed detections across rules.
    pub true_positives: u64,
}

/// Aggregates per-rule outcome counts into one grid cell. The slice must
/// hold one entry per evaluated rule, including rules that were never
/// applicable.
pub fn aggregate_counts(
    variant: DistanceFn,
    threshold: f64,
    per_rule: &[OutcomeCounts],
) -> GridCell {
    let rule_count = per_rule.len();
    let applicable_rules = per_rule.iter().filter(|counts| counts.total() > 0).count();
    let flagging: Vec<f64> =
        per_rule.iter().filter_map(|counts| counts.precision()).collect();
    let relative_precision = if flagging.is_empty() {
        None
    } else {
        Some(flagging.iter().sum::<f64>() / flagging.len() as f64)
    };
    let conservative_precision = if rule_count == 0 {
        0.0
    } else {
        per_rule.iter().map(|counts| counts.precision().unwrap_or(0.0)).sum::<f64>()
            / rule_count as f64
    };
    let recall = if rule_count == 0 {
        0.0
    } else {
        per_rule.iter().map(OutcomeCounts::recall).sum::<f64>() / rule_count as f64
    };
    GridCell {
        distance_fn: variant,
        threshold,
        applicable_rules,
        flagging_rules: flagging.len(),
        relative_precision,
        conservative_precision,
        recall,
        true_positives: per_rule.iter().map(|counts| counts.true_positives).sum(),
    }
}

fn outcome_counts(
    table: &[DistanceRecord],
    usages: &[UsageCase],
    rule_count: usize,
    threshold: f64,
) -> Vec<OutcomeCounts> {
    let mut per_rule = vec![OutcomeCounts::default(); rule_count];
    for record in table {
        let verdict = verdict_from_distances(record.flawed, record.corrected, threshold);
        if let Some(outcome) = classify(verdict, usages[record.usage].truth) {
            per_rule[record.rule].record(outcome);
        }
    }
    per_rule
}

/// Evaluates every distance variant at every threshold; cells are ordered
/// by variant (in the given order), then by threshold.
pub fn evaluate_grid(
    rules: &[MinedRule],
    usages: &[UsageCase],
    variants: &[DistanceFn],
    thresholds: &[f64],
) -> Vec<GridCell> {
    let mut cells = Vec::with_capacity(variants.len() * thresholds.len());
    for &variant in variants {
        let table = distance_table(rules, usages, variant);
        for &threshold in thresholds {
            let per_rule = outcome_counts(&table, usages, rules.len(), threshold);
            cells.push(aggregate_counts(variant, threshold, &per_rule));
        }
    }
    cells
}

/// Scans every usage with every rule at one fixed variant and threshold;
/// returns the flagged (rule index, usage index) pairs. Convenience for
/// spot runs outside the grid.
pub fn flagged_pairs(
    rules: &[MinedRule],
    usages: &[UsageCase],
    variant: DistanceFn,
    threshold: f64,
) -> Vec<(usize, usize)> {
    distance_table(rules, usages, variant)
        .into_iter()
        .filter(|record| {
            verdict_from_distances(record.flawed, record.corrected, threshold).is_misuse
        })
        .map(|record| (record.rule, record.usage))
        .collect()
}
