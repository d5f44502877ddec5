//! Applying change rules to usages: a rule fires on a usage when the usage
//! resembles the rule's flawed side more than its corrected side.

use serde::{Deserialize, Serialize};

use crate::distance::{dist, DistanceConfig};
use crate::graph::UsageGraph;
use crate::rule::ChangeRule;

/// Result of applying one rule to one usage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// The usage is within the rule's reach: its distance to the flawed
    /// side is below the threshold (strictly).
    pub applicable: bool,
    /// The rule flags the usage: it is applicable and the usage is strictly
    /// closer to the flawed side than to the corrected side. Never set
    /// without `applicable`.
    pub is_misuse: bool,
    /// Distance between the rule's flawed side and the usage.
    pub flawed_distance: f64,
    /// Distance between the rule's corrected side and the usage.
    pub corrected_distance: f64,
}

/// Computes both rule-side distances for a usage.
pub fn rule_distances(rule: &ChangeRule, usage: &UsageGraph, cfg: &DistanceConfig) -> (f64, f64) {
    (dist(&rule.misuse, usage, cfg), dist(&rule.fix, usage, cfg))
}

/// Applies `rule` to `usage` under the given distance configuration and
/// applicability threshold.
pub fn detect(
    rule: &ChangeRule,
    usage: &UsageGraph,
    cfg: &DistanceConfig,
    threshold: f64,
) -> Verdict {
    let (flawed_distance, corrected_distance) = rule_distances(rule, usage, cfg);
    verdict_from_distances(flawed_distance, corrected_distance, threshold)
}

/// Builds the verdict from precomputed distances; useful when the same
/// distances are reused across several thresholds.
pub fn verdict_from_distances(
    flawed_distance: f64,
    corrected_distance: f64,
    threshold: f64,
) -> Verdict {
    let applicable = flawed_distance < threshold;
    Verdict {
        applicable,
        is_misuse: applicable && flawed_distance < corrected_distance,
        flawed_distance,
        corrected_distance,
    }
}

/// Known classification of a usage in an evaluation corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundTruth {
    Misuse,
    Correct,
}

/// Outcome of one applicable rule-usage decision against ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    TruePositive,
    FalsePositive,
    TrueNegative,
    FalseNegative,
}

/// Scores a verdict against ground truth. Verdicts outside the rule's reach
/// carry no information and yield `None`.
pub fn classify(verdict: Verdict, truth: GroundTruth) -> Option<Outcome> {
    if !verdict.applicable {
        return None;
    }
    Some(match (verdict.is_misuse, truth) {
        (true, GroundTruth::Misuse) => Outcome::TruePositive,
        (false, GroundTruth::Misuse) => Outcome::FalseNegative,
        (true, GroundTruth::Correct) => Outcome::FalsePositive,
        (false, GroundTruth::Correct) => Outcome::TrueNegative,
    })
}

/// Counted outcomes of one rule over a usage set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub true_positives: u64,
    pub false_positives: u64,
    pub true_negatives: u64,
    pub false_negatives: u64,
}

impl OutcomeCounts {
    pub fn record(&mut self, outcome: Outcome) {
        match outcome {
            Outcome::TruePositive => self.true_positives += 1,
            Outcome::FalsePositive => self.false_positives += 1,
            Outcome::TrueNegative => self.true_negatives += 1,
            Outcome::FalseNegative => self.false_negatives += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }

    /// True when the rule flagged at least one usage.
    pub fn has_positives(&self) -> bool {
        self.true_positives + self.false_positives > 0
    }

    /// Fraction of flagged usages that are real misuses; undefined when the
    /// rule never fired.
    pub fn precision(&self) -> Option<f64> {
        let flagged = self.true_positives + self.false_positives;
        if flagged == 0 {
            None
        } else {
            Some(self.true_positives as f64 / flagged as f64)
        }
    }

    /// Fraction of reachable misuses that were flagged; zero when the rule
    /// reached no misuse at all.
    pub fn recall(&self) -> f64 {
        let reachable = self.true_positives + self.false_negatives;
        if reachable == 0 {
            0.0
        } else {
            self.true_positives as f64 / reachable as f64
        }
    }
}
