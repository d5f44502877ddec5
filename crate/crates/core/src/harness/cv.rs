//! Repository-level cross-validation.
//!
//! Repositories are split into `k` buckets. Each fold holds one bucket out:
//! the rules mined from the other buckets scan the held-out bucket's
//! usages. A project's own history therefore never vouches for its own
//! usages. Fold metrics are averaged into an overall grid.

use std::collections::HashMap;

use log::warn;

use crate::distance::DistanceFn;

use super::bucket::assign_buckets;
use super::corpus::{MinedRule, UsageCase};
use super::eval::{evaluate_grid, GridCell};

/// The evaluation grid of one fold.
#[derive(Debug, Clone)]
pub struct FoldReport {
    pub fold: usize,
    /// Repositories whose usages were scanned in this fold.
    pub held_out_repos: Vec<String>,
    pub rule_count: usize,
    pub usage_count: usize,
    pub cells: Vec<GridCell>,
}

/// One cell of the overall grid: fold metrics averaged per variant and
/// threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCell {
    pub distance_fn: DistanceFn,
    pub threshold: f64,
    /// Folds that contributed to the averages.
    pub folds: usize,
    /// Mean of the fold-level relative precisions, over the folds where at
    /// least one rule flagged something; `None` when no fold had flags.
    pub relative_precision: Option<f64>,
    pub conservative_precision: f64,
    pub recall: f64,
    pub applicable_rules: f64,
    pub true_positives: f64,
}

/// Full cross-validation result.
#[derive(Debug, Clone)]
pub struct CvReport {
    pub folds: Vec<FoldReport>,
    pub overall: Vec<MeanCell>,
}

/// Runs `k`-fold cross-validation. Buckets are formed from the rule
/// entries' repositories (weighted by entry count); repositories that only
/// contribute usages join with weight zero. Folds without rules or without
/// usages are skipped with a warning and excluded from the averages.
pub fn cross_validate(
    rules: &[MinedRule],
    usages: &[UsageCase],
    k: usize,
    variants: &[DistanceFn],
    thresholds: &[f64],
) -> CvReport {
    let mut weights: HashMap<&str, usize> = HashMap::new();
    for rule in rules {
        *weights.entry(rule.repo.as_str()).or_insert(0) += 1;
    }
    for usage in usages {
        weights.entry(usage.repo.as_str()).or_insert(0);
    }
    let sizes: Vec<(String, usize)> =
        weights.iter().map(|(name, &size)| (name.to_string(), size)).collect();
    let buckets = assign_buckets(&sizes, k);

    let mut folds = Vec::new();
    for (fold, bucket) in buckets.iter().enumerate() {
        let held_out: Vec<&str> = bucket.iter().map(String::as_str).collect();
        let fold_rules: Vec<MinedRule> =
            rules.iter().filter(|rule| !held_out.contains(&rule.repo.as_str())).cloned().collect();
        let fold_usages: Vec<UsageCase> = usages
            .iter()
            .filter(|usage| held_out.contains(&usage.repo.as_str()))
            .cloned()
            .collect();
        if fold_rules.is_empty() || fold_usages.is_empty() {
            warn!(
                "skipping fold {fold}: {} rules, {} usages",
                fold_rules.len(),
                fold_usages.len()
            );
            continue;
        }
        let cells = evaluate_grid(&fold_rules, &fold_usages, variants, thresholds);
        folds.push(FoldReport {
            fold,
            held_out_repos: bucket.clone(),
            rule_count: fold_rules.len(),
            usage_count: fold_usages.len(),
            cells,
        });
    }
    let overall = average_folds(&folds, variants, thresholds);
    CvReport { folds, overall }
}

/// Evaluates all rules against all usages in one pass, without holding
/// anything out (rules still skip usages derived from their own origin
/// entry). The result is shaped like a one-fold cross-validation so the
/// same reporting applies.
pub fn evaluate_all(
    rules: &[MinedRule],
    usages: &[UsageCase],
    variants: &[DistanceFn],
    thresholds: &[f64],
) -> CvReport {
    let mut repos: Vec<String> = usages.iter().map(|usage| usage.repo.clone()).collect();
    repos.sort();
    repos.dedup();
    let folds = vec![FoldReport {
        fold: 0,
        held_out_repos: repos,
        rule_count: rules.len(),
        usage_count: usages.len(),
        cells: evaluate_grid(rules, usages, variants, thresholds),
    }];
    let overall = average_folds(&folds, variants, thresholds);
    CvReport { folds, overall }
}

fn average_folds(
    folds: &[FoldReport],
    variants: &[DistanceFn],
    thresholds: &[f64],
) -> Vec<MeanCell> {
    let mut overall = Vec::with_capacity(variants.len() * thresholds.len());
    for (position, &variant) in variants.iter().enumerate() {
        for (offset, &threshold) in thresholds.iter().enumerate() {
            let index = position * thresholds.len() + offset;
            let cells: Vec<&GridCell> = folds.iter().map(|fold| &fold.cells[index]).collect();
            let defined: Vec<f64> =
                cells.iter().filter_map(|cell| cell.relative_precision).collect();
            let mean = |extract: fn(&GridCell) -> f64| {
                if cells.is_empty() {
                    0.0
                } else {
                    cells.iter().map(|cell| extract(cell)).sum::<f64>() / cells.len() as f64
                }
            };
            overall.push(MeanCell {
                distance_fn: variant,
                threshold,
                folds: cells.len(),
                relative_precision: if defined.is_empty() {
                    None
                } else {
                    Some(defined.iter().sum::<f64>() / defined.len() as f64)
                },
                conservative_precision: mean(|cell| cell.conservative_precision),
                recall: mean(|cell| cell.recall),
                applicable_rules: mean(|cell| cell.applicable_rules as f64),
                true_positives: mean(|cell| cell.true_positives as f64),
            });
        }
    }
    overall
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::GroundTruth;
    use crate::graph::{EdgeLabel, UsageGraph, UsageGraphBuilder};
    use crate::harness::corpus::derived_usages;
    use crate::rule::build_change_rule;

    fn two_calls(id: &str, first: &str, second: &str) -> UsageGraph {
        let mut b = UsageGraphBuilder::new(id);
        let recv = b.data("A", "lib.A");
        let x = b.action(first, "lib.A");
        let y = b.action(second, "lib.A");
        b.add_edge(recv, x, EdgeLabel::Recv);
        b.add_edge(recv, y, EdgeLabel::Recv);
        b.add_edge(x, y, EdgeLabel::Order);
        b.build()
    }

    fn mined(id: &str, repo: &str, stem: &str) -> MinedRule {
        let flawed = two_calls(id, &format!("A.{stem}()"), "A.bad()");
        let corrected = two_calls(id, &format!("A.{stem}()"), "A.good()");
        MinedRule {
            id: id.to_owned(),
            repo: repo.to_owned(),
            rule: build_change_rule(&flawed, &corrected),
            flawed_graph: flawed,
            corrected_graph: corrected,
        }
    }

    #[test]
    fn folds_hold_out_whole_repositories() {
        // Two clones of the same flaw live in different repositories, so
        // each fold's rule (from the other repository) still detects the
        // held-out misuse.
        let rules = vec![mined("e1", "repo-a", "shared"), mined("e2", "repo-b", "shared")];
        let usages = derived_usages(&rules);
        let report = cross_validate(
            &rules,
            &usages,
            2,
            &[DistanceFn::ExasVectorL1Norm],
            &[0.4],
        );
        assert_eq!(report.folds.len(), 2);
        for fold in &report.folds {
            assert_eq!(fold.rule_count, 1);
            assert_eq!(fold.usage_count, 2);
            assert_eq!(fold.held_out_repos.len(), 1);
            // The training rule comes from the other repository.
            let cell = &fold.cells[0];
            assert_eq!(cell.relative_precision, Some(1.0));
            assert_eq!(cell.true_positives, 1);
        }
        let overall = &report.overall[0];
        assert_eq!(overall.folds, 2);
        assert_eq!(overall.relative_precision, Some(1.0));
        assert_eq!(overall.true_positives, 1.0);
    }

    #[test]
    fn single_repository_corpora_yield_no_usable_fold() {
        // Every rule shares the held-out repository, so each fold is empty
        // on one side and is skipped.
        let rules = vec![mined("e1", "only-repo", "one"), mined("e2", "only-repo", "two")];
        let usages = derived_usages(&rules);
        let report =
            cross_validate(&rules, &usages, 2, &[DistanceFn::ExasVectorL1Norm], &[0.4]);
        assert!(report.folds.is_empty());
        assert_eq!(report.overall[0].folds, 0);
        assert_eq!(report.overall[0].relative_precision, None);
    }

    #[test]
    fn overall_averages_only_defined_relative_precisions() {
        // repo-a's rule detects the clone in repo-b, but repo-b's rule has
        // nothing to find in repo-a (different labels): one fold flags,
        // the other does not.
        let rules = vec![mined("e1", "repo-a", "shared"), mined("e2", "repo-b", "unique")];
        let mut usages = derived_usages(&rules);
        // Give repo-a's fold a detectable misuse of repo-b's rule... the
        // derived usages already pair each rule with its own entry, which
        // is skipped; drop repo-a's own-derived usages so its fold has only
        // an unrelated usage and cannot flag anything.
        usages.retain(|usage| usage.repo != "repo-a");
        usages.push(UsageCase {
            id: "extra".into(),
            repo: "repo-a".into(),
            truth: GroundTruth::Correct,
            graph: two_calls("extra", "B.x()", "B.y()"),
        });
        let report =
            cross_validate(&rules, &usages, 2, &[DistanceFn::ExasVectorL1Norm], &[0.4]);
        assert_eq!(report.folds.len(), 2);
        let defined: Vec<Option<f64>> =
            report.folds.iter().map(|fold| fold.cells[0].relative_precision).collect();
        assert!(defined.contains(&Some(1.0)));
        assert!(defined.contains(&None));
        // The overall mean ignores the undefined fold.
        assert_eq!(report.overall[0].relative_precision, Some(1.0));
        assert_eq!(report.overall[0].folds, 2);
    }
}
