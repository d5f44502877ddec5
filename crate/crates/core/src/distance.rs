//! Distances between usage graphs built on Exas feature vectors.
//!
//! A distance combines two parts: a set-overlap part over the feature sets
//! and a count part over the sub-vectors restricted to the shared features,
//! mixed by a weight lambda in [0, 1). Twelve named variants cover every
//! combination of count norm (L1, cosine, or the indicator collapse),
//! API-only feature filtering, and per-package graph splitting.
//!
//! Conventions where the raw formulas are undefined: two empty vectors are
//! identical (distance 0); exactly one empty vector is maximal overlap
//! failure (set part 1); an empty shared feature set makes the count part 1.

use std::fmt;
use std::str::FromStr;

use crate::exas::{split_graph, vectorize, ExasVector};
use crate::graph::UsageGraph;

pub const DEFAULT_LAMBDA: f64 = 0.5;

/// Norm applied to the shared-feature sub-vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    Cosine,
    /// Counts are flattened to 1, so any shared feature means a count part
    /// of exactly 0 and no shared feature means 1.
    IndicatorCollapsed,
}

/// Full configuration of one distance variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceConfig {
    pub norm: Norm,
    pub api_only: bool,
    pub split: bool,
    /// Weight of the set-overlap part; the count part gets 1 - lambda.
    pub lambda: f64,
}

impl DistanceConfig {
    pub fn new(norm: Norm, api_only: bool, split: bool) -> Self {
        DistanceConfig {
            norm,
            api_only,
            split,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

macro_rules! distance_fns {
    ($(($variant:ident, $name:literal, $norm:expr, $api:literal, $split:literal)),+ $(,)?) => {
        /// The twelve named distance variants.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum DistanceFn {
            $($variant),+
        }

        impl DistanceFn {
            pub const ALL: [DistanceFn; 12] = [$(DistanceFn::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(DistanceFn::$variant => $name),+
                }
            }

            pub fn config(self) -> DistanceConfig {
                match self {
                    $(DistanceFn::$variant => DistanceConfig::new($norm, $api, $split)),+
                }
            }
        }

        impl FromStr for DistanceFn {
            type Err = UnknownDistanceFn;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name => Ok(DistanceFn::$variant),)+
                    other => Err(UnknownDistanceFn(other.to_string())),
                }
            }
        }
    };
}

distance_fns![
    (ExasVectorL1Norm, "ExasVectorL1Norm", Norm::L1, false, false),
    (ExasVectorCosine, "ExasVectorCosine", Norm::Cosine, false, false),
    (IndicatorExasVector, "IndicatorExasVector", Norm::IndicatorCollapsed, false, false),
    (ApiExasVectorL1Norm, "APIExasVectorL1Norm", Norm::L1, true, false),
    (ApiExasVectorCosine, "APIExasVectorCosine", Norm::Cosine, true, false),
    (ApiIndicatorExasVector, "APIIndicatorExasVector", Norm::IndicatorCollapsed, true, false),
    (ExasVectorSplitL1Norm, "ExasVectorSplitL1Norm", Norm::L1, false, true),
    (ExasVectorSplitCosine, "ExasVectorSplitCosine", Norm::Cosine, false, true),
    (IndicatorExasVectorSplit, "IndicatorExasVectorSplit", Norm::IndicatorCollapsed, false, true),
    (ApiExasVectorSplitL1Norm, "APIExasVectorSplitL1Norm", Norm::L1, true, true),
    (ApiExasVectorSplitCosine, "APIExasVectorSplitCosine", Norm::Cosine, true, true),
    (ApiIndicatorExasVectorSplit, "APIIndicatorExasVectorSplit", Norm::IndicatorCollapsed, true, true),
];

impl fmt::Display for DistanceFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown distance function `{0}`")]
pub struct UnknownDistanceFn(pub String);

/// Set-overlap part: 1 minus the best coverage ratio of the shared feature
/// set against either full vector.
pub fn feature_dist(a: &ExasVector, b: &ExasVector) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let shared = a.shared_feature_count(b) as f64;
    1.0 - f64::max(shared / b.len() as f64, shared / a.len() as f64)
}

/// Count part, L1: the difference of the shared sub-vectors, scaled by its
/// own maximum absolute entry and by the sub-vector length. Empty shared
/// set means 1.
pub fn feature_count_l1(a: &ExasVector, b: &ExasVector) -> f64 {
    let shared = a.shared_counts(b);
    if shared.is_empty() {
        return 1.0;
    }
    let diffs: Vec<u64> = shared.iter().map(|&(x, y)| x.abs_diff(y)).collect();
    let max_diff = *diffs.iter().max().expect("non-empty").max(&1);
    let sum: u64 = diffs.iter().sum();
    sum as f64 / (max_diff as f64 * shared.len() as f64)
}

/// Count part, cosine: 1 minus the cosine of the shared sub-vectors. Equal
/// sub-vectors give exactly 0; an empty shared set gives 1.
pub fn feature_count_cosine(a: &ExasVector, b: &ExasVector) -> f64 {
    let shared = a.shared_counts(b);
    if shared.is_empty() {
        return 1.0;
    }
    if shared.iter().all(|&(x, y)| x == y) {
        return 0.0;
    }
    let mut dot = 0u128;
    let mut na = 0u128;
    let mut nb = 0u128;
    for &(x, y) in &shared {
        dot += x as u128 * y as u128;
        na += x as u128 * x as u128;
        nb += y as u128 * y as u128;
    }
    let cos = dot as f64 / ((na as f64).sqrt() * (nb as f64).sqrt());
    (1.0 - cos).clamp(0.0, 1.0)
}

/// Combines set part and count part on already prepared vectors.
pub fn vector_dist(a: &ExasVector, b: &ExasVector, norm: Norm, lambda: f64) -> f64 {
    assert!(
        (0.0..1.0).contains(&lambda),
        "lambda must lie in [0, 1), got {lambda}"
    );
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let set_part = feature_dist(a, b);
    let count_part = match norm {
        Norm::L1 => feature_count_l1(a, b),
        Norm::Cosine => feature_count_cosine(a, b),
        Norm::IndicatorCollapsed => {
            if a.shared_feature_count(b) > 0 {
                0.0
            } else {
                1.0
            }
        }
    };
    lambda * set_part + (1.0 - lambda) * count_part
}

fn prepared_vector(g: &UsageGraph, cfg: &DistanceConfig) -> ExasVector {
    let v = vectorize(g);
    if cfg.api_only {
        v.filter_api_features()
    } else {
        v
    }
}

/// Whole-graph distance, ignoring the split flag.
pub fn combined_dist(a: &UsageGraph, b: &UsageGraph, cfg: &DistanceConfig) -> f64 {
    vector_dist(
        &prepared_vector(a, cfg),
        &prepared_vector(b, cfg),
        cfg.norm,
        cfg.lambda,
    )
}

/// Mean over the sub-distances that are not exactly 1; all 1 (or none at
/// all) means 1.
pub fn mean_non_distinct(subs: &[f64]) -> f64 {
    let kept: Vec<f64> = subs.iter().copied().filter(|d| *d != 1.0).collect();
    if kept.is_empty() {
        1.0
    } else {
        kept.iter().sum::<f64>() / kept.len() as f64
    }
}

/// Split distance: both graphs are split per package group, same-labeled
/// groups are compared with the whole-graph distance, a group present on
/// only one side scores 1, and the non-1 sub-distances are averaged.
pub fn split_dist(a: &UsageGraph, b: &UsageGraph, cfg: &DistanceConfig) -> f64 {
    let groups_a = split_graph(a);
    let groups_b = split_graph(b);
    if groups_a.is_empty() && groups_b.is_empty() {
        return 0.0;
    }
    let labels: std::collections::BTreeSet<&String> =
        groups_a.keys().chain(groups_b.keys()).collect();
    let subs: Vec<f64> = labels
        .into_iter()
        .map(|label| match (groups_a.get(label), groups_b.get(label)) {
            (Some(ga), Some(gb)) => combined_dist(ga, gb, cfg),
            _ => 1.0,
        })
        .collect();
    mean_non_distinct(&subs)
}

/// Distance between two usage graphs under the given configuration.
pub fn dist(a: &UsageGraph, b: &UsageGraph, cfg: &DistanceConfig) -> f64 {
    if cfg.split {
        split_dist(a, b, cfg)
    } else {
        combined_dist(a, b, cfg)
    }
}

/// Convenience entry point for a named variant at the default lambda.
pub fn dist_fn(a: &UsageGraph, b: &UsageGraph, f: DistanceFn) -> f64 {
    dist(a, b, &f.config())
}
