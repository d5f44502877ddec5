//! Rendering evaluation results to files.
//!
//! Two artifacts are written: `report.tsv` (one row per fold and cell plus
//! the overall rows, for spreadsheets) and `report.json` (the same data,
//! structured).

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::cv::{CvReport, FoldReport, MeanCell};
use super::eval::GridCell;

#[derive(Serialize)]
struct CellDoc {
    distance_fn: String,
    threshold: f64,
    applicable_rules: usize,
    flagging_rules: usize,
    relative_precision: Option<f64>,
    conservative_precision: f64,
    recall: f64,
    true_positives: u64,
}

impl From<&GridCell> for CellDoc {
    fn from(cell: &GridCell) -> Self {
        CellDoc {
            distance_fn: cell.distance_fn.as_str().to_owned(),
            threshold: cell.threshold,
            applicable_rules: cell.applicable_rules,
            flagging_rules: cell.flagging_rules,
            relative_precision: cell.relative_precision,
            conservative_precision: cell.conservative_precision,
            recall: cell.recall,
            true_positives: cell.true_positives,
        }
    }
}

#[derive(Serialize)]
struct FoldDoc {
    fold: usize,
    held_out_repos: Vec<String>,
    rule_count: usize,
    usage_count: usize,
    cells: Vec<CellDoc>,
}

impl From<&FoldReport> for FoldDoc {
    fn from(fold: &FoldReport) -> Self {
        FoldDoc {
            fold: fold.fold,
            held_out_repos: fold.held_out_repos.clone(),
            rule_count: fold.rule_count,
            usage_count: fold.usage_count,
            cells: fold.cells.iter().map(CellDoc::from).collect(),
        }
    }
}

#[derive(Serialize)]
struct MeanCellDoc {
    distance_fn: String,
    threshold: f64,
    folds: usize,
    relative_precision: Option<f64>,
    conservative_precision: f64,
    recall: f64,
    applicable_rules: f64,
    true_positives: f64,
}

impl From<&MeanCell> for MeanCellDoc {
    fn from(cell: &MeanCell) -> Self {
        MeanCellDoc {
            distance_fn: cell.distance_fn.as_str().to_owned(),
            threshold: cell.threshold,
            folds: cell.folds,
            relative_precision: cell.relative_precision,
            conservative_precision: cell.conservative_precision,
            recall: cell.recall,
            applicable_rules: cell.applicable_rules,
            true_positives: cell.true_positives,
        }
    }
}

#[derive(Serialize)]
struct ReportDoc {
    folds: Vec<FoldDoc>,
    overall: Vec<MeanCellDoc>,
}

fn opt(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.6}")).unwrap_or_default()
}

fn render_tsv(report: &CvReport) -> String {
    let mut out = String::from(
        "scope\tdistance_fn\tthreshold\tapplicable_rules\tflagging_rules\t\
         relative_precision\tconservative_precision\trecall\ttrue_positives\n",
    );
    for fold in &report.folds {
        for cell in &fold.cells {
            writeln!(
                out,
                "fold-{}\t{}\t{:.2}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{}",
                fold.fold,
                cell.distance_fn.as_str(),
                cell.threshold,
                cell.applicable_rules,
                cell.flagging_rules,
                opt(cell.relative_precision),
                cell.conservative_precision,
                cell.recall,
                cell.true_positives,
            )
            .expect("writing to a string cannot fail");
        }
    }
    for cell in &report.overall {
        writeln!(
            out,
            "overall\t{}\t{:.2}\t{:.2}\t\t{}\t{:.6}\t{:.6}\t{:.2}",
            cell.distance_fn.as_str(),
            cell.threshold,
            cell.applicable_rules,
            opt(cell.relative_precision),
            cell.conservative_precision,
            cell.recall,
            cell.true_positives,
        )
        .expect("writing to a string cannot fail");
    }
    out
}

/// Writes `report.tsv` and `report.json` into `dir` (created if missing);
/// returns both paths.
pub fn write_reports(dir: &Path, report: &CvReport) -> io::Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let tsv_path = dir.join("report.tsv");
    fs::write(&tsv_path, render_tsv(report))?;
    let doc = ReportDoc {
        folds: report.folds.iter().map(FoldDoc::from).collect(),
        overall: report.overall.iter().map(MeanCellDoc::from).collect(),
    };
    let json_path = dir.join("report.json");
    let json = serde_json::to_string_pretty(&doc).expect("report serialization cannot fail");
    fs::write(&json_path, json)?;
    Ok((tsv_path, json_path))
}
