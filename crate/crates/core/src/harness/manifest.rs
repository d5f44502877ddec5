//! Tab-separated corpus manifests.
//!
//! Each non-empty, non-comment line describes one fixing commit:
//!
//! ```text
//! repo_uri<TAB>fixing_commit<TAB>file_path<TAB>method_decl[<TAB>label]
//! ```
//!
//! `repo_uri` is the repository location (a local path for the bundled
//! version-control backend), `file_path` is relative to the repository
//! root, and `method_decl` is the method name, optionally carrying a
//! parenthesized signature which is ignored during lookup. The optional
//! `label` column (`misuse` or `correct`) classifies usage manifests; rule
//! manifests leave it out. Lines starting with `#` are comments.

use std::fs;
use std::path::Path;

use crate::detector::GroundTruth;

/// One manifest row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub repo: String,
    pub commit: String,
    pub file_path: String,
    pub method: String,
    pub label: Option<GroundTruth>,
}

impl ManifestEntry {
    /// Stable identifier of the entry, unique per (repo, commit, file,
    /// method) coordinate.
    pub fn id(&self) -> String {
        format!("{}#{}#{}#{}", self.repo, self.commit, self.file_path, self.method)
    }

    /// The bare method name: everything before a signature suffix.
    pub fn method_name(&self) -> &str {
        self.method.split('(').next().unwrap_or(&self.method).trim()
    }
}

/// Error raised while reading a manifest.
#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest line {line}: {problem}")]
    Row { line: usize, problem: String },
}

/// Parses manifest text. Blank lines and `#` comments are skipped; all
/// other lines must carry four or five tab-separated columns.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, ManifestError> {
    let mut entries = Vec::new();
    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw_line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        let columns: Vec<&str> = trimmed.split('\t').collect();
        if columns.len() < 4 || columns.len() > 5 {
            return Err(ManifestError::Row {
                line,
                problem: format!("expected 4 or 5 tab-separated columns, found {}", columns.len()),
            });
        }
        for (position, column) in columns.iter().enumerate() {
            if column.trim().is_empty() {
                return Err(ManifestError::Row {
                    line,
                    problem: format!("column {} is empty", position + 1),
                });
            }
        }
        let label = match columns.get(4) {
            None => None,
            Some(&text) => match text.trim().to_ascii_lowercase().as_str() {
                "misuse" => Some(GroundTruth::Misuse),
                "correct" => Some(GroundTruth::Correct),
                other => {
                    return Err(ManifestError::Row {
                        line,
                        problem: format!(
                            "label must be `misuse` or `correct`, found `{other}`"
                        ),
                    })
                }
            },
        };
        entries.push(ManifestEntry {
            repo: columns[0].trim().to_owned(),
            commit: columns[1].trim().to_owned(),
            file_path: columns[2].trim().to_owned(),
            method: columns[3].trim().to_owned(),
            label,
        });
    }
    Ok(entries)
}

/// Reads and parses a manifest file.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, ManifestError> {
    let text = fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_manifest(&text)
}
