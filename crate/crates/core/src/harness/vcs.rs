//! Version extraction through an external version-control binary.
//!
//! Files are read with `<binary> -C <repo> show <revision>:<path>`, which
//! any git-compatible tool understands. The binary is chosen from, in
//! order: an explicit setting, the `VCS_BIN` environment variable, and
//! finally plain `git`.

use std::process::Command;

/// Environment variable naming the version-control binary.
pub const VCS_BIN_ENV: &str = "VCS_BIN";

/// Resolves the version-control binary to invoke.
pub fn vcs_binary(explicit: Option<&str>) -> String {
    if let Some(binary) = explicit {
        return binary.to_owned();
    }
    std::env::var(VCS_BIN_ENV).unwrap_or_else(|_| "git".to_owned())
}

/// The two sides of a fixing commit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VersionPair {
    /// File content just before the fix (parent of the fixing commit).
    pub flawed: String,
    /// File content at the fixing commit.
    pub corrected: String,
}

/// Error raised by the version-control backend.
#[derive(Debug, thiserror::Error)]
pub enum VcsError {
    #[error("cannot run `{binary}`: {source}")]
    Launch {
        binary: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read `{path}` at revision `{revision}`: {detail}")]
    Show { revision: String, path: String, detail: String },
}

/// Reads one file at one revision of a repository.
pub fn show_file(
    binary: &str,
    repo: &str,
    revision: &str,
    path: &str,
) -> Result<String, VcsError> {
    let spec = format!("{revision}:{path}");
    let output = Command::new(binary)
        .args(["-C", repo, "show", &spec])
        .output()
        .map_err(|source| VcsError::Launch { binary: binary.to_owned(), source })?;
    if !output.status.success() {
        let stderr = String::from_utf8_lossy(&output.stderr);
        let detail = stderr.trim();
        return Err(VcsError::Show {
            revision: revision.to_owned(),
            path: path.to_owned(),
            detail: if detail.is_empty() { "no error output".to_owned() } else { detail.to_owned() },
        });
    }
    Ok(String::from_utf8_lossy(&output.stdout).into_owned())
}

/// Reads the flawed (parent) and corrected (commit) versions of the file a
/// fixing commit touches.
pub fn extract_versions(
    binary: &str,
    repo: &str,
    commit: &str,
    path: &str,
) -> Result<VersionPair, VcsError> {
    let flawed = show_file(binary, repo, &format!("{commit}~1"), path)?;
    let corrected = show_file(binary, repo, commit, path)?;
    Ok(VersionPair { flawed, corrected })
}
