mod analyze;
mod classify;
mod corpus;
mod series;

use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

use ccp_core::ingestion::{parse_commit_log, parse_raw_git_log, CommitRecord};

pub use analyze::{analyze, rank, AnalyzeArgs, RankArgs};
pub use classify::{classify, ClassifyArgs};
pub use corpus::{bootstrap, validate_model, BootstrapArgs, ValidateArgs};
pub use series::{cochange, twin, CoChangeArgs, TwinArgs};

use crate::failure::{CliResult, Failure};

/// Reads a file, or standard input for `-`.
pub fn read_input(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::input(format!("cannot read standard input: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
    }
}

/// Loads commit logs in either the NDJSON export or the raw `git log`
/// recipe format. Raw logs carry no repository id, so `repo` is required.
pub fn load_commits(
    paths: &[impl AsRef<Path>],
    repo: Option<&str>,
) -> CliResult<Vec<CommitRecord>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for path in paths {
        let path = path.as_ref();
        let text = read_input(path)?;
        let parsed = if text.starts_with('\0') {
            let repo = repo.ok_or_else(|| {
                Failure::config(format!(
                    "{} is a raw git log; pass --repo to name the repository",
                    path.display()
                ))
            })?;
            parse_raw_git_log(&text, repo)
        } else {
            parse_commit_log(&text)
        }
        .map_err(|e| Failure::from(e).context(path.display()))?;
        if !parsed.skipped.is_empty() {
            eprintln!(
                "warning: {}: skipped {} record(s); first at line {}: {}",
                path.display(),
                parsed.skipped.len(),
                parsed.skipped[0].line,
                parsed.skipped[0].reason
            );
        }
        for record in parsed.records {
            if seen.insert((record.repo_id.clone(), record.hash.clone())) {
                out.push(record);
            }
        }
    }
    Ok(out)
}

/// Parses `a:b` pairs of non-negative numbers.
pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LOW:HIGH, got {s:?}"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((num(a)?, num(b)?))
}
