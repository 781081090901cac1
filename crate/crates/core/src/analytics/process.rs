use std::collections::{BTreeMap, BTreeSet};

use super::winsorize::{mean, Cap};
use crate::classifier::ClassifierVerdict;
use crate::ingestion::{author_commit_counts, CommitRecord};
use crate::{Error, Result};

/// Default per-developer commit cap.
pub const SPEED_CAP: usize = 500;

/// Minimum newcomers for an onboarding ratio.
pub const ONBOARDING_MIN_NEW: usize = 10;

fn non_corrective_sizes<'a>(
    commits: &'a [CommitRecord],
    verdicts: &'a [ClassifierVerdict],
) -> Result<impl Iterator<Item = &'a CommitRecord>> {
    if commits.len() != verdicts.len() {
        return Err(Error::InvalidArgument(format!(
            "{} commits but {} verdicts",
            commits.len(),
            verdicts.len()
        )));
    }
    Ok(commits
        .iter()
        .zip(verdicts)
        .filter(|(c, v)| !v.corrective && !c.files.is_empty())
        .map(|(c, _)| c))
}

/// Mean number of files per non-corrective commit, after capping.
///
/// Corrective commits tend to be small, so they are left out to keep the
/// corrective rate from leaking into the coupling value. Commits without
/// files are ignored; `None` when nothing is left.
pub fn coupling(
    commits: &[CommitRecord],
    verdicts: &[ClassifierVerdict],
    cap: Cap,
) -> Result<Option<f64>> {
    let sizes: Vec<f64> = non_corrective_sizes(commits, verdicts)?
        .map(|c| c.files.len() as f64)
        .collect();
    if sizes.is_empty() {
        return Ok(None);
    }
    Ok(mean(&cap.apply(&sizes)?))
}

/// Per-file variant: each file's mean non-corrective commit size, averaged
/// over files.
pub fn coupling_per_file(
    commits: &[CommitRecord],
    verdicts: &[ClassifierVerdict],
    cap: Cap,
) -> Result<Option<f64>> {
    let selected: Vec<&CommitRecord> = non_corrective_sizes(commits, verdicts)?.collect();
    if selected.is_empty() {
        return Ok(None);
    }
    let sizes: Vec<f64> = selected.iter().map(|c| c.files.len() as f64).collect();
    let capped = cap.apply(&sizes)?;
    let mut per_file: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for (c, size) in selected.iter().zip(capped) {
        for f in &c.files {
            let e = per_file.entry(f.as_str()).or_default();
            e.0 += size;
            e.1 += 1;
        }
    }
    let file_means: Vec<f64> = per_file.values().map(|(s, n)| s / *n as f64).collect();
    Ok(mean(&file_means))
}

/// Mean capped non-merge commit count over involved authors.
pub fn developer_speed(
    commits: &[CommitRecord],
    involved: &BTreeSet<String>,
    cap: usize,
) -> Option<f64> {
    if involved.is_empty() {
        return None;
    }
    let counts = author_commit_counts(commits);
    let total: usize = involved
        .iter()
        .map(|a| counts.get(a.as_str()).copied().unwrap_or(0).min(cap))
        .sum();
    Some(total as f64 / involved.len() as f64)
}

/// Share of `base` authors present in `next`.
pub fn retention(base: &BTreeSet<String>, next: &BTreeSet<String>) -> Option<f64> {
    if base.is_empty() {
        return None;
    }
    Some(base.intersection(next).count() as f64 / base.len() as f64)
}

/// Among authors of the next year not seen before, the share that became
/// involved. `None` with fewer than `min_new` newcomers.
pub fn onboarding(
    prior_authors: &BTreeSet<String>,
    next_authors: &BTreeSet<String>,
    next_involved: &BTreeSet<String>,
    min_new: usize,
) -> Option<f64> {
    let newcomers: Vec<&String> = next_authors.difference(prior_authors).collect();
    if newcomers.is_empty() || newcomers.len() < min_new {
        return None;
    }
    let involved = newcomers
        .iter()
        .filter(|a| next_involved.contains(**a))
        .count();
    Some(involved as f64 / newcomers.len() as f64)
}
