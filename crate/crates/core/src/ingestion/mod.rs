//! Commit history ingestion and project selection.

mod record;
mod selection;

pub use record::{
    parse_commit_log, parse_raw_git_log, CommitRecord, ParsedLog, SkippedRecord, GIT_LOG_RECIPE,
};
pub use selection::{
    parse_project_metadata, select_projects, ExcludedProject, ExclusionRule, ProjectDescriptor,
    ProjectMetadata, SelectionOutcome, DOMINANCE_SHARED_COMMITS,
};

use std::collections::{BTreeMap, BTreeSet};

use chrono::Datelike;

/// Default involvement threshold: commits per author per year.
pub const INVOLVEMENT_THRESHOLD: usize = 12;

/// Partitions commits by the UTC calendar year of their timestamp.
pub fn window_by_year<I>(commits: I) -> BTreeMap<i32, Vec<CommitRecord>>
where
    I: IntoIterator<Item = CommitRecord>,
{
    let mut out: BTreeMap<i32, Vec<CommitRecord>> = BTreeMap::new();
    for c in commits {
        out.entry(c.timestamp.year()).or_default().push(c);
    }
    out
}

/// Groups commits by repository, keeping input order within each group.
pub fn group_by_repo<I>(commits: I) -> BTreeMap<String, Vec<CommitRecord>>
where
    I: IntoIterator<Item = CommitRecord>,
{
    let mut out: BTreeMap<String, Vec<CommitRecord>> = BTreeMap::new();
    for c in commits {
        out.entry(c.repo_id.clone()).or_default().push(c);
    }
    out
}

/// Non-merge commit counts per author.
pub fn author_commit_counts(commits: &[CommitRecord]) -> BTreeMap<&str, usize> {
    let mut counts = BTreeMap::new();
    for c in commits.iter().filter(|c| !c.is_merge) {
        *counts.entry(c.author_id.as_str()).or_insert(0) += 1;
    }
    counts
}

/// Authors with at least `threshold` non-merge commits.
pub fn involved_authors(commits: &[CommitRecord], threshold: usize) -> BTreeSet<String> {
    author_commit_counts(commits)
        .into_iter()
        .filter(|&(_, n)| n >= threshold)
        .map(|(a, _)| a.to_string())
        .collect()
}

/// Every author with at least one commit, merges included.
pub fn active_authors(commits: &[CommitRecord]) -> BTreeSet<String> {
    commits.iter().map(|c| c.author_id.clone()).collect()
}
