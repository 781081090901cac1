use std::collections::BTreeMap;

use regex::{Regex, RegexBuilder};
use serde::Serialize;

use crate::classifier::TermModel;
use crate::estimator::{estimate_ccp, CcpEstimate, ModelPerformance};
use crate::ingestion::CommitRecord;
use crate::{Error, Result};

/// Direct references to poor code quality.
pub const QUALITY_TERMS: &[&str] = &[
    r"\blow quality\b",
    r"\bcode smells?\b",
    r"\btechnical debt\b",
];

/// Terms unrelated to quality, for negative controls.
pub const CONTROL_TERMS: &[&str] = &[r"\balgorithms?\b", r"\bfunctions?\b"];

#[derive(Debug, Clone)]
pub struct TermSet {
    patterns: Vec<Regex>,
}

impl TermSet {
    pub fn new<S: AsRef<str>>(patterns: &[S]) -> Result<Self> {
        if patterns.is_empty() {
            return Err(Error::InvalidArgument("no terms given".into()));
        }
        let patterns = patterns
            .iter()
            .map(|p| {
                RegexBuilder::new(p.as_ref())
                    .case_insensitive(true)
                    .build()
                    .map_err(|e| Error::InvalidArgument(format!("term {:?}: {e}", p.as_ref())))
            })
            .collect::<Result<_>>()?;
        Ok(Self { patterns })
    }

    pub fn quality() -> Self {
        Self::new(QUALITY_TERMS).expect("built-in terms compile")
    }

    /// Total non-overlapping matches of all terms.
    pub fn occurrences(&self, message: &str) -> usize {
        self.patterns
            .iter()
            .map(|p| p.find_iter(message).count())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    File,
    Project,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TermThresholds {
    pub file_min_commits: usize,
    pub file_rate: f64,
    pub project_min_occurrences: usize,
}

impl Default for TermThresholds {
    fn default() -> Self {
        Self {
            file_min_commits: 10,
            file_rate: 0.1,
            project_min_occurrences: 10,
        }
    }
}

/// Commits sharing a file or a project.
#[derive(Debug, Clone)]
pub struct CommitGroup<'a> {
    pub id: String,
    pub commits: Vec<&'a CommitRecord>,
}

/// One group per touched path, in path order.
pub fn group_by_file(commits: &[CommitRecord]) -> Vec<CommitGroup<'_>> {
    let mut by_file: BTreeMap<&str, Vec<&CommitRecord>> = BTreeMap::new();
    for c in commits {
        for f in &c.files {
            by_file.entry(f.as_str()).or_default().push(c);
        }
    }
    by_file
        .into_iter()
        .map(|(id, commits)| CommitGroup {
            id: id.to_string(),
            commits,
        })
        .collect()
}

pub fn group_by_project(commits: &[CommitRecord]) -> Vec<CommitGroup<'_>> {
    let mut by_repo: BTreeMap<&str, Vec<&CommitRecord>> = BTreeMap::new();
    for c in commits {
        by_repo.entry(c.repo_id.as_str()).or_default().push(c);
    }
    by_repo
        .into_iter()
        .map(|(id, commits)| CommitGroup {
            id: id.to_string(),
            commits,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermFlag {
    pub group_id: String,
    pub n_commits: usize,
    /// Commits mentioning at least one term.
    pub term_commits: usize,
    pub occurrences: usize,
    pub has_term: bool,
    pub ccp: CcpEstimate<f64>,
}

/// Flags groups that talk about the terms and pairs each flag with the
/// group's CCP.
///
/// Files need `file_min_commits` commits to be considered and are flagged
/// when at least `file_rate` of their commits mention a term. Projects are
/// flagged at `project_min_occurrences` total occurrences.
pub fn quality_term_analysis(
    groups: &[CommitGroup<'_>],
    granularity: Granularity,
    terms: &TermSet,
    thresholds: &TermThresholds,
    model: &TermModel,
    perf: &ModelPerformance<f64>,
) -> Result<Vec<TermFlag>> {
    if groups.is_empty() {
        return Err(Error::EmptyInput("term analysis needs at least one group"));
    }
    let mut out = Vec::new();
    for g in groups {
        let n = g.commits.len();
        if n == 0 || (granularity == Granularity::File && n < thresholds.file_min_commits) {
            continue;
        }
        let mut term_commits = 0;
        let mut occurrences = 0;
        let mut hits = 0;
        for c in &g.commits {
            let occ = terms.occurrences(&c.message);
            occurrences += occ;
            term_commits += (occ > 0) as usize;
            hits += model.classify(&c.message).corrective as usize;
        }
        let has_term = match granularity {
            Granularity::File => term_commits as f64 / n as f64 >= thresholds.file_rate,
            Granularity::Project => occurrences >= thresholds.project_min_occurrences,
        };
        out.push(TermFlag {
            group_id: g.id.clone(),
            n_commits: n,
            term_commits,
            occurrences,
            has_term,
            ccp: estimate_ccp(hits, n, perf)?,
        });
    }
    Ok(out)
}
