use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet};

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use super::CommitRecord;
use crate::{Error, Result};

/// A project sharing more than this many analysis-year commits with a larger
/// project is treated as a copy of it.
pub const DOMINANCE_SHARED_COMMITS: usize = 50;

/// One row of the project metadata CSV `repo_id,owner,name,is_fork`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectMetadata {
    pub repo_id: String,
    pub owner: String,
    pub name: String,
    pub is_fork: bool,
}

pub fn parse_project_metadata(text: &str) -> Result<Vec<ProjectMetadata>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    reader
        .deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Parse {
                line: i + 2,
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectDescriptor {
    pub repo_id: String,
    pub owner: String,
    pub name: String,
    pub is_fork: bool,
    hashes_by_year: BTreeMap<i32, BTreeSet<String>>,
}

impl ProjectDescriptor {
    pub fn new(meta: ProjectMetadata) -> Self {
        Self {
            repo_id: meta.repo_id,
            owner: meta.owner,
            name: meta.name,
            is_fork: meta.is_fork,
            hashes_by_year: BTreeMap::new(),
        }
    }

    /// Descriptor for a repository without metadata: `owner/name` ids are
    /// split, anything else becomes its own owner and name.
    pub fn from_repo_id(repo_id: &str) -> Self {
        let (owner, name) = repo_id.split_once('/').unwrap_or((repo_id, repo_id));
        Self::new(ProjectMetadata {
            repo_id: repo_id.to_string(),
            owner: owner.to_string(),
            name: name.to_string(),
            is_fork: false,
        })
    }

    pub fn add_commit(&mut self, year: i32, hash: impl Into<String>) {
        self.hashes_by_year
            .entry(year)
            .or_default()
            .insert(hash.into());
    }

    pub fn with_commits<'a>(mut self, commits: impl IntoIterator<Item = &'a CommitRecord>) -> Self {
        for c in commits {
            self.add_commit(c.timestamp.year(), c.hash.clone());
        }
        self
    }

    pub fn commit_count_in(&self, year: i32) -> usize {
        self.hashes_by_year.get(&year).map_or(0, BTreeSet::len)
    }

    pub fn commit_count_by_year(&self) -> BTreeMap<i32, usize> {
        self.hashes_by_year
            .iter()
            .map(|(y, h)| (*y, h.len()))
            .collect()
    }

    pub fn total_commits(&self) -> usize {
        self.hashes_by_year.values().map(BTreeSet::len).sum()
    }

    pub fn commit_hashes(&self) -> BTreeSet<&str> {
        self.hashes_by_year
            .values()
            .flatten()
            .map(String::as_str)
            .collect()
    }

    fn shared_in(&self, other: &Self, year: i32) -> usize {
        match (
            self.hashes_by_year.get(&year),
            other.hashes_by_year.get(&year),
        ) {
            (Some(a), Some(b)) => a.intersection(b).count(),
            _ => 0,
        }
    }

    /// Larger = more commits in `year`, then more commits overall, then the
    /// smaller repo id.
    fn size_key(&self, year: i32) -> (usize, usize, Reverse<&str>) {
        (
            self.commit_count_in(year),
            self.total_commits(),
            Reverse(self.repo_id.as_str()),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ExclusionRule {
    MinCommits { commits: usize, required: usize },
    Fork,
    Dominated { by: String, shared: usize },
    DuplicateName { kept: String },
}

impl ExclusionRule {
    pub fn name(&self) -> &'static str {
        match self {
            ExclusionRule::MinCommits { .. } => "min_commits",
            ExclusionRule::Fork => "fork",
            ExclusionRule::Dominated { .. } => "dominated",
            ExclusionRule::DuplicateName { .. } => "duplicate_name",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExcludedProject {
    pub repo_id: String,
    #[serde(flatten)]
    pub rule: ExclusionRule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionOutcome {
    pub accepted: Vec<ProjectDescriptor>,
    pub excluded: Vec<ExcludedProject>,
}

/// Applies, in order: the minimum commit count for `year`, fork removal,
/// removal of projects dominated by a larger surviving project, and
/// same-name deduplication (the owner with more input projects wins, ties to
/// the lexicographically smaller owner).
pub fn select_projects(
    projects: &[ProjectDescriptor],
    year: i32,
    min_commits: usize,
) -> SelectionOutcome {
    let mut excluded: BTreeMap<usize, ExclusionRule> = BTreeMap::new();

    for (i, p) in projects.iter().enumerate() {
        let commits = p.commit_count_in(year);
        if commits < min_commits {
            excluded.insert(
                i,
                ExclusionRule::MinCommits {
                    commits,
                    required: min_commits,
                },
            );
        } else if p.is_fork {
            excluded.insert(i, ExclusionRule::Fork);
        }
    }

    let mut by_size: Vec<usize> = (0..projects.len())
        .filter(|i| !excluded.contains_key(i))
        .collect();
    by_size.sort_by(|&a, &b| projects[b].size_key(year).cmp(&projects[a].size_key(year)));
    let mut kept: Vec<usize> = Vec::with_capacity(by_size.len());
    for i in by_size {
        let dominator = kept.iter().find_map(|&k| {
            let shared = projects[i].shared_in(&projects[k], year);
            (shared > DOMINANCE_SHARED_COMMITS).then_some((k, shared))
        });
        match dominator {
            Some((k, shared)) => {
                excluded.insert(
                    i,
                    ExclusionRule::Dominated {
                        by: projects[k].repo_id.clone(),
                        shared,
                    },
                );
            }
            None => kept.push(i),
        }
    }

    let mut owner_projects: BTreeMap<&str, usize> = BTreeMap::new();
    for p in projects {
        *owner_projects.entry(p.owner.as_str()).or_default() += 1;
    }
    let mut by_name: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for &i in &kept {
        by_name
            .entry(projects[i].name.as_str())
            .or_default()
            .push(i);
    }
    for candidates in by_name.values().filter(|c| c.len() > 1) {
        let preference = |&a: &usize, &b: &usize| -> Ordering {
            let (pa, pb) = (&projects[a], &projects[b]);
            owner_projects[pb.owner.as_str()]
                .cmp(&owner_projects[pa.owner.as_str()])
                .then_with(|| pa.owner.cmp(&pb.owner))
                .then_with(|| pa.repo_id.cmp(&pb.repo_id))
        };
        let winner = *candidates
            .iter()
            .min_by(|a, b| preference(a, b))
            .expect("non-empty");
        for &i in candidates.iter().filter(|&&i| i != winner) {
            excluded.insert(
                i,
                ExclusionRule::DuplicateName {
                    kept: projects[winner].repo_id.clone(),
                },
            );
        }
    }

    let accepted = projects
        .iter()
        .enumerate()
        .filter(|(i, _)| !excluded.contains_key(i))
        .map(|(_, p)| p.clone())
        .collect();
    let excluded = excluded
        .into_iter()
        .map(|(i, rule)| ExcludedProject {
            repo_id: projects[i].repo_id.clone(),
            rule,
        })
        .collect();
    SelectionOutcome { accepted, excluded }
}
