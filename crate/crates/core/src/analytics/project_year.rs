use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::files::{dominant_language, file_length_stats, HeadEntry};
use super::process::{
    coupling, coupling_per_file, developer_speed, onboarding, retention, ONBOARDING_MIN_NEW,
    SPEED_CAP,
};
use super::winsorize::Cap;
use crate::classifier::{ClassifierVerdict, TermModel};
use crate::estimator::{estimate_ccp, CcpEstimate, ModelPerformance, Validity};
use crate::ingestion::{active_authors, involved_authors, CommitRecord, INVOLVEMENT_THRESHOLD};
use crate::{Error, Result, Scalar};

/// Classifies every commit and estimates the CCP of the list.
pub fn project_ccp<T: Scalar>(
    commits: &[CommitRecord],
    model: &TermModel,
    perf: &ModelPerformance<T>,
) -> Result<CcpEstimate<T>> {
    if commits.is_empty() {
        return Err(Error::EmptyInput("project CCP of an empty commit list"));
    }
    let k = commits
        .iter()
        .filter(|c| model.classify(&c.message).corrective)
        .count();
    estimate_ccp(k, commits.len(), perf)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatsOptions {
    pub involvement_threshold: usize,
    pub coupling_cap: Cap,
    pub speed_cap: usize,
    pub onboarding_min_new: usize,
    pub file_cap: Cap,
}

impl Default for StatsOptions {
    fn default() -> Self {
        Self {
            involvement_threshold: INVOLVEMENT_THRESHOLD,
            coupling_cap: Cap::Quantile(0.99),
            speed_cap: SPEED_CAP,
            onboarding_min_new: ONBOARDING_MIN_NEW,
            file_cap: Cap::Quantile(0.99),
        }
    }
}

/// Metrics of one project in one calendar year.
///
/// Retention and onboarding look one year ahead and are absent for the last
/// year of the history.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectYearStats {
    pub repo_id: String,
    pub year: i32,
    pub n_commits: usize,
    pub n_non_merge_commits: usize,
    pub k_hits: usize,
    pub ccp: CcpEstimate<f64>,
    pub coupling: Option<f64>,
    pub coupling_per_file: Option<f64>,
    pub speed: Option<f64>,
    pub developers: usize,
    pub involved_developers: usize,
    /// Involved developers of this year active at all next year.
    pub retention: Option<f64>,
    /// Involved developers of this year still involved next year.
    pub retention_involved: Option<f64>,
    pub onboarding: Option<f64>,
    pub dominant_language: Option<String>,
    pub avg_file_kb: Option<f64>,
}

/// Flat CSV row; field names match the JSON form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRow {
    pub repo_id: String,
    pub year: i32,
    pub n_commits: usize,
    pub n_non_merge_commits: usize,
    pub k_hits: usize,
    pub hit_rate: f64,
    pub ccp: f64,
    pub ccp_status: Validity,
    pub coupling: Option<f64>,
    pub coupling_per_file: Option<f64>,
    pub speed: Option<f64>,
    pub developers: usize,
    pub involved_developers: usize,
    pub retention: Option<f64>,
    pub retention_involved: Option<f64>,
    pub onboarding: Option<f64>,
    pub dominant_language: Option<String>,
    pub avg_file_kb: Option<f64>,
}

impl ProjectYearStats {
    pub fn to_row(&self) -> StatsRow {
        StatsRow {
            repo_id: self.repo_id.clone(),
            year: self.year,
            n_commits: self.n_commits,
            n_non_merge_commits: self.n_non_merge_commits,
            k_hits: self.k_hits,
            hit_rate: self.ccp.hit_rate,
            ccp: self.ccp.ccp_raw,
            ccp_status: self.ccp.status,
            coupling: self.coupling,
            coupling_per_file: self.coupling_per_file,
            speed: self.speed,
            developers: self.developers,
            involved_developers: self.involved_developers,
            retention: self.retention,
            retention_involved: self.retention_involved,
            onboarding: self.onboarding,
            dominant_language: self.dominant_language.clone(),
            avg_file_kb: self.avg_file_kb,
        }
    }
}

/// Computes the metrics of `year` for one repository.
///
/// `by_year` holds the whole history of the repository, windowed by year;
/// later years feed the retention and onboarding ratios.
pub fn project_year_stats(
    repo_id: &str,
    by_year: &BTreeMap<i32, Vec<CommitRecord>>,
    year: i32,
    model: &TermModel,
    perf: &ModelPerformance<f64>,
    options: &StatsOptions,
    head_listing: Option<&[HeadEntry]>,
) -> Result<ProjectYearStats> {
    let commits = by_year
        .get(&year)
        .filter(|c| !c.is_empty())
        .ok_or_else(|| Error::InvalidArgument(format!("{repo_id} has no commits in {year}")))?;

    let verdicts: Vec<ClassifierVerdict> =
        commits.iter().map(|c| model.classify(&c.message)).collect();
    let k = verdicts.iter().filter(|v| v.corrective).count();
    let ccp = estimate_ccp(k, commits.len(), perf)?;

    let involved = involved_authors(commits, options.involvement_threshold);
    let authors = active_authors(commits);

    let last_year = *by_year.keys().next_back().expect("non-empty map");
    let (retention_any, retention_inv, onboard) = if year < last_year {
        let next: &[CommitRecord] = by_year.get(&(year + 1)).map_or(&[], Vec::as_slice);
        let next_authors = active_authors(next);
        let next_involved = involved_authors(next, options.involvement_threshold);
        let prior: BTreeSet<String> = by_year
            .range(..=year)
            .flat_map(|(_, cs)| cs.iter().map(|c| c.author_id.clone()))
            .collect();
        (
            retention(&involved, &next_authors),
            retention(&involved, &next_involved),
            onboarding(
                &prior,
                &next_authors,
                &next_involved,
                options.onboarding_min_new,
            ),
        )
    } else {
        (None, None, None)
    };

    let (dominant, avg_file_kb) = match head_listing {
        Some(listing) if !listing.is_empty() => (
            dominant_language(listing)?,
            Some(file_length_stats(listing, options.file_cap)?.mean_kb),
        ),
        _ => (None, None),
    };

    Ok(ProjectYearStats {
        repo_id: repo_id.to_string(),
        year,
        n_commits: commits.len(),
        n_non_merge_commits: commits.iter().filter(|c| !c.is_merge).count(),
        k_hits: k,
        ccp,
        coupling: coupling(commits, &verdicts, options.coupling_cap)?,
        coupling_per_file: coupling_per_file(commits, &verdicts, options.coupling_cap)?,
        speed: developer_speed(commits, &involved, options.speed_cap),
        developers: authors.len(),
        involved_developers: involved.len(),
        retention: retention_any,
        retention_involved: retention_inv,
        onboarding: onboard,
        dominant_language: dominant,
        avg_file_kb,
    })
}

/// [`project_year_stats`] for every year of the history.
pub fn project_years(
    repo_id: &str,
    by_year: &BTreeMap<i32, Vec<CommitRecord>>,
    model: &TermModel,
    perf: &ModelPerformance<f64>,
    options: &StatsOptions,
) -> Result<Vec<ProjectYearStats>> {
    by_year
        .iter()
        .filter(|(_, cs)| !cs.is_empty())
        .map(|(&y, _)| project_year_stats(repo_id, by_year, y, model, perf, options, None))
        .collect()
}
