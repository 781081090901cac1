use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use ccp_core::analytics::{parse_head_listing, project_year_stats, HeadEntry, ProjectYearStats};
use ccp_core::classifier::{english_hit_rate, terse_message_profile, MessageLengthProfile};
use ccp_core::estimator::{ccp_from_hit_rate, rank_on_scale, Validity};
use ccp_core::ingestion::{
    group_by_repo, parse_project_metadata, select_projects, window_by_year, CommitRecord,
    ExcludedProject, ProjectDescriptor, ProjectMetadata,
};
use clap::Args;
use serde::Serialize;

use super::{load_commits, read_input};
use crate::config::{Format, RunConfig};
use crate::failure::{CliResult, Failure};
use crate::report::{envelope, write_csv, write_json};

/// Medians observed for projects with out-of-domain hit rates, kept beside
/// the measured diagnostics for comparison.
pub const REFERENCE_ENGLISH_RATE_OUT_OF_DOMAIN: f64 = 0.16;
pub const REFERENCE_ENGLISH_RATE_IN_DOMAIN: f64 = 0.54;
pub const REFERENCE_TERSE_MEDIAN_CHARS: usize = 27;
pub const REFERENCE_TERSE_P90_CHARS: usize = 81;

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Commit logs; records from all files are pooled and grouped by repository.
    #[arg(required = true)]
    pub logs: Vec<PathBuf>,
    /// Repository id for raw git logs.
    #[arg(long)]
    pub repo: Option<String>,
    /// CSV `path,size_bytes` listing of the head revision (single repository only).
    #[arg(long)]
    pub head_listing: Option<PathBuf>,
    /// CSV `repo_id,owner,name,is_fork` used by --enforce-selection.
    #[arg(long)]
    pub metadata: Option<PathBuf>,
    /// Report every year of each history instead of one.
    #[arg(long)]
    pub all_years: bool,
}

#[derive(Debug, Serialize)]
struct Reference {
    english_hit_rate_out_of_domain_median: f64,
    english_hit_rate_in_domain_median: f64,
    message_length_median_chars: usize,
    message_length_p90_chars: usize,
}

#[derive(Debug, Serialize)]
struct Diagnostics {
    english_hit_rate: f64,
    message_length: MessageLengthProfile,
    reference: Reference,
}

#[derive(Debug, Serialize)]
struct ProjectReport {
    stats: ProjectYearStats,
    band: Option<String>,
    diagnostics: Option<Diagnostics>,
}

#[derive(Debug, Serialize)]
struct Selection {
    year: i32,
    min_commits: usize,
    accepted: Vec<String>,
    excluded: Vec<ExcludedProject>,
}

#[derive(Debug, Serialize)]
struct AnalyzeResult {
    selection: Option<Selection>,
    projects: Vec<ProjectReport>,
    /// Repositories with no commits in the requested year.
    no_data: Vec<String>,
}

/// CSV row: the flat stats row plus the band.
#[derive(Serialize)]
struct AnalyzeRow {
    repo_id: String,
    year: i32,
    n_commits: usize,
    n_non_merge_commits: usize,
    k_hits: usize,
    hit_rate: f64,
    ccp: f64,
    ccp_status: Validity,
    band: Option<String>,
    coupling: Option<f64>,
    coupling_per_file: Option<f64>,
    speed: Option<f64>,
    developers: usize,
    involved_developers: usize,
    retention: Option<f64>,
    retention_involved: Option<f64>,
    onboarding: Option<f64>,
    dominant_language: Option<String>,
    avg_file_kb: Option<f64>,
}

impl From<&ProjectReport> for AnalyzeRow {
    fn from(p: &ProjectReport) -> Self {
        let r = p.stats.to_row();
        Self {
            repo_id: r.repo_id,
            year: r.year,
            n_commits: r.n_commits,
            n_non_merge_commits: r.n_non_merge_commits,
            k_hits: r.k_hits,
            hit_rate: r.hit_rate,
            ccp: r.ccp,
            ccp_status: r.ccp_status,
            band: p.band.clone(),
            coupling: r.coupling,
            coupling_per_file: r.coupling_per_file,
            speed: r.speed,
            developers: r.developers,
            involved_developers: r.involved_developers,
            retention: r.retention,
            retention_involved: r.retention_involved,
            onboarding: r.onboarding,
            dominant_language: r.dominant_language,
            avg_file_kb: r.avg_file_kb,
        }
    }
}

pub fn analyze<W: Write>(cfg: &RunConfig, args: &AnalyzeArgs, out: &mut W) -> CliResult<()> {
    let commits = load_commits(&args.logs, args.repo.as_deref())?;
    let by_repo = group_by_repo(commits);

    let head: Option<Vec<HeadEntry>> = match &args.head_listing {
        Some(p) => {
            if by_repo.len() != 1 {
                return Err(Failure::config(
                    "--head-listing needs exactly one repository in the input",
                ));
            }
            Some(
                parse_head_listing(&read_input(p)?)
                    .map_err(|e| Failure::from(e).context(p.display()))?,
            )
        }
        None => None,
    };

    let selection = if cfg.settings.enforce_selection {
        Some(run_selection(cfg, args, &by_repo)?)
    } else {
        None
    };

    let mut projects = Vec::new();
    let mut no_data = Vec::new();
    for (repo_id, commits) in &by_repo {
        if let Some(sel) = &selection {
            if !sel.accepted.contains(repo_id) {
                continue;
            }
        }
        let by_year = window_by_year(commits.iter().cloned());
        let years: Vec<i32> = if args.all_years {
            by_year.keys().copied().collect()
        } else {
            let y = cfg
                .settings
                .year
                .unwrap_or_else(|| *by_year.keys().next_back().expect("non-empty"));
            if !by_year.contains_key(&y) {
                no_data.push(repo_id.clone());
                continue;
            }
            vec![y]
        };
        for year in years {
            projects.push(project_report(
                cfg,
                repo_id,
                &by_year,
                year,
                head.as_deref(),
            )?);
        }
    }

    match cfg.settings.format {
        Format::Json => write_json(
            out,
            &envelope(
                cfg,
                "analyze",
                AnalyzeResult {
                    selection,
                    projects,
                    no_data,
                },
            ),
        ),
        Format::Csv => {
            let rows: Vec<AnalyzeRow> = projects.iter().map(AnalyzeRow::from).collect();
            write_csv(out, cfg, "analyze", &rows)
        }
    }
}

fn project_report(
    cfg: &RunConfig,
    repo_id: &str,
    by_year: &BTreeMap<i32, Vec<CommitRecord>>,
    year: i32,
    head: Option<&[HeadEntry]>,
) -> CliResult<ProjectReport> {
    let options = cfg.settings.thresholds.stats_options();
    let stats = project_year_stats(
        repo_id,
        by_year,
        year,
        &cfg.model,
        &cfg.perf.performance,
        &options,
        head,
    )?;
    let (band, diagnostics) = if stats.ccp.status == Validity::Valid {
        (
            Some(rank_on_scale(stats.ccp.ccp_raw, &cfg.table).label()),
            None,
        )
    } else {
        let messages: Vec<&str> = by_year[&year].iter().map(|c| c.message.as_str()).collect();
        let diag = Diagnostics {
            english_hit_rate: english_hit_rate(&messages, &cfg.english)?,
            message_length: terse_message_profile(&messages)?,
            reference: Reference {
                english_hit_rate_out_of_domain_median: REFERENCE_ENGLISH_RATE_OUT_OF_DOMAIN,
                english_hit_rate_in_domain_median: REFERENCE_ENGLISH_RATE_IN_DOMAIN,
                message_length_median_chars: REFERENCE_TERSE_MEDIAN_CHARS,
                message_length_p90_chars: REFERENCE_TERSE_P90_CHARS,
            },
        };
        (None, Some(diag))
    };
    Ok(ProjectReport {
        stats,
        band,
        diagnostics,
    })
}

fn run_selection(
    cfg: &RunConfig,
    args: &AnalyzeArgs,
    by_repo: &BTreeMap<String, Vec<CommitRecord>>,
) -> CliResult<Selection> {
    let metadata: BTreeMap<String, ProjectMetadata> = match &args.metadata {
        Some(p) => parse_project_metadata(&read_input(p)?)
            .map_err(|e| Failure::from(e).context(p.display()))?
            .into_iter()
            .map(|m| (m.repo_id.clone(), m))
            .collect(),
        None => BTreeMap::new(),
    };
    let descriptors: Vec<ProjectDescriptor> = by_repo
        .iter()
        .map(|(id, commits)| {
            let d = match metadata.get(id) {
                Some(m) => ProjectDescriptor::new(m.clone()),
                None => ProjectDescriptor::from_repo_id(id),
            };
            d.with_commits(commits)
        })
        .collect();
    let latest = descriptors
        .iter()
        .filter_map(|d| d.commit_count_by_year().keys().next_back().copied())
        .max()
        .expect("non-empty input");
    let year = cfg.settings.year.unwrap_or(latest);
    let min_commits = cfg.settings.thresholds.min_commits;
    let outcome = select_projects(&descriptors, year, min_commits);
    Ok(Selection {
        year,
        min_commits,
        accepted: outcome.accepted.into_iter().map(|d| d.repo_id).collect(),
        excluded: outcome.excluded,
    })
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// CCP values to place on the scale.
    #[arg(required = true, allow_negative_numbers = true)]
    pub values: Vec<f64>,
    /// Treat the values as hit rates and correct them first.
    #[arg(long)]
    pub hit_rate: bool,
}

#[derive(Debug, Serialize)]
struct RankRow {
    input: f64,
    ccp: f64,
    status: Validity,
    band: Option<String>,
    median: bool,
}

pub fn rank<W: Write>(cfg: &RunConfig, args: &RankArgs, out: &mut W) -> CliResult<()> {
    let rows: Vec<RankRow> = args
        .values
        .iter()
        .map(|&v| {
            let (ccp, status) = if args.hit_rate {
                ccp_from_hit_rate(v, &cfg.perf.performance)
            } else if (0.0..=1.0).contains(&v) {
                (v, Validity::Valid)
            } else if v < 0.0 {
                (v, Validity::BelowZero)
            } else {
                (v, Validity::AboveOne)
            };
            let band = (status == Validity::Valid).then(|| rank_on_scale(ccp, &cfg.table));
            RankRow {
                input: v,
                ccp,
                status,
                band: band.map(|b| b.label()),
                median: band.is_some_and(|b| b.is_median()),
            }
        })
        .collect();
    match cfg.settings.format {
        Format::Json => write_json(out, &envelope(cfg, "rank", rows)),
        Format::Csv => write_csv(out, cfg, "rank", &rows),
    }
}
