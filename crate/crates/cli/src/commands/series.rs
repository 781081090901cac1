use std::io::Write;
use std::path::PathBuf;

use ccp_core::stats::{
    co_change, parse_dev_series, parse_series, twin_analysis, CoChangeParams, CoChangeReport,
    Comparator, Direction, TwinReport, LOOKBACK_YEARS,
};
use clap::{Args, ValueEnum};
use serde::Serialize;

use super::{parse_pair, read_input};
use crate::config::{Format, RunConfig};
use crate::failure::{CliResult, Failure};
use crate::report::{envelope, write_csv, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Better {
    Higher,
    Lower,
}

impl From<Better> for Direction {
    fn from(b: Better) -> Self {
        match b {
            Better::Higher => Direction::HigherIsBetter,
            Better::Lower => Direction::LowerIsBetter,
        }
    }
}

#[derive(Debug, Args)]
pub struct CoChangeArgs {
    /// CSV `entity,year,value` for metric i.
    pub series_i: PathBuf,
    /// CSV `entity,year,value` for metric j.
    pub series_j: PathBuf,
    #[arg(long, value_enum)]
    pub better_i: Better,
    #[arg(long, value_enum)]
    pub better_j: Better,
    /// Minimal improvement of metric i; overrides the config value.
    #[arg(long)]
    pub delta_i: Option<f64>,
    #[arg(long)]
    pub delta_j: Option<f64>,
    /// Use every year instead of the five-year window ending at --year
    /// (or at the latest year in the data).
    #[arg(long)]
    pub all_years: bool,
}

#[derive(Debug, Serialize)]
struct CoChangeResult {
    window: Option<(i32, i32)>,
    comparator: Comparator,
    report: CoChangeReport,
}

#[derive(Serialize)]
struct CoChangeRow {
    window_start: Option<i32>,
    window_end: Option<i32>,
    delta_i: f64,
    delta_j: f64,
    n_pairs: usize,
    n_improved_i: usize,
    n_improved_j: usize,
    n_improved_both: usize,
    match_rate: f64,
    precision: Option<f64>,
    base_rate: f64,
    lift: Option<f64>,
}

fn non_negative(name: &str, v: f64) -> CliResult<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::config(format!(
            "{name} must be a non-negative number, got {v}"
        )))
    }
}

pub fn cochange<W: Write>(cfg: &RunConfig, args: &CoChangeArgs, out: &mut W) -> CliResult<()> {
    let load = |p: &PathBuf| {
        parse_series(&read_input(p)?).map_err(|e| Failure::from(e).context(p.display()))
    };
    let si = load(&args.series_i)?;
    let sj = load(&args.series_j)?;
    let t = &cfg.settings.thresholds;
    let delta_i = non_negative("delta-i", args.delta_i.unwrap_or(t.delta_i))?;
    let delta_j = non_negative("delta-j", args.delta_j.unwrap_or(t.delta_j))?;

    let mut params =
        CoChangeParams::new(delta_i, delta_j, args.better_i.into(), args.better_j.into());
    params.comparator = cfg.settings.comparator.resolve(delta_i.max(delta_j));
    let window = if args.all_years {
        None
    } else {
        let end = cfg
            .settings
            .year
            .or_else(|| {
                si.iter()
                    .filter_map(|s| s.points.keys().next_back().copied())
                    .max()
            })
            .ok_or_else(|| Failure::input("series i has no points"))?;
        params = params.ending_at(end);
        Some((end - LOOKBACK_YEARS + 1, end))
    };
    let report = co_change(&si, &sj, &params)?;

    match cfg.settings.format {
        Format::Json => write_json(
            out,
            &envelope(
                cfg,
                "cochange",
                CoChangeResult {
                    window,
                    comparator: params.comparator,
                    report,
                },
            ),
        ),
        Format::Csv => {
            let row = CoChangeRow {
                window_start: window.map(|w| w.0),
                window_end: window.map(|w| w.1),
                delta_i: report.thresholds.0,
                delta_j: report.thresholds.1,
                n_pairs: report.n_pairs,
                n_improved_i: report.n_improved_i,
                n_improved_j: report.n_improved_j,
                n_improved_both: report.n_improved_both,
                match_rate: report.match_rate,
                precision: report.precision,
                base_rate: report.base_rate,
                lift: report.lift,
            };
            write_csv(out, cfg, "cochange", &[row])
        }
    }
}

#[derive(Debug, Args)]
pub struct TwinArgs {
    /// CSV `developer,project,year,value` of involved developers.
    pub developer_series: PathBuf,
    /// CSV `entity,year,value` of project-level values.
    pub project_series: PathBuf,
    #[arg(long, value_enum)]
    pub better: Better,
    /// Threshold variant `DELTA_PROJECT:DELTA_DEV`; repeatable. Defaults to
    /// the configured deltas.
    #[arg(long = "thresholds", value_parser = parse_pair)]
    pub thresholds: Vec<(f64, f64)>,
}

#[derive(Debug, Serialize)]
struct TwinVariant {
    comparator: Comparator,
    #[serde(flatten)]
    report: TwinReport,
}

#[derive(Serialize)]
struct TwinRow {
    delta_project: f64,
    delta_dev: f64,
    comparator: Comparator,
    n_developer_pairs: usize,
    n_project_better: usize,
    n_developer_better: usize,
    precision: f64,
    base_rate: f64,
    lift: Option<f64>,
}

pub fn twin<W: Write>(cfg: &RunConfig, args: &TwinArgs, out: &mut W) -> CliResult<()> {
    let mut devs = parse_dev_series(&read_input(&args.developer_series)?)
        .map_err(|e| Failure::from(e).context(args.developer_series.display()))?;
    let mut projects = parse_series(&read_input(&args.project_series)?)
        .map_err(|e| Failure::from(e).context(args.project_series.display()))?;
    if let Some(y) = cfg.settings.year {
        devs.iter_mut()
            .for_each(|d| d.points.retain(|&k, _| k == y));
        projects
            .iter_mut()
            .for_each(|p| p.points.retain(|&k, _| k == y));
    }
    let t = &cfg.settings.thresholds;
    let variants = if args.thresholds.is_empty() {
        vec![(t.delta_project, t.delta_dev)]
    } else {
        args.thresholds.clone()
    };
    let mut results = Vec::with_capacity(variants.len());
    for (dp, dd) in variants {
        let dp = non_negative("delta_project", dp)?;
        let dd = non_negative("delta_dev", dd)?;
        let comparator = cfg.settings.comparator.resolve(dp.max(dd));
        let report = twin_analysis(&devs, &projects, dp, dd, args.better.into(), comparator)?;
        results.push(TwinVariant { comparator, report });
    }
    match cfg.settings.format {
        Format::Json => write_json(out, &envelope(cfg, "twin", results)),
        Format::Csv => {
            let rows: Vec<TwinRow> = results
                .iter()
                .map(|v| TwinRow {
                    delta_project: v.report.thresholds.0,
                    delta_dev: v.report.thresholds.1,
                    comparator: v.comparator,
                    n_developer_pairs: v.report.n_developer_pairs,
                    n_project_better: v.report.n_project_better,
                    n_developer_better: v.report.n_developer_better,
                    precision: v.report.precision,
                    base_rate: v.report.base_rate,
                    lift: v.report.lift,
                })
                .collect();
            write_csv(out, cfg, "twin", &rows)
        }
    }
}
