use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use super::load_commits;
use crate::config::{Format, RunConfig};
use crate::failure::CliResult;
use crate::report::{io_failure, write_csv};

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Commit log (NDJSON export or raw recipe output; `-` for stdin).
    pub log: PathBuf,
    /// Repository id for raw git logs.
    #[arg(long)]
    pub repo: Option<String>,
}

#[derive(Serialize)]
struct VerdictLine<'a> {
    repo: &'a str,
    hash: &'a str,
    corrective: bool,
    score: i64,
    fix: Vec<&'a str>,
    other_fix: Vec<&'a str>,
    negation: Vec<&'a str>,
}

#[derive(Serialize)]
struct VerdictRow<'a> {
    repo: &'a str,
    hash: &'a str,
    corrective: bool,
    score: i64,
    fix_hits: usize,
    other_fix_hits: usize,
    negation_hits: usize,
    matched: String,
}

/// One verdict per commit, in input order.
pub fn classify<W: Write>(cfg: &RunConfig, args: &ClassifyArgs, out: &mut W) -> CliResult<()> {
    let commits = load_commits(&[&args.log], args.repo.as_deref())?;
    match cfg.settings.format {
        Format::Json => {
            for c in &commits {
                let v = cfg.model.classify(&c.message);
                let m = cfg.model.matched_patterns(&c.message);
                let line = VerdictLine {
                    repo: &c.repo_id,
                    hash: &c.hash,
                    corrective: v.corrective,
                    score: v.score,
                    fix: m.fix,
                    other_fix: m.other_fix,
                    negation: m.negation,
                };
                let json = serde_json::to_string(&line).expect("verdict serializes");
                writeln!(out, "{json}").map_err(io_failure)?;
            }
            Ok(())
        }
        Format::Csv => {
            let rows: Vec<VerdictRow> = commits
                .iter()
                .map(|c| {
                    let v = cfg.model.classify(&c.message);
                    let m = cfg.model.matched_patterns(&c.message);
                    let matched = m
                        .fix
                        .iter()
                        .chain(&m.other_fix)
                        .chain(&m.negation)
                        .copied()
                        .collect::<Vec<_>>();
                    VerdictRow {
                        repo: &c.repo_id,
                        hash: &c.hash,
                        corrective: v.corrective,
                        score: v.score,
                        fix_hits: v.fix_hits,
                        other_fix_hits: v.other_fix_hits,
                        negation_hits: v.negation_hits,
                        matched: matched.join(";"),
                    }
                })
                .collect();
            write_csv(out, cfg, "classify", &rows)
        }
    }
}
