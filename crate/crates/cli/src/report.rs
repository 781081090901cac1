use std::io::Write;

use serde::Serialize;

use crate::config::RunConfig;
use crate::failure::{CliResult, Failure};

#[derive(Debug, Serialize)]
pub struct PerformanceEmbed<'a> {
    pub model_id: Option<&'a str>,
    pub recall: f64,
    pub fpr: f64,
}

/// Provenance block shared by every report.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, T> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub model_id: &'a str,
    pub performance: PerformanceEmbed<'a>,
    pub seed: u64,
    pub config_hash: &'a str,
    pub result: T,
}

pub fn envelope<'a, T>(cfg: &'a RunConfig, command: &'a str, result: T) -> Envelope<'a, T> {
    Envelope {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        model_id: cfg.model.model_id(),
        performance: PerformanceEmbed {
            model_id: cfg.perf.model_id.as_deref(),
            recall: cfg.perf.performance.recall(),
            fpr: cfg.perf.performance.fpr(),
        },
        seed: cfg.settings.seed,
        config_hash: &cfg.config_hash,
        result,
    }
}

pub fn write_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Failure::input(e.to_string()))?;
    writeln!(out).map_err(io_failure)
}

/// Writes the provenance block as `#` comment lines, then the rows.
pub fn write_csv<W: Write, R: Serialize>(
    out: &mut W,
    cfg: &RunConfig,
    command: &str,
    rows: &[R],
) -> CliResult<()> {
    let env = envelope(cfg, command, ());
    writeln!(
        out,
        "# tool={} version={} command={} model_id={} recall={} fpr={} seed={} config_hash={}",
        env.tool,
        env.version,
        env.command,
        env.model_id,
        env.performance.recall,
        env.performance.fpr,
        env.seed,
        env.config_hash
    )
    .map_err(io_failure)?;
    let mut w = csv::Writer::from_writer(&mut *out);
    for row in rows {
        w.serialize(row)
            .map_err(|e| Failure::input(e.to_string()))?;
    }
    w.flush().map_err(io_failure)
}

pub fn io_failure(e: std::io::Error) -> Failure {
    Failure::input(format!("write failed: {e}"))
}
