//! `ccp-miner`: corrective commit probability reports from commit histories.

mod commands;
mod config;
mod failure;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use ccp_core::ingestion::GIT_LOG_RECIPE;
use clap::{Args, Parser, Subcommand};

use crate::commands::{
    AnalyzeArgs, BootstrapArgs, ClassifyArgs, CoChangeArgs, RankArgs, TwinArgs, ValidateArgs,
};
use crate::config::{ComparatorPolicy, FileConfig, Format, Overrides, RunConfig};
use crate::failure::{CliResult, Failure, EXIT_CONFIG, EXIT_INVARIANT};
use crate::report::io_failure;

#[derive(Debug, Parser)]
#[command(
    name = "ccp-miner",
    version,
    about = "Estimate corrective commit probability from commit histories"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML config file; command-line flags take precedence over it.
    #[arg(long, global = true, env = "CCP_MINER_CONFIG")]
    config: Option<PathBuf>,
    /// Term model file (the bundled model when omitted).
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// English word list used by the out-of-domain diagnostics.
    #[arg(long, global = true)]
    english_model: Option<PathBuf>,
    /// Performance constants (`recall=`, `fpr=`, `model_id=` lines).
    #[arg(long, global = true)]
    perf: Option<PathBuf>,
    /// Distribution table CSV `percentile,ccp`.
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    /// Analysis year.
    #[arg(long, global = true)]
    year: Option<i32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Drop projects failing the selection rules before analysis.
    #[arg(long, global = true)]
    enforce_selection: bool,
    /// Threshold comparison for co-change and twin analyses.
    #[arg(long, global = true, value_enum)]
    comparator: Option<ComparatorPolicy>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify every commit of a log.
    Classify(ClassifyArgs),
    /// Per-project yearly metrics, CCP estimate and band.
    Analyze(AnalyzeArgs),
    /// Place CCP values on the distribution table.
    Rank(RankArgs),
    /// Score the model against a labeled corpus.
    ValidateModel(ValidateArgs),
    /// Bootstrap and estimator sensitivity on a labeled corpus.
    Bootstrap(BootstrapArgs),
    /// Precision and lift of co-occurring yearly improvements.
    Cochange(CoChangeArgs),
    /// Same developer across projects.
    Twin(TwinArgs),
    /// Print the git command producing the raw log format.
    ExportLogRecipe,
}

fn run(cli: Cli, out: &mut impl Write) -> CliResult<()> {
    if let Command::ExportLogRecipe = cli.command {
        return writeln!(out, "{GIT_LOG_RECIPE}").map_err(io_failure);
    }
    let g = cli.global;
    let file = match &g.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(
        file,
        Overrides {
            model: g.model,
            english_model: g.english_model,
            perf: g.perf,
            table: g.table,
            year: g.year,
            seed: g.seed,
            format: g.format,
            enforce_selection: g.enforce_selection,
            comparator: g.comparator,
        },
    )?;
    match &cli.command {
        Command::Classify(a) => commands::classify(&cfg, a, out),
        Command::Analyze(a) => commands::analyze(&cfg, a, out),
        Command::Rank(a) => commands::rank(&cfg, a, out),
        Command::ValidateModel(a) => commands::validate_model(&cfg, a, out),
        Command::Bootstrap(a) => commands::bootstrap(&cfg, a, out),
        Command::Cochange(a) => commands::cochange(&cfg, a, out),
        Command::Twin(a) => commands::twin(&cfg, a, out),
        Command::ExportLogRecipe => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli, &mut out)));
    let result = match outcome {
        Ok(r) => r.and_then(|()| out.flush().map_err(io_failure)),
        Err(_) => Err(Failure {
            code: EXIT_INVARIANT,
            message: "internal error".into(),
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
