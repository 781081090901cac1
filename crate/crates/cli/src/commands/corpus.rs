use std::io::Write;
use std::path::PathBuf;

use ccp_core::classifier::{
    evaluate_model, gold_corpus, parse_corpus, ConfusionMatrix, LabeledCommit, Rates,
};
use ccp_core::estimator::{
    bootstrap_differences, estimator_sensitivity_pairs, BootstrapReport, ModelPerformance,
    SensitivityReport,
};
use clap::{Args, ValueEnum};
use serde::Serialize;

use super::{parse_pair, read_input};
use crate::config::{Format, RunConfig};
use crate::failure::{CliResult, Failure};
use crate::report::{envelope, write_csv, write_json};

/// Which recall and fpr drive the bootstrap estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PerfSource {
    /// Measured on the corpus being resampled.
    Measured,
    /// The configured performance constants.
    Configured,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Labeled corpus (`label<TAB>message` lines); the bundled gold corpus when omitted.
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0.95)]
    pub coverage: f64,
    #[arg(long, value_enum, default_value_t = PerfSource::Measured)]
    pub perf_source: PerfSource,
}

#[derive(Debug, Serialize)]
struct PerfValues {
    recall: f64,
    fpr: f64,
}

impl From<&ModelPerformance<f64>> for PerfValues {
    fn from(p: &ModelPerformance<f64>) -> Self {
        Self {
            recall: p.recall(),
            fpr: p.fpr(),
        }
    }
}

#[derive(Debug, Serialize)]
struct ValidateResult {
    corpus_size: usize,
    matrix: ConfusionMatrix,
    rates: Rates,
    measured_performance: Option<PerfValues>,
    perf_source: PerfSource,
    bootstrap: BootstrapReport,
}

fn load_corpus(path: Option<&PathBuf>) -> CliResult<Vec<LabeledCommit>> {
    match path {
        Some(p) => parse_corpus(&read_input(p)?).map_err(|e| Failure::from(e).context(p.display())),
        None => Ok(gold_corpus()),
    }
}

fn pick_perf(
    cfg: &RunConfig,
    matrix: &ConfusionMatrix,
    source: PerfSource,
) -> CliResult<ModelPerformance<f64>> {
    match source {
        PerfSource::Configured => Ok(cfg.perf.performance),
        PerfSource::Measured => ModelPerformance::from_confusion(matrix).map_err(|e| {
            Failure::input(format!(
                "cannot measure recall and fpr on this corpus ({e}); use --perf-source configured"
            ))
        }),
    }
}

pub fn validate_model<W: Write>(
    cfg: &RunConfig,
    args: &ValidateArgs,
    out: &mut W,
) -> CliResult<()> {
    if cfg.settings.format == Format::Csv {
        return Err(Failure::config(
            "validate-model reports are nested; use --format json",
        ));
    }
    let corpus = load_corpus(args.corpus.as_ref())?;
    let matrix = evaluate_model(&corpus, &cfg.model)?;
    let measured = ModelPerformance::from_confusion(&matrix).ok();
    let perf = pick_perf(cfg, &matrix, args.perf_source)?;
    let pairs: Vec<(bool, bool)> = corpus
        .iter()
        .map(|c| (c.label, cfg.model.classify(&c.message).corrective))
        .collect();
    let bootstrap = bootstrap_differences(
        &pairs,
        &perf,
        args.iterations,
        args.coverage,
        cfg.settings.seed,
    )?;
    let result = ValidateResult {
        corpus_size: corpus.len(),
        rates: matrix.rates(),
        matrix,
        measured_performance: measured.as_ref().map(PerfValues::from),
        perf_source: args.perf_source,
        bootstrap,
    };
    write_json(out, &envelope(cfg, "validate-model", result))
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    /// Labeled corpus (`label<TAB>message` lines).
    #[arg(required_unless_present = "counts", conflicts_with = "counts")]
    pub corpus: Option<PathBuf>,
    /// Confusion counts `tp,fn,fp,tn` to resample instead of a corpus.
    #[arg(long, value_parser = parse_counts)]
    pub counts: Option<[usize; 4]>,
    #[arg(long, default_value_t = 10_000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0.95)]
    pub coverage: f64,
    #[arg(long, value_enum, default_value_t = PerfSource::Measured)]
    pub perf_source: PerfSource,
    /// Resamples for the estimator sensitivity analysis (0 skips it).
    #[arg(long, default_value_t = 0)]
    pub sensitivity_iterations: usize,
    /// Hit-rate segment `LOW:HIGH` for the sensitivity analysis; repeatable.
    #[arg(long = "segment", value_parser = parse_pair, default_value = "0.06:0.39")]
    pub segments: Vec<(f64, f64)>,
}

fn parse_counts(s: &str) -> Result<[usize; 4], String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| "expected four counts tp,fn,fp,tn".to_string())
}

#[derive(Debug, Serialize)]
struct BootstrapResult {
    matrix: ConfusionMatrix,
    perf_source: PerfSource,
    bootstrap: BootstrapReport,
    sensitivity: Option<SensitivityReport>,
}

pub fn bootstrap<W: Write>(cfg: &RunConfig, args: &BootstrapArgs, out: &mut W) -> CliResult<()> {
    let pairs: Vec<(bool, bool)> = match &args.counts {
        Some([tp, fn_, fp, tn]) => {
            let mut v = Vec::with_capacity(tp + fn_ + fp + tn);
            for (n, pair) in [
                (tp, (true, true)),
                (fn_, (true, false)),
                (fp, (false, true)),
                (tn, (false, false)),
            ] {
                v.extend(std::iter::repeat_n(pair, *n));
            }
            v
        }
        None => load_corpus(args.corpus.as_ref())?
            .iter()
            .map(|c| (c.label, cfg.model.classify(&c.message).corrective))
            .collect(),
    };
    let matrix = ConfusionMatrix::from_pairs(pairs.iter().copied());
    let perf = pick_perf(cfg, &matrix, args.perf_source)?;
    let seed = cfg.settings.seed;
    let report = bootstrap_differences(&pairs, &perf, args.iterations, args.coverage, seed)?;
    let sensitivity = if args.sensitivity_iterations > 0 {
        Some(estimator_sensitivity_pairs(
            &pairs,
            args.sensitivity_iterations,
            &args.segments,
            seed,
        )?)
    } else {
        None
    };
    match cfg.settings.format {
        Format::Json => write_json(
            out,
            &envelope(
                cfg,
                "bootstrap",
                BootstrapResult {
                    matrix,
                    perf_source: args.perf_source,
                    bootstrap: report,
                    sensitivity,
                },
            ),
        ),
        Format::Csv => write_csv(out, cfg, "bootstrap", &[report]),
    }
}
