//! Effective run configuration: config file, then command-line flags.

use std::path::{Path, PathBuf};

use ccp_core::analytics::{Cap, StatsOptions};
use ccp_core::classifier::{EnglishModel, TermModel};
use ccp_core::estimator::{DistributionTable, PerformanceConfig};
use ccp_core::stats::Comparator;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::failure::{as_config, CliResult, Failure};

pub const DEFAULT_SEED: u64 = 2020;
pub const DEFAULT_MIN_COMMITS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// How change thresholds are compared. `auto` is strict for zero
/// thresholds and inclusive for positive ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ComparatorPolicy {
    #[default]
    Auto,
    Strict,
    Inclusive,
}

impl ComparatorPolicy {
    pub fn resolve(self, threshold: f64) -> Comparator {
        match self {
            ComparatorPolicy::Auto => Comparator::for_threshold(threshold),
            ComparatorPolicy::Strict => Comparator::Strict,
            ComparatorPolicy::Inclusive => Comparator::Inclusive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub min_commits: usize,
    pub involvement: usize,
    pub coupling_cap: f64,
    pub speed_cap: usize,
    pub file_cap: f64,
    pub onboarding_min_new: usize,
    pub delta_i: f64,
    pub delta_j: f64,
    pub delta_project: f64,
    pub delta_dev: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        let stats = StatsOptions::default();
        Self {
            min_commits: DEFAULT_MIN_COMMITS,
            involvement: stats.involvement_threshold,
            coupling_cap: 0.99,
            speed_cap: stats.speed_cap,
            file_cap: 0.99,
            onboarding_min_new: stats.onboarding_min_new,
            delta_i: 0.0,
            delta_j: 0.0,
            delta_project: 0.0,
            delta_dev: 0.0,
        }
    }
}

impl Thresholds {
    pub fn stats_options(&self) -> StatsOptions {
        StatsOptions {
            involvement_threshold: self.involvement,
            coupling_cap: Cap::Quantile(self.coupling_cap),
            speed_cap: self.speed_cap,
            onboarding_min_new: self.onboarding_min_new,
            file_cap: Cap::Quantile(self.file_cap),
        }
    }

    fn validate(&self) -> CliResult<()> {
        for (name, q) in [
            ("coupling_cap", self.coupling_cap),
            ("file_cap", self.file_cap),
        ] {
            if !(q > 0.0 && q < 1.0) {
                return Err(Failure::config(format!(
                    "{name} must be in (0, 1), got {q}"
                )));
            }
        }
        for (name, d) in [
            ("delta_i", self.delta_i),
            ("delta_j", self.delta_j),
            ("delta_project", self.delta_project),
            ("delta_dev", self.delta_dev),
        ] {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Failure::config(format!(
                    "{name} must be a non-negative number, got {d}"
                )));
            }
        }
        Ok(())
    }
}

/// Contents of the TOML file named by `--config` / `CCP_MINER_CONFIG`.
/// Relative paths are resolved against the file's directory.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<PathBuf>,
    pub english_model: Option<PathBuf>,
    pub perf: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub year: Option<i32>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub enforce_selection: Option<bool>,
    pub comparator: Option<ComparatorPolicy>,
    pub thresholds: Thresholds,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: FileConfig = toml::from_str(&text)
            .map_err(|e| Failure::config(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut cfg.model,
            &mut cfg.english_model,
            &mut cfg.perf,
            &mut cfg.table,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Flag values; `None` leaves the file value (or the default) in place.
#[derive(Debug, Default)]
pub struct Overrides {
    pub model: Option<PathBuf>,
    pub english_model: Option<PathBuf>,
    pub perf: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub year: Option<i32>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub enforce_selection: bool,
    pub comparator: Option<ComparatorPolicy>,
}

/// Where a resource came from, as recorded in the config hash.
#[derive(Debug, Clone, Serialize)]
pub struct Sources {
    pub model: String,
    pub english_model: String,
    pub perf: String,
    pub table: String,
}

/// Settings that shape results; hashed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub year: Option<i32>,
    pub seed: u64,
    pub format: Format,
    pub enforce_selection: bool,
    pub comparator: ComparatorPolicy,
    pub thresholds: Thresholds,
    pub sources: Sources,
}

pub struct RunConfig {
    pub settings: Settings,
    pub model: TermModel,
    pub english: EnglishModel,
    pub perf: PerformanceConfig,
    pub table: DistributionTable<f64>,
    pub config_hash: String,
}

impl RunConfig {
    pub fn resolve(file: FileConfig, flags: Overrides) -> CliResult<Self> {
        let pick = |flag: Option<PathBuf>, file: Option<PathBuf>| flag.or(file);

        let (model, model_src) = match pick(flags.model, file.model) {
            Some(p) => {
                let text = read_resource("model", &p)?;
                (
                    as_config(format!("model {}", p.display()), TermModel::parse(&text))?,
                    digest(&text),
                )
            }
            None => (TermModel::default_model(), "bundled".to_string()),
        };
        let (english, english_src) = match pick(flags.english_model, file.english_model) {
            Some(p) => {
                let text = read_resource("english model", &p)?;
                (
                    as_config(
                        format!("english model {}", p.display()),
                        EnglishModel::parse(&text),
                    )?,
                    digest(&text),
                )
            }
            None => (EnglishModel::default_model(), "bundled".to_string()),
        };
        let (perf, perf_src) = match pick(flags.perf, file.perf) {
            Some(p) => {
                let text = read_resource("performance config", &p)?;
                (
                    as_config(
                        format!("performance config {}", p.display()),
                        PerformanceConfig::parse(&text),
                    )?,
                    digest(&text),
                )
            }
            None => (PerformanceConfig::bundled(), "bundled".to_string()),
        };
        let (table, table_src) = match pick(flags.table, file.table) {
            Some(p) => {
                let text = read_resource("distribution table", &p)?;
                (
                    as_config(
                        format!("distribution table {}", p.display()),
                        DistributionTable::parse(&text),
                    )?,
                    digest(&text),
                )
            }
            None => (DistributionTable::bundled(), "bundled".to_string()),
        };

        if let Some(id) = &perf.model_id {
            if id != model.model_id() {
                return Err(Failure::config(format!(
                    "performance constants were measured for model {id:?}, not {:?}",
                    model.model_id()
                )));
            }
        }
        file.thresholds.validate()?;

        let settings = Settings {
            year: flags.year.or(file.year),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            format: flags.format.or(file.format).unwrap_or_default(),
            enforce_selection: flags.enforce_selection || file.enforce_selection.unwrap_or(false),
            comparator: flags.comparator.or(file.comparator).unwrap_or_default(),
            thresholds: file.thresholds,
            sources: Sources {
                model: model_src,
                english_model: english_src,
                perf: perf_src,
                table: table_src,
            },
        };
        let canonical = serde_json::to_vec(&settings).expect("settings serialize");
        Ok(Self {
            config_hash: hex::encode(Sha256::digest(&canonical)),
            settings,
            model,
            english,
            perf,
            table,
        })
    }
}

fn read_resource(what: &str, path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read {what} {}: {e}", path.display())))
}

fn digest(text: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}
