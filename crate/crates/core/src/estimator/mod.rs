//! Maximum-likelihood correction of classifier hit rates.
//!
//! With recall `r` and false positive rate `f`, a project whose true
//! corrective rate is `p` shows an expected hit rate `(r - f) p + f`. The
//! binomial likelihood of `k` hits in `n` commits peaks at `k / n`, and the
//! map from `p` to hit rate is linear, so the most likely `p` is
//! `(k / n - f) / (r - f)`.
//!
//! Estimates outside `[0, 1]` are kept as they are and flagged. They mean the
//! classifier does not behave on this history as it did on the labeled data.

mod bootstrap;
mod ranking;

pub use bootstrap::{
    bootstrap_difference_distribution, bootstrap_differences, estimator_sensitivity,
    estimator_sensitivity_pairs, BootstrapReport, SegmentSensitivity, SensitivityReport,
};
pub use ranking::{rank_on_scale, Band, DistributionTable};

use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::classifier::ConfusionMatrix;
use crate::{Error, Result, Scalar};

const DEFAULT_PERF: &str = include_str!("../../data/default_perf.txt");

/// Recall and false positive rate of a classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelPerformance<T> {
    recall: T,
    fpr: T,
}

impl<T: Scalar> ModelPerformance<T> {
    /// Requires `0 <= fpr < recall <= 1`.
    pub fn new(recall: T, fpr: T) -> Result<Self> {
        if !(T::zero() <= fpr && fpr < recall && recall <= T::one()) {
            return Err(Error::Performance(format!(
                "need 0 <= fpr < recall <= 1, got recall={recall:?} fpr={fpr:?}"
            )));
        }
        Ok(Self { recall, fpr })
    }

    /// recall = 0.84, fpr = 0.042
    pub fn baseline() -> Self {
        Self::new(T::lit(0.84), T::lit(0.042)).expect("default performance is valid")
    }

    /// Measures recall and fpr on a labeled evaluation.
    pub fn from_confusion(cm: &ConfusionMatrix) -> Result<Self> {
        let recall = cm
            .recall()
            .ok_or(Error::Undefined("recall of a corpus without positives"))?;
        let fpr = cm
            .fpr()
            .ok_or(Error::Undefined("fpr of a corpus without negatives"))?;
        Self::new(recall, fpr)
    }

    pub fn recall(&self) -> T {
        self.recall
    }

    pub fn fpr(&self) -> T {
        self.fpr
    }

    /// Hit-rate interval on which estimates are probabilities.
    pub fn valid_domain(&self) -> HitRateDomain<T> {
        HitRateDomain {
            lower: self.fpr,
            upper: self.recall,
        }
    }

    pub fn cast<U: Scalar>(&self) -> Result<ModelPerformance<U>> {
        let conv = |x: T| {
            x.to_f64()
                .and_then(U::from_f64)
                .ok_or_else(|| Error::Performance(format!("{x:?} not representable")))
        };
        ModelPerformance::new(conv(self.recall)?, conv(self.fpr)?)
    }
}

impl<T: Scalar> Default for ModelPerformance<T> {
    fn default() -> Self {
        Self::baseline()
    }
}

/// Performance together with the id of the model it was measured for.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerformanceConfig {
    pub model_id: Option<String>,
    pub performance: ModelPerformance<f64>,
}

impl PerformanceConfig {
    /// Parses `key=value` lines with keys `recall`, `fpr`, `model_id`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut recall = None;
        let mut fpr = None;
        let mut model_id = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Performance(format!("line {}: expected key=value", idx + 1))
            })?;
            let value = value.trim();
            let number = || {
                value
                    .parse::<f64>()
                    .map_err(|e| Error::Performance(format!("line {}: {value:?}: {e}", idx + 1)))
            };
            match key.trim() {
                "recall" => recall = Some(number()?),
                "fpr" => fpr = Some(number()?),
                "model_id" => model_id = Some(value.to_string()),
                other => {
                    return Err(Error::Performance(format!(
                        "line {}: unknown key {other:?}",
                        idx + 1
                    )))
                }
            }
        }
        let recall = recall.ok_or_else(|| Error::Performance("missing recall".into()))?;
        let fpr = fpr.ok_or_else(|| Error::Performance("missing fpr".into()))?;
        Ok(Self {
            model_id,
            performance: ModelPerformance::new(recall, fpr)?,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn bundled() -> Self {
        Self::parse(DEFAULT_PERF).expect("bundled performance config is valid")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(id) = &self.model_id {
            s.push_str(&format!("model_id={id}\n"));
        }
        s.push_str(&format!(
            "recall={}\nfpr={}\n",
            self.performance.recall(),
            self.performance.fpr()
        ));
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HitRateDomain<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> HitRateDomain<T> {
    pub fn contains(&self, hr: T) -> bool {
        self.lower <= hr && hr <= self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Validity {
    Valid,
    BelowZero,
    AboveOne,
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Validity::Valid => "Valid",
            Validity::BelowZero => "BelowZero",
            Validity::AboveOne => "AboveOne",
        })
    }
}

/// Estimated corrective commit probability for `k` hits among `n` commits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CcpEstimate<T> {
    pub n: usize,
    pub k: usize,
    pub hit_rate: T,
    pub ccp_raw: T,
    pub status: Validity,
}

impl<T: Scalar> CcpEstimate<T> {
    pub fn is_valid(&self) -> bool {
        self.status == Validity::Valid
    }

    /// The estimate when it is a probability.
    pub fn ccp(&self) -> Option<T> {
        self.is_valid().then_some(self.ccp_raw)
    }
}

/// Expected hit rate of a project whose true corrective rate is `pr`.
pub fn expected_hit_rate<T: Scalar>(pr: T, perf: &ModelPerformance<T>) -> Result<T> {
    if !(T::zero() <= pr && pr <= T::one()) {
        return Err(Error::InvalidArgument(format!(
            "positive rate {pr:?} outside [0, 1]"
        )));
    }
    Ok((perf.recall - perf.fpr) * pr + perf.fpr)
}

/// Most likely positive rate for an observed hit rate, with its validity.
pub fn ccp_from_hit_rate<T: Scalar>(hr: T, perf: &ModelPerformance<T>) -> (T, Validity) {
    let raw = (hr - perf.fpr) / (perf.recall - perf.fpr);
    let status = if hr < perf.fpr {
        Validity::BelowZero
    } else if hr > perf.recall {
        Validity::AboveOne
    } else {
        Validity::Valid
    };
    (raw, status)
}

pub fn estimate_ccp<T: Scalar>(
    k: usize,
    n: usize,
    perf: &ModelPerformance<T>,
) -> Result<CcpEstimate<T>> {
    if n == 0 {
        return Err(Error::EmptyInput("cannot estimate CCP from zero commits"));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "{k} hits out of {n} commits"
        )));
    }
    let hit_rate = T::from_count(k) / T::from_count(n);
    let (ccp_raw, status) = ccp_from_hit_rate(hit_rate, perf);
    Ok(CcpEstimate {
        n,
        k,
        hit_rate,
        ccp_raw,
        status,
    })
}

pub fn valid_hit_rate_domain<T: Scalar>(perf: &ModelPerformance<T>) -> HitRateDomain<T> {
    perf.valid_domain()
}
