//! Corrective commit probability (CCP) estimation.
//!
//! Commit messages go through a pattern-based classifier. The resulting hit
//! rate is turned into a maximum-likelihood estimate of the true share of
//! corrective commits. Per-project process metrics and cross-project
//! statistics build on that estimate.
//!
//! Numeric code is generic over the scalar type. The aliases below fix the
//! usual instantiations; `Exact` is there for boundary checks that floats
//! cannot make exactly.

pub mod analytics;
pub mod classifier;
pub mod error;
pub mod estimator;
pub mod ingestion;
pub mod quantile;
pub mod scalar;
pub mod stats;

pub use error::{Error, ErrorKind, Result};
pub use scalar::{Real, Scalar};

/// Exact rational scalar.
pub type Exact = num_rational::Ratio<i64>;

pub type Performance = estimator::ModelPerformance<f64>;
pub type Performance32 = estimator::ModelPerformance<f32>;
pub type ExactPerformance = estimator::ModelPerformance<Exact>;

pub type Estimate = estimator::CcpEstimate<f64>;
pub type Estimate32 = estimator::CcpEstimate<f32>;
pub type ExactEstimate = estimator::CcpEstimate<Exact>;

pub type Series = stats::MetricSeries<f64>;
pub type Table = estimator::DistributionTable<f64>;
