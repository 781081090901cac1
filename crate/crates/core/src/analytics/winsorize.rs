use serde::{Deserialize, Serialize};

use crate::quantile::quantile;
use crate::{Error, Result};

/// How large values are capped before averaging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cap {
    /// Cap at the sample's own nearest-rank (lower) quantile.
    Quantile(f64),
    /// Cap at a fixed value, e.g. a threshold taken from a larger corpus.
    Fixed(f64),
    None,
}

impl Default for Cap {
    fn default() -> Self {
        Cap::Quantile(0.99)
    }
}

impl Cap {
    /// Threshold this policy yields for `values`, if any.
    pub fn threshold(&self, values: &[f64]) -> Result<Option<f64>> {
        match *self {
            Cap::Quantile(q) => {
                check_quantile(q)?;
                Ok(Some(quantile(values, q)?))
            }
            Cap::Fixed(t) => Ok(Some(t)),
            Cap::None => Ok(None),
        }
    }

    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.is_empty() {
            return Err(Error::EmptyInput("cannot cap an empty sample"));
        }
        Ok(match self.threshold(values)? {
            Some(t) => cap_at(values, t),
            None => values.to_vec(),
        })
    }
}

fn check_quantile(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "cap quantile {q} outside (0, 1)"
        )))
    }
}

/// Replaces every value above `threshold` with `threshold`.
pub fn cap_at<T: Copy + PartialOrd>(values: &[T], threshold: T) -> Vec<T> {
    values
        .iter()
        .map(|&v| if v > threshold { threshold } else { v })
        .collect()
}

/// One-sided winsorizing at the nearest-rank (lower) `quantile`.
/// Order and length are preserved.
pub fn winsorize<T: Copy + PartialOrd>(values: &[T], quantile_level: f64) -> Result<Vec<T>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("cannot winsorize an empty sample"));
    }
    check_quantile(quantile_level)?;
    let threshold = quantile(values, quantile_level)?;
    Ok(cap_at(values, threshold))
}

pub(crate) fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}
