//! Cross-year and cross-project inference over metric series.

mod cochange;
mod series;
mod twin;

pub use cochange::{co_change, improvement_events, CoChangeParams, CoChangeReport, LOOKBACK_YEARS};
pub use series::{
    parse_dev_series, parse_series, stability, DevProjectSeries, MetricSeries, StabilityReport,
};
pub use twin::{twin_analysis, TwinReport};

use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// Which way a metric gets better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    HigherIsBetter,
    LowerIsBetter,
}

impl Direction {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Direction::HigherIsBetter => T::one(),
            Direction::LowerIsBetter => -T::one(),
        }
    }
}

/// How a change is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    /// change > threshold
    #[default]
    Strict,
    /// change >= threshold
    Inclusive,
}

impl Comparator {
    pub fn exceeds<T: Real>(self, change: T, threshold: T) -> bool {
        match self {
            Comparator::Strict => change > threshold,
            Comparator::Inclusive => change >= threshold,
        }
    }

    /// Strict for a zero threshold, inclusive for a positive one.
    pub fn for_threshold<T: Real>(threshold: T) -> Self {
        if threshold > T::zero() {
            Comparator::Inclusive
        } else {
            Comparator::Strict
        }
    }
}

/// Sample Pearson correlation.
pub fn pearson<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument(format!(
            "series lengths differ ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument(
            "pearson needs at least two points".into(),
        ));
    }
    let n = T::from_count(xs.len());
    let mx = xs.iter().copied().fold(T::zero(), |a, b| a + b) / n;
    let my = ys.iter().copied().fold(T::zero(), |a, b| a + b) / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::Undefined("pearson correlation of a constant series"));
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Ok(r.max(-T::one()).min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn perfect_correlations() {
        let xs = [1.0f64, 2.0, 4.0, 8.0];
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((pearson(&xs, &xs).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&xs, &neg).unwrap() + 1.0).abs() < 1e-15);
        let xs32 = [1.0f32, 2.0, 3.0];
        assert!((pearson(&xs32, &xs32).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn independent_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(2020);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let xs: Vec<f64> = (0..1000).map(|_| normal.sample(&mut rng)).collect();
        let ys: Vec<f64> = (0..1000).map(|_| normal.sample(&mut rng)).collect();
        assert!(pearson(&xs, &ys).unwrap().abs() < 0.1);
    }

    #[test]
    fn errors() {
        assert!(pearson(&[1.0, 2.0], &[1.0]).is_err());
        assert!(pearson(&[1.0], &[1.0]).is_err());
        assert!(pearson(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn comparator_policy() {
        assert!(!Comparator::Strict.exceeds(0.1, 0.1));
        assert!(Comparator::Inclusive.exceeds(0.1, 0.1));
        assert_eq!(Comparator::for_threshold(0.0), Comparator::Strict);
        assert_eq!(Comparator::for_threshold(0.1), Comparator::Inclusive);
    }
}
