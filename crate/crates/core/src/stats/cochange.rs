use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::Serialize;

use super::{Comparator, Direction, MetricSeries};
use crate::{Error, Real, Result};

/// Default scope of the co-change window, in years.
pub const LOOKBACK_YEARS: i32 = 5;

/// Event definitions for the two metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct CoChangeParams<T> {
    pub delta_i: T,
    pub delta_j: T,
    pub direction_i: Direction,
    pub direction_j: Direction,
    pub comparator: Comparator,
    /// Years whose transition to the following year is inside the window.
    pub years: Option<RangeInclusive<i32>>,
}

impl<T: Real> CoChangeParams<T> {
    pub fn new(delta_i: T, delta_j: T, direction_i: Direction, direction_j: Direction) -> Self {
        Self {
            delta_i,
            delta_j,
            direction_i,
            direction_j,
            comparator: Comparator::Strict,
            years: None,
        }
    }

    /// Restricts to the `LOOKBACK_YEARS` years ending at `year`.
    pub fn ending_at(mut self, year: i32) -> Self {
        self.years = Some(year - LOOKBACK_YEARS + 1..=year);
        self
    }

    pub fn swapped(&self) -> Self {
        Self {
            delta_i: self.delta_j,
            delta_j: self.delta_i,
            direction_i: self.direction_j,
            direction_j: self.direction_i,
            comparator: self.comparator,
            years: self.years.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoChangeReport {
    pub n_pairs: usize,
    pub n_improved_i: usize,
    pub n_improved_j: usize,
    pub n_improved_both: usize,
    pub match_rate: f64,
    pub precision: Option<f64>,
    pub base_rate: f64,
    pub lift: Option<f64>,
    pub thresholds: (f64, f64),
}

/// Whether each transition counts as an improvement.
pub fn improvement_events<T: Real>(
    series: &[MetricSeries<T>],
    delta: T,
    direction: Direction,
    comparator: Comparator,
    years: &RangeInclusive<i32>,
) -> BTreeMap<(String, i32), bool> {
    let sign: T = direction.sign();
    series
        .iter()
        .flat_map(|s| {
            s.adjacent_pairs(years).into_iter().map(move |(y, a, b)| {
                (
                    (s.entity_id.clone(), y),
                    comparator.exceeds(sign * (b - a), delta),
                )
            })
        })
        .collect()
}

/// Precision and lift of metric j improving given metric i improved,
/// over transitions present in both series.
pub fn co_change<T: Real>(
    series_i: &[MetricSeries<T>],
    series_j: &[MetricSeries<T>],
    params: &CoChangeParams<T>,
) -> Result<CoChangeReport> {
    if params.delta_i < T::zero() || params.delta_j < T::zero() {
        return Err(Error::InvalidArgument(
            "co-change thresholds must be non-negative".into(),
        ));
    }
    let years = params.years.clone().unwrap_or(i32::MIN..=i32::MAX - 1);
    let ev_i = improvement_events(
        series_i,
        params.delta_i,
        params.direction_i,
        params.comparator,
        &years,
    );
    let ev_j = improvement_events(
        series_j,
        params.delta_j,
        params.direction_j,
        params.comparator,
        &years,
    );

    let (mut n, mut ni, mut nj, mut both, mut same) = (0usize, 0usize, 0usize, 0usize, 0usize);
    for (key, &imp_i) in &ev_i {
        let Some(&imp_j) = ev_j.get(key) else {
            continue;
        };
        n += 1;
        ni += imp_i as usize;
        nj += imp_j as usize;
        both += (imp_i && imp_j) as usize;
        same += (imp_i == imp_j) as usize;
    }
    if n == 0 {
        return Err(Error::EmptyInput("no shared adjacent-year pairs"));
    }
    let precision = (ni > 0).then(|| both as f64 / ni as f64);
    // n*both / (ni*nj) in integers keeps the result independent of argument order.
    let lift = (ni > 0 && nj > 0).then(|| (n as f64 * both as f64) / (ni as f64 * nj as f64) - 1.0);
    Ok(CoChangeReport {
        n_pairs: n,
        n_improved_i: ni,
        n_improved_j: nj,
        n_improved_both: both,
        match_rate: same as f64 / n as f64,
        precision,
        base_rate: nj as f64 / n as f64,
        lift,
        thresholds: (params.delta_i.to_f64_lossy(), params.delta_j.to_f64_lossy()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_year(entity: &str, a: f64, b: f64) -> MetricSeries<f64> {
        MetricSeries::with_points(entity, [(2018, a), (2019, b)])
    }

    #[test]
    fn perfectly_coupled() {
        // CCP improves downward, speed upward
        let ccp: Vec<_> = (0..10)
            .map(|e| two_year(&format!("p{e}"), 0.3, if e < 4 { 0.2 } else { 0.35 }))
            .collect();
        let speed: Vec<_> = (0..10)
            .map(|e| two_year(&format!("p{e}"), 50.0, if e < 4 { 60.0 } else { 40.0 }))
            .collect();
        let params = CoChangeParams::new(
            0.0,
            0.0,
            Direction::LowerIsBetter,
            Direction::HigherIsBetter,
        );
        let r = co_change(&ccp, &speed, &params).unwrap();
        assert_eq!(r.n_pairs, 10);
        assert_eq!(r.precision, Some(1.0));
        assert_eq!(r.match_rate, 1.0);
        assert!((r.lift.unwrap() - (1.0 / 0.4 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn no_i_improvements() {
        let a = vec![two_year("p", 0.2, 0.3)];
        let b = vec![two_year("p", 0.2, 0.1)];
        let params =
            CoChangeParams::new(0.0, 0.0, Direction::LowerIsBetter, Direction::LowerIsBetter);
        let r = co_change(&a, &b, &params).unwrap();
        assert_eq!(r.precision, None);
        assert_eq!(r.lift, None);
        assert_eq!(r.match_rate, 0.0);
    }

    #[test]
    fn no_shared_pairs() {
        let a = vec![two_year("p", 0.2, 0.3)];
        let b = vec![two_year("q", 0.2, 0.1)];
        let params =
            CoChangeParams::new(0.0, 0.0, Direction::LowerIsBetter, Direction::LowerIsBetter);
        assert!(co_change(&a, &b, &params).is_err());
    }

    #[test]
    fn ties_and_comparators() {
        let a = vec![two_year("p", 0.25, 0.5)];
        let mut params = CoChangeParams::new(
            0.25,
            0.25,
            Direction::HigherIsBetter,
            Direction::HigherIsBetter,
        );
        assert_eq!(co_change(&a, &a, &params).unwrap().n_improved_i, 0);
        params.comparator = Comparator::Inclusive;
        assert_eq!(co_change(&a, &a, &params).unwrap().n_improved_i, 1);
    }

    #[test]
    fn lookback_window() {
        let s = vec![MetricSeries::with_points(
            "p",
            (2010..=2019).map(|y| (y, y as f64)),
        )];
        let params = CoChangeParams::new(
            0.0,
            0.0,
            Direction::HigherIsBetter,
            Direction::HigherIsBetter,
        )
        .ending_at(2019);
        // 2015..=2019 holds four transitions
        assert_eq!(co_change(&s, &s, &params).unwrap().n_pairs, 4);
    }

    #[test]
    fn independent_coin_flips() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let (mut si, mut sj) = (Vec::new(), Vec::new());
        for e in 0..10_000 {
            let di = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let dj = if rng.random_bool(0.3) { 1.0 } else { -1.0 };
            si.push(two_year(&format!("e{e}"), 0.0, di));
            sj.push(two_year(&format!("e{e}"), 0.0, dj));
        }
        let params = CoChangeParams::new(
            0.0,
            0.0,
            Direction::HigherIsBetter,
            Direction::HigherIsBetter,
        );
        let r = co_change(&si, &sj, &params).unwrap();
        assert_eq!(r.n_pairs, 10_000);
        assert!(r.lift.unwrap().abs() < 0.05, "{r:?}");
        let s = co_change(&sj, &si, &params.swapped()).unwrap();
        assert_eq!(r.lift, s.lift);
    }
}
