//! Resampling checks of the estimator.
//!
//! Every iteration owns a ChaCha stream derived from `(seed, iteration)`, so
//! results do not depend on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ccp_from_hit_rate, ModelPerformance};
use crate::classifier::{LabeledCommit, TermModel};
use crate::quantile::sorted_quantile;
use crate::{Error, Result};

const MAX_REDRAWS_PER_ITERATION: usize = 1000;

fn iteration_rng(seed: u64, iteration: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration as u64);
    rng
}

/// Distribution of (estimated CCP - true positive rate) over resamples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapReport {
    pub iterations: usize,
    pub seed: u64,
    pub coverage: f64,
    pub sample_size: usize,
    pub recall: f64,
    pub fpr: f64,
    pub mean: f64,
    pub median: f64,
    pub lower: f64,
    pub upper: f64,
    pub min: f64,
    pub max: f64,
}

/// Resamples `(label, predicted)` pairs and compares the estimate with the
/// resample's true positive rate.
///
/// The central interval drops `floor(iterations * (1 - coverage) / 2)`
/// sorted differences from each tail.
pub fn bootstrap_differences(
    pairs: &[(bool, bool)],
    perf: &ModelPerformance<f64>,
    iterations: usize,
    coverage: f64,
    seed: u64,
) -> Result<BootstrapReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("bootstrap of an empty corpus"));
    }
    check_iterations_and_coverage(iterations, coverage)?;

    let n = pairs.len();
    let mut diffs: Vec<f64> = (0..iterations)
        .map(|it| {
            let mut rng = iteration_rng(seed, it);
            let (mut positives, mut hits) = (0usize, 0usize);
            for _ in 0..n {
                let (label, predicted) = pairs[rng.random_range(0..n)];
                positives += label as usize;
                hits += predicted as usize;
            }
            let truth = positives as f64 / n as f64;
            let (estimate, _) = ccp_from_hit_rate(hits as f64 / n as f64, perf);
            estimate - truth
        })
        .collect();
    diffs.sort_by(f64::total_cmp);

    let trim = ((iterations as f64) * (1.0 - coverage) / 2.0 + 1e-9).floor() as usize;
    let mean = diffs.iter().sum::<f64>() / iterations as f64;
    Ok(BootstrapReport {
        iterations,
        seed,
        coverage,
        sample_size: n,
        recall: perf.recall(),
        fpr: perf.fpr(),
        mean,
        median: sorted_quantile(&diffs, 0.5)?,
        lower: diffs[trim],
        upper: diffs[iterations - 1 - trim],
        min: diffs[0],
        max: diffs[iterations - 1],
    })
}

/// Classifies the corpus once, then runs [`bootstrap_differences`].
pub fn bootstrap_difference_distribution(
    corpus: &[LabeledCommit],
    model: &TermModel,
    perf: &ModelPerformance<f64>,
    iterations: usize,
    coverage: f64,
    seed: u64,
) -> Result<BootstrapReport> {
    let pairs = classify_corpus(corpus, model);
    bootstrap_differences(&pairs, perf, iterations, coverage, seed)
}

fn classify_corpus(corpus: &[LabeledCommit], model: &TermModel) -> Vec<(bool, bool)> {
    corpus
        .iter()
        .map(|c| (c.label, model.classify(&c.message).corrective))
        .collect()
}

fn check_iterations_and_coverage(iterations: usize, coverage: f64) -> Result<()> {
    if iterations == 0 {
        return Err(Error::InvalidArgument(
            "iterations must be at least 1".into(),
        ));
    }
    if !(coverage > 0.0 && coverage < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "coverage {coverage} outside (0, 1)"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentSensitivity {
    pub lower: f64,
    pub upper: f64,
    pub max: f64,
    pub p95: f64,
}

/// How far two estimators fitted on independent resamples disagree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub iterations: usize,
    pub seed: u64,
    pub sample_size: usize,
    /// Resamples discarded for lacking positives or negatives, or for
    /// recall not exceeding fpr.
    pub redraws: usize,
    pub segments: Vec<SegmentSensitivity>,
}

fn fit_resample(pairs: &[(bool, bool)], rng: &mut ChaCha8Rng) -> Option<ModelPerformance<f64>> {
    let n = pairs.len();
    let (mut tp, mut fn_, mut fp, mut tn) = (0usize, 0usize, 0usize, 0usize);
    for _ in 0..n {
        match pairs[rng.random_range(0..n)] {
            (true, true) => tp += 1,
            (true, false) => fn_ += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
        }
    }
    if tp + fn_ == 0 || fp + tn == 0 {
        return None;
    }
    let recall = tp as f64 / (tp + fn_) as f64;
    let fpr = fp as f64 / (fp + tn) as f64;
    ModelPerformance::new(recall, fpr).ok()
}

/// Hit-rate segments are evaluated at their endpoints; the estimators are
/// linear, so their difference peaks there.
pub fn estimator_sensitivity_pairs(
    pairs: &[(bool, bool)],
    iterations: usize,
    segments: &[(f64, f64)],
    seed: u64,
) -> Result<SensitivityReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("sensitivity analysis of an empty corpus"));
    }
    if iterations == 0 {
        return Err(Error::InvalidArgument(
            "iterations must be at least 1".into(),
        ));
    }
    if segments.is_empty() {
        return Err(Error::InvalidArgument("no evaluation segments".into()));
    }
    for &(a, b) in segments {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
            return Err(Error::InvalidArgument(format!(
                "segment [{a}, {b}] not within [0, 1]"
            )));
        }
    }

    let mut redraws = 0usize;
    let mut per_segment: Vec<Vec<f64>> = vec![Vec::with_capacity(iterations); segments.len()];
    for it in 0..iterations {
        let mut rng = iteration_rng(seed, it);
        let mut attempts = 0usize;
        let (first, second) = loop {
            let a = fit_resample(pairs, &mut rng);
            let b = fit_resample(pairs, &mut rng);
            match (a, b) {
                (Some(a), Some(b)) => break (a, b),
                _ => {
                    redraws += 1;
                    attempts += 1;
                    if attempts >= MAX_REDRAWS_PER_ITERATION {
                        return Err(Error::Undefined(
                            "resamples never contain both classes with recall above fpr",
                        ));
                    }
                }
            }
        };
        for (seg, out) in segments.iter().zip(per_segment.iter_mut()) {
            let gap =
                |x: f64| (ccp_from_hit_rate(x, &first).0 - ccp_from_hit_rate(x, &second).0).abs();
            out.push(gap(seg.0).max(gap(seg.1)));
        }
    }

    let segments = segments
        .iter()
        .zip(per_segment)
        .map(|(&(lower, upper), mut diffs)| {
            diffs.sort_by(f64::total_cmp);
            Ok(SegmentSensitivity {
                lower,
                upper,
                max: *diffs.last().expect("iterations >= 1"),
                p95: sorted_quantile(&diffs, 0.95)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SensitivityReport {
        iterations,
        seed,
        sample_size: pairs.len(),
        redraws,
        segments,
    })
}

pub fn estimator_sensitivity(
    corpus: &[LabeledCommit],
    model: &TermModel,
    iterations: usize,
    segments: &[(f64, f64)],
    seed: u64,
) -> Result<SensitivityReport> {
    let pairs = classify_corpus(corpus, model);
    estimator_sensitivity_pairs(&pairs, iterations, segments, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn validation_counts() -> Vec<(bool, bool)> {
        let mut v = Vec::with_capacity(400);
        v.extend(std::iter::repeat_n((true, true), 91));
        v.extend(std::iter::repeat_n((true, false), 18));
        v.extend(std::iter::repeat_n((false, true), 34));
        v.extend(std::iter::repeat_n((false, false), 257));
        v
    }

    #[test]
    fn perfect_classifier_has_zero_differences() {
        let pairs: Vec<_> = (0..50).map(|i| (i % 3 == 0, i % 3 == 0)).collect();
        let perf = ModelPerformance::new(1.0, 0.0).unwrap();
        let r = bootstrap_differences(&pairs, &perf, 200, 0.95, 1).unwrap();
        assert_eq!((r.min, r.max, r.mean), (0.0, 0.0, 0.0));
    }

    #[test]
    fn single_iteration_collapses() {
        let r = bootstrap_differences(
            &validation_counts(),
            &ModelPerformance::baseline(),
            1,
            0.95,
            9,
        )
        .unwrap();
        assert_eq!(r.lower, r.upper);
        assert_eq!(r.lower, r.mean);
    }

    #[test]
    fn deterministic_given_seed() {
        let perf = ModelPerformance::baseline();
        let a = bootstrap_differences(&validation_counts(), &perf, 300, 0.9, 42).unwrap();
        let b = bootstrap_differences(&validation_counts(), &perf, 300, 0.9, 42).unwrap();
        let c = bootstrap_differences(&validation_counts(), &perf, 300, 0.9, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.lower <= a.mean && a.mean <= a.upper);
    }

    #[test]
    fn argument_errors() {
        let perf = ModelPerformance::baseline();
        assert!(bootstrap_differences(&[], &perf, 10, 0.95, 0).is_err());
        assert!(bootstrap_differences(&validation_counts(), &perf, 0, 0.95, 0).is_err());
        assert!(bootstrap_differences(&validation_counts(), &perf, 10, 1.0, 0).is_err());
        assert!(estimator_sensitivity_pairs(&validation_counts(), 10, &[(0.5, 1.2)], 0).is_err());
    }

    #[test]
    fn sensitivity_zero_for_perfect_classifier() {
        let pairs: Vec<_> = (0..40).map(|i| (i % 2 == 0, i % 2 == 0)).collect();
        let r = estimator_sensitivity_pairs(&pairs, 100, &[(0.0, 1.0)], 3).unwrap();
        assert_eq!(r.segments[0].max, 0.0);
        assert_eq!(r.redraws, 0);
    }

    #[test]
    fn sensitivity_fails_on_single_class() {
        let pairs = vec![(true, true); 20];
        assert!(matches!(
            estimator_sensitivity_pairs(&pairs, 5, &[(0.0, 1.0)], 3),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn sensitivity_counts_redraws() {
        // Two positives in 12 items: some resamples miss them entirely.
        let mut pairs = vec![(false, false); 9];
        pairs.push((false, true));
        pairs.push((true, true));
        pairs.push((true, false));
        let r = estimator_sensitivity_pairs(&pairs, 200, &[(0.0, 1.0)], 5).unwrap();
        assert!(r.redraws > 0);
    }
}
