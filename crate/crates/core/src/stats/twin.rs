use std::collections::BTreeMap;

use serde::Serialize;

use super::{Comparator, DevProjectSeries, Direction, MetricSeries};
use crate::{Error, Real, Result};

/// (project, developer value, project value) for one developer-year.
type Membership<'a, T> = (&'a str, T, T);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwinReport {
    /// (developer, year, unordered project pair) instances seen.
    pub n_developer_pairs: usize,
    /// Orientations where one project beat the other by the project threshold.
    pub n_project_better: usize,
    /// Of those, orientations where the developer also did better there.
    pub n_developer_better: usize,
    pub precision: f64,
    /// Developer-better rate over all orientations.
    pub base_rate: f64,
    pub lift: Option<f64>,
    pub thresholds: (f64, f64),
}

/// Compares each developer's metric across pairs of projects active in the
/// same year, conditioned on which project did better that year.
pub fn twin_analysis<T: Real>(
    dev_series: &[DevProjectSeries<T>],
    project_series: &[MetricSeries<T>],
    delta_project: T,
    delta_dev: T,
    direction: Direction,
    comparator: Comparator,
) -> Result<TwinReport> {
    if delta_project < T::zero() || delta_dev < T::zero() {
        return Err(Error::InvalidArgument(
            "twin thresholds must be non-negative".into(),
        ));
    }
    let sign: T = direction.sign();
    let projects: BTreeMap<&str, &MetricSeries<T>> = project_series
        .iter()
        .map(|s| (s.entity_id.as_str(), s))
        .collect();

    let mut by_dev: BTreeMap<(&str, i32), Vec<Membership<'_, T>>> = BTreeMap::new();
    for s in dev_series {
        let Some(project) = projects.get(s.project.as_str()) else {
            continue;
        };
        for (&year, &v) in &s.points {
            if let Some(&pv) = project.points.get(&year) {
                by_dev
                    .entry((s.developer.as_str(), year))
                    .or_default()
                    .push((s.project.as_str(), v, pv));
            }
        }
    }

    let (mut pairs, mut proj_better, mut dev_better_given, mut dev_better_all) =
        (0usize, 0usize, 0usize, 0usize);
    for entries in by_dev.values() {
        for (x, a) in entries.iter().enumerate() {
            for b in &entries[x + 1..] {
                pairs += 1;
                for (hi, lo) in [(a, b), (b, a)] {
                    let dev_better = comparator.exceeds(sign * (hi.1 - lo.1), delta_dev);
                    dev_better_all += dev_better as usize;
                    if comparator.exceeds(sign * (hi.2 - lo.2), delta_project) {
                        proj_better += 1;
                        dev_better_given += dev_better as usize;
                    }
                }
            }
        }
    }
    if proj_better == 0 {
        return Err(Error::EmptyInput(
            "no developer pairs with a better project",
        ));
    }
    let precision = dev_better_given as f64 / proj_better as f64;
    let base_rate = dev_better_all as f64 / (2 * pairs) as f64;
    Ok(TwinReport {
        n_developer_pairs: pairs,
        n_project_better: proj_better,
        n_developer_better: dev_better_given,
        precision,
        base_rate,
        lift: (base_rate > 0.0).then(|| precision / base_rate - 1.0),
        thresholds: (delta_project.to_f64_lossy(), delta_dev.to_f64_lossy()),
    })
}
