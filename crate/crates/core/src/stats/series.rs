use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::pearson;
use crate::{Error, Real, Result};

/// Yearly values of one metric for one entity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSeries<T> {
    pub entity_id: String,
    pub points: BTreeMap<i32, T>,
}

impl<T: Real> MetricSeries<T> {
    pub fn new(entity_id: impl Into<String>) -> Self {
        Self {
            entity_id: entity_id.into(),
            points: BTreeMap::new(),
        }
    }

    pub fn with_points(
        entity_id: impl Into<String>,
        points: impl IntoIterator<Item = (i32, T)>,
    ) -> Self {
        Self {
            entity_id: entity_id.into(),
            points: points.into_iter().collect(),
        }
    }

    /// `(year, value_t, value_t+1)` for consecutive years inside `years`.
    pub fn adjacent_pairs(&self, years: &RangeInclusive<i32>) -> Vec<(i32, T, T)> {
        self.points
            .iter()
            .filter(|(y, _)| years.contains(y) && years.contains(&(**y + 1)))
            .filter_map(|(&y, &v)| self.points.get(&(y + 1)).map(|&w| (y, v, w)))
            .collect()
    }
}

#[derive(Debug, Deserialize)]
struct SeriesRow {
    entity: String,
    year: i32,
    value: f64,
}

/// Parses CSV `entity,year,value`. A repeated (entity, year) is an error.
pub fn parse_series(text: &str) -> Result<Vec<MetricSeries<f64>>> {
    let mut out: BTreeMap<String, MetricSeries<f64>> = BTreeMap::new();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    for (i, row) in reader.deserialize::<SeriesRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let series = out
            .entry(row.entity.clone())
            .or_insert_with(|| MetricSeries::new(row.entity.clone()));
        if series.points.insert(row.year, row.value).is_some() {
            return Err(Error::Parse {
                line,
                message: format!("second value for {} in {}", row.entity, row.year),
            });
        }
    }
    Ok(out.into_values().collect())
}

/// A developer's yearly metric inside one project.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DevProjectSeries<T> {
    pub developer: String,
    pub project: String,
    pub points: BTreeMap<i32, T>,
}

#[derive(Debug, Deserialize)]
struct DevRow {
    developer: String,
    project: String,
    year: i32,
    value: f64,
}

/// Parses CSV `developer,project,year,value`.
pub fn parse_dev_series(text: &str) -> Result<Vec<DevProjectSeries<f64>>> {
    let mut out: BTreeMap<(String, String), BTreeMap<i32, f64>> = BTreeMap::new();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    for (i, row) in reader.deserialize::<DevRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let points = out
            .entry((row.developer.clone(), row.project.clone()))
            .or_default();
        if points.insert(row.year, row.value).is_some() {
            return Err(Error::Parse {
                line,
                message: format!(
                    "second value for {}/{} in {}",
                    row.developer, row.project, row.year
                ),
            });
        }
    }
    Ok(out
        .into_iter()
        .map(|((developer, project), points)| DevProjectSeries {
            developer,
            project,
            points,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport<T> {
    pub n_pairs: usize,
    /// Absent when either side of the pooled pairs is constant.
    pub pearson: Option<T>,
    pub mean_delta: T,
    pub mean_abs_delta: T,
}

/// Pools every adjacent-year pair of every entity inside `years`.
pub fn stability<T: Real>(
    series: &[MetricSeries<T>],
    years: RangeInclusive<i32>,
) -> Result<StabilityReport<T>> {
    let pairs: Vec<(T, T)> = series
        .iter()
        .flat_map(|s| s.adjacent_pairs(&years))
        .map(|(_, a, b)| (a, b))
        .collect();
    if pairs.is_empty() {
        return Err(Error::EmptyInput("no adjacent-year pairs in range"));
    }
    let n = T::from_count(pairs.len());
    let mean_delta = pairs.iter().fold(T::zero(), |acc, (a, b)| acc + (*b - *a)) / n;
    let mean_abs_delta = pairs
        .iter()
        .fold(T::zero(), |acc, (a, b)| acc + (*b - *a).abs())
        / n;
    let (xs, ys): (Vec<T>, Vec<T>) = pairs.iter().copied().unzip();
    let pearson = if pairs.len() >= 2 {
        pearson(&xs, &ys).ok()
    } else {
        None
    };
    Ok(StabilityReport {
        n_pairs: pairs.len(),
        pearson,
        mean_delta,
        mean_abs_delta,
    })
}
