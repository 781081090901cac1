use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::{Error, Result, Scalar};

const DEFAULT_TABLE: &str = include_str!("../../data/distribution_table.csv");

/// Reference CCP thresholds by quality percentile.
///
/// Row `(p, t)` says `p`% of reference projects have a CCP of `t` or more,
/// so thresholds fall as the percentile rises.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionTable<T> {
    rows: Vec<(u32, T)>,
}

impl<T: Scalar> DistributionTable<T> {
    pub fn new(rows: Vec<(u32, T)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Table("no rows".into()));
        }
        for w in rows.windows(2) {
            let ((p0, t0), (p1, t1)) = (w[0], w[1]);
            if p1 <= p0 {
                return Err(Error::Table(format!(
                    "percentiles must ascend ({p0} then {p1})"
                )));
            }
            if t1 >= t0 {
                return Err(Error::Table(format!(
                    "thresholds must strictly decrease ({t0:?} at {p0}, {t1:?} at {p1})"
                )));
            }
        }
        if rows.iter().any(|(p, _)| *p == 0 || *p >= 100) {
            return Err(Error::Table("percentiles must lie in 1..=99".into()));
        }
        Ok(Self { rows })
    }

    /// CSV `percentile,ccp` with an optional header and `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("percentile") {
                continue;
            }
            let bad = |what: &str| Error::Table(format!("line {}: {what}", idx + 1));
            let (p, t) = line
                .split_once(',')
                .ok_or_else(|| bad("expected percentile,ccp"))?;
            let p: u32 = p.trim().parse().map_err(|_| bad("bad percentile"))?;
            let t: f64 = t.trim().parse().map_err(|_| bad("bad ccp"))?;
            rows.push((
                p,
                T::from_f64(t).ok_or_else(|| bad("ccp not representable"))?,
            ));
        }
        Self::new(rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Valid-domain CCP column of the GitHub 2019 distribution.
    pub fn bundled() -> Self {
        Self::parse(DEFAULT_TABLE).expect("bundled distribution table is valid")
    }

    pub fn rows(&self) -> &[(u32, T)] {
        &self.rows
    }
}

/// Percentile band a CCP falls in. `lower` is the best percentile the
/// project reaches; `upper` is the next listed percentile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Band {
    pub lower: Option<u32>,
    pub upper: Option<u32>,
}

impl Band {
    pub fn label(&self) -> String {
        match (self.lower, self.upper) {
            (None, Some(hi)) => format!("bottom {hi}%"),
            (Some(lo), None) => format!("top {}%", 100 - lo),
            (Some(lo), Some(hi)) => format!("percentile {lo}-{hi}"),
            (None, None) => "unranked".to_string(),
        }
    }

    /// True when the band straddles the 50th percentile.
    pub fn is_median(&self) -> bool {
        match (self.lower, self.upper) {
            (Some(lo), Some(hi)) => lo <= 50 && 50 < hi,
            _ => false,
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Places a CCP on the reference scale. No interpolation between rows.
pub fn rank_on_scale<T: Scalar>(ccp: T, table: &DistributionTable<T>) -> Band {
    let rows = table.rows();
    // Highest percentile whose threshold the project meets.
    let reached = rows.iter().rposition(|&(_, t)| ccp <= t);
    match reached {
        None => Band {
            lower: None,
            upper: Some(rows[0].0),
        },
        Some(i) => Band {
            lower: Some(rows[i].0),
            upper: rows.get(i + 1).map(|r| r.0),
        },
    }
}
