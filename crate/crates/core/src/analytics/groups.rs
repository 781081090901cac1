use std::collections::BTreeMap;

use serde::Serialize;

use super::project_year::ProjectYearStats;
use crate::quantile::quantile;
use crate::{Error, Result};

/// Labeled partition of projects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub name: String,
    pub labels: Vec<String>,
    /// repo_id -> label
    pub assignment: BTreeMap<String, String>,
}

impl Partition {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Self {
        Self {
            name: name.into(),
            labels,
            assignment: BTreeMap::new(),
        }
    }

    pub fn assign(&mut self, repo_id: impl Into<String>, label: impl Into<String>) {
        let label = label.into();
        if !self.labels.contains(&label) {
            self.labels.push(label.clone());
        }
        self.assignment.insert(repo_id.into(), label);
    }

    pub fn members<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.assignment
            .iter()
            .filter(move |(_, l)| l.as_str() == label)
            .map(|(r, _)| r.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub label: String,
    pub n: usize,
    pub mean_ccp: Option<f64>,
    /// group mean / complement mean - 1
    pub lift: Option<f64>,
}

/// Mean CCP per group and its lift over the rest of the projects.
pub fn group_compare(
    stats: &[ProjectYearStats],
    partition: &Partition,
) -> Result<Vec<GroupSummary>> {
    let mut by_label: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for s in stats {
        let label = partition.assignment.get(&s.repo_id).ok_or_else(|| {
            Error::InvalidArgument(format!("{} is not assigned to a group", s.repo_id))
        })?;
        by_label
            .entry(label.as_str())
            .or_default()
            .push(s.ccp.ccp_raw);
    }
    let total: f64 = by_label.values().flatten().sum();
    let count: usize = by_label.values().map(Vec::len).sum();

    Ok(partition
        .labels
        .iter()
        .map(|label| {
            let values = by_label.get(label.as_str()).map_or(&[][..], Vec::as_slice);
            let n = values.len();
            if n == 0 {
                return GroupSummary {
                    label: label.clone(),
                    n: 0,
                    mean_ccp: None,
                    lift: None,
                };
            }
            let sum: f64 = values.iter().sum();
            let mean = sum / n as f64;
            let rest = count - n;
            let lift = (rest > 0)
                .then(|| (total - sum) / rest as f64)
                .filter(|m| *m != 0.0)
                .map(|m| mean / m - 1.0);
            GroupSummary {
                label: label.clone(),
                n,
                mean_ccp: Some(mean),
                lift,
            }
        })
        .collect())
}

/// What [`control_groups`] needs to know about a project.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectProfile {
    pub repo_id: String,
    pub first_year: i32,
    pub developers: usize,
    pub dominant_language: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControlGroups {
    pub age: Partition,
    pub developers: Partition,
    pub language: Partition,
    /// Lower nearest-rank quartiles of the developer counts.
    pub developer_cutoffs: (usize, usize),
}

/// First year of the earliest age group; older projects are left out.
pub const AGE_FLOOR: i32 = 2008;

fn age_label(first_year: i32) -> Option<&'static str> {
    match first_year {
        y if y < AGE_FLOOR => None,
        y if y <= 2015 => Some("old"),
        2016 | 2017 => Some("medium"),
        _ => Some("young"),
    }
}

/// Builds the age partition and the developer-count quartile partition,
/// plus one group per dominant language.
pub fn control_groups(projects: &[ProjectProfile]) -> Result<ControlGroups> {
    if projects.is_empty() {
        return Err(Error::EmptyInput("control groups of an empty project list"));
    }
    let mut age = Partition::new("age", vec!["young".into(), "medium".into(), "old".into()]);
    for p in projects {
        if let Some(label) = age_label(p.first_year) {
            age.assign(&p.repo_id, label);
        }
    }

    let counts: Vec<usize> = projects.iter().map(|p| p.developers).collect();
    let few = quantile(&counts, 0.25)?;
    let intermediate = quantile(&counts, 0.75)?;
    let mut developers = Partition::new(
        "developers",
        vec!["few".into(), "intermediate".into(), "numerous".into()],
    );
    for p in projects {
        let label = if p.developers <= few {
            "few"
        } else if p.developers <= intermediate {
            "intermediate"
        } else {
            "numerous"
        };
        developers.assign(&p.repo_id, label);
    }

    let mut language = Partition::new("language", Vec::new());
    for p in projects {
        if let Some(lang) = &p.dominant_language {
            language.assign(&p.repo_id, lang.as_str());
        }
    }
    language.labels.sort();

    Ok(ControlGroups {
        age,
        developers,
        language,
        developer_cutoffs: (few, intermediate),
    })
}
