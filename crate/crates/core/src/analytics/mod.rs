//! Per-project, per-year process metrics.

mod files;
mod groups;
mod process;
mod project_year;
mod terms;
mod winsorize;

pub use crate::estimator::{rank_on_scale, Band, DistributionTable};
pub use files::{
    dominant_language, file_length_stats, parse_head_listing, FileLengthStats, HeadEntry,
    DOMINANCE_SHARE, LANGUAGE_EXTENSIONS,
};
pub use groups::{
    control_groups, group_compare, ControlGroups, GroupSummary, Partition, ProjectProfile,
    AGE_FLOOR,
};
pub use process::{
    coupling, coupling_per_file, developer_speed, onboarding, retention, ONBOARDING_MIN_NEW,
    SPEED_CAP,
};
pub use project_year::{
    project_ccp, project_year_stats, project_years, ProjectYearStats, StatsOptions, StatsRow,
};
pub use terms::{
    group_by_file, group_by_project, quality_term_analysis, CommitGroup, Granularity, TermFlag,
    TermSet, TermThresholds, CONTROL_TERMS, QUALITY_TERMS,
};
pub use winsorize::{cap_at, winsorize, Cap};
