//! Fixtures and property checks shared by the integration test targets.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ccp_core::analytics::{cap_at, coupling, developer_speed, winsorize, Cap};
use ccp_core::classifier::{
    english_hit_rate, ClassifierVerdict, ConfusionMatrix, EnglishModel, LabeledCommit, TermModel,
};
use ccp_core::estimator::{
    bootstrap_differences, estimate_ccp, expected_hit_rate, rank_on_scale, DistributionTable,
    ModelPerformance,
};
use ccp_core::ingestion::{
    involved_authors, parse_commit_log, select_projects, CommitRecord, ProjectDescriptor,
    ProjectMetadata,
};
use ccp_core::stats::{
    co_change, improvement_events, pearson, twin_analysis, CoChangeParams, Comparator,
    DevProjectSeries, Direction, MetricSeries,
};
use ccp_core::{Exact, Performance};
use chrono::{TimeZone, Utc};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TP_MSG: &str = "fix crash on startup";
pub const FN_MSG: &str = "handle empty input in parser";
pub const FP_MSG: &str = "remove unused exceptions";
pub const TN_MSG: &str = "add feature";

/// A labeled corpus realizing the confusion counts `tp, fn, fp, tn` under the
/// bundled model.
pub fn corpus_with_counts(tp: usize, fn_: usize, fp: usize, tn: usize) -> Vec<LabeledCommit> {
    [
        (TP_MSG, true, tp),
        (FN_MSG, true, fn_),
        (FP_MSG, false, fp),
        (TN_MSG, false, tn),
    ]
    .into_iter()
    .flat_map(|(m, label, n)| std::iter::repeat_n(LabeledCommit::new(m, label), n))
    .collect()
}

pub fn validation_corpus() -> Vec<LabeledCommit> {
    corpus_with_counts(91, 18, 34, 257)
}

const CORRECTIVE_POOL: &[&str] = &[
    "fix crash when config is missing",
    "fix off-by-one in pager",
    "resolve deadlock in scheduler",
    "bug: wrong offset after resize",
    "handle empty input",
    "guard against negative sizes",
    "patch memory leak in cache",
    "revert broken migration",
];

const OTHER_POOL: &[&str] = &[
    "add export to csv",
    "update dependencies",
    "refactor storage layer",
    "fix typo in readme",
    "improve error messages",
    "document the public api",
    "bump version to 2.1",
    "add retry with backoff for failures",
];

/// A synthetic repository where exactly `round(p * n)` commits are
/// corrective. Messages come from fixed pools the classifier partly misreads.
pub fn synthetic_repo(repo: &str, n: usize, p: f64, seed: u64) -> (Vec<CommitRecord>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = (p * n as f64).round() as usize;
    let mut labels: Vec<bool> = (0..n).map(|i| i < k).collect();
    for i in (1..n).rev() {
        labels.swap(i, rng.random_range(0..=i));
    }
    let commits = labels
        .iter()
        .enumerate()
        .map(|(i, &corrective)| {
            let pool = if corrective {
                CORRECTIVE_POOL
            } else {
                OTHER_POOL
            };
            commit(
                repo,
                i,
                &format!("dev{}@x.org", rng.random_range(0..20)),
                pool[rng.random_range(0..pool.len())],
                1 + i % 3,
            )
        })
        .collect();
    (commits, labels)
}

/// Recall and fpr of the bundled model on the synthetic generator, measured
/// on an independent draw.
pub fn generator_performance(model: &TermModel) -> Performance {
    let (commits, labels) = synthetic_repo("calibration/repo", 40_000, 0.5, 0xCA11);
    let cm = ConfusionMatrix::from_pairs(
        commits
            .iter()
            .zip(&labels)
            .map(|(c, &l)| (l, model.classify(&c.message).corrective)),
    );
    ModelPerformance::from_confusion(&cm).expect("generator is separable")
}

pub fn commit(repo: &str, i: usize, author: &str, message: &str, files: usize) -> CommitRecord {
    CommitRecord {
        repo_id: repo.to_string(),
        hash: format!("{repo}-{i:06}"),
        author_id: author.to_string(),
        timestamp: Utc
            .with_ymd_and_hms(2019, 1 + (i % 12) as u32, 1 + (i % 28) as u32, 12, 0, 0)
            .unwrap(),
        message: message.to_string(),
        files: (0..files).map(|f| format!("src/f{f}.rs")).collect(),
        is_merge: false,
    }
}

// ---------------------------------------------------------------------------
// property checks

pub type Check = Result<(), String>;
pub type Property = (&'static str, fn() -> Check);

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Check {
    runner(cases)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn two_year_series(prefix: &str, values: &[(f64, f64)]) -> Vec<MetricSeries<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            MetricSeries::with_points(format!("{prefix}{e}"), [(2018, a), (2019, b)])
        })
        .collect()
}

pub fn lift_symmetry() -> Check {
    let strategy = (
        prop::collection::vec(
            (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
            1..80,
        ),
        0.0..0.5f64,
        0.0..0.5f64,
        any::<bool>(),
        any::<bool>(),
    );
    check(256, strategy, |(rows, di, dj, hi, hj)| {
        let si = two_year_series("e", &rows.iter().map(|r| (r.0, r.1)).collect::<Vec<_>>());
        let sj = two_year_series("e", &rows.iter().map(|r| (r.2, r.3)).collect::<Vec<_>>());
        let dir = |h: bool| {
            if h {
                Direction::HigherIsBetter
            } else {
                Direction::LowerIsBetter
            }
        };
        let params = CoChangeParams::new(di, dj, dir(hi), dir(hj));
        let a = co_change(&si, &sj, &params).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let b = co_change(&sj, &si, &params.swapped())
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        match (a.lift, b.lift) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-9, "{x} vs {y}"),
            (x, y) => prop_assert_eq!(x, y),
        }
        if let (Some(p), Some(l)) = (a.precision, a.lift) {
            prop_assert!((l - (p / a.base_rate - 1.0)).abs() <= 1e-9);
        }
        Ok(())
    })
}

pub fn event_counts_monotone_in_threshold() -> Check {
    let strategy = (
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..60),
        0.0..0.5f64,
        0.0..0.5f64,
    );
    check(256, strategy, |(rows, d1, d2)| {
        let s = two_year_series("e", &rows);
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        for cmp in [Comparator::Strict, Comparator::Inclusive] {
            let count = |d: f64| {
                improvement_events(&s, d, Direction::HigherIsBetter, cmp, &(2018..=2019))
                    .values()
                    .filter(|v| **v)
                    .count()
            };
            prop_assert!(count(hi) <= count(lo));
        }
        Ok(())
    })
}

pub fn pearson_affine_invariance() -> Check {
    let strategy = (
        prop::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 3..50),
        0.1..10.0f64,
        -50.0..50.0f64,
    );
    check(256, strategy, |(pts, scale, shift)| {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let Ok(r) = pearson(&xs, &ys) else {
            return Ok(());
        };
        let moved: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
        let r2 = pearson(&moved, &ys).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!((r - r2).abs() < 1e-9, "{r} vs {r2}");
        Ok(())
    })
}

pub fn twin_identity_precision() -> Check {
    let strategy = (
        prop::collection::vec(prop::collection::btree_set(0usize..6, 2..5), 1..20),
        prop::collection::vec(0.0..100.0f64, 6),
        0.0..20.0f64,
        0.0..1.0f64,
    );
    check(256, strategy, |(memberships, values, dp, frac)| {
        let dd = dp * frac;
        let projects: Vec<_> = values
            .iter()
            .enumerate()
            .map(|(p, &v)| MetricSeries::with_points(format!("p{p}"), [(2019, v)]))
            .collect();
        let devs: Vec<_> = memberships
            .iter()
            .enumerate()
            .flat_map(|(d, ps)| {
                let values = &values;
                ps.iter().map(move |&p| DevProjectSeries {
                    developer: format!("d{d}"),
                    project: format!("p{p}"),
                    points: [(2019, values[p])].into_iter().collect(),
                })
            })
            .collect();
        for cmp in [Comparator::Strict, Comparator::Inclusive] {
            if let Ok(r) = twin_analysis(&devs, &projects, dp, dd, Direction::HigherIsBetter, cmp) {
                prop_assert_eq!(r.precision, 1.0);
            }
        }
        Ok(())
    })
}

pub fn winsorize_idempotent_and_monotone() -> Check {
    let strategy = (prop::collection::vec(-1e6..1e6f64, 1..300), 0.01..0.99f64);
    check(256, strategy, |(mut xs, q)| {
        let once = winsorize(&xs, q).unwrap();
        prop_assert_eq!(&winsorize(&once, q).unwrap(), &once);
        prop_assert_eq!(once.len(), xs.len());
        xs.sort_by(f64::total_cmp);
        let sorted = winsorize(&xs, q).unwrap();
        prop_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
        let t = *sorted.iter().max_by(|a, b| a.total_cmp(b)).unwrap();
        prop_assert_eq!(cap_at(&xs, t), sorted);
        Ok(())
    })
}

pub fn coupling_ignores_corrective_commits() -> Check {
    let strategy = prop::collection::vec((any::<bool>(), 1usize..40, 0usize..40), 1..80);
    check(256, strategy, |rows| {
        let verdicts: Vec<ClassifierVerdict> = rows
            .iter()
            .map(|r| ClassifierVerdict::from_hits(r.0 as usize, 0, 0))
            .collect();
        let base: Vec<CommitRecord> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| commit("r", i, "a", "m", r.1))
            .collect();
        let perturbed: Vec<CommitRecord> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| commit("r", i, "a", "m", if r.0 { r.2 } else { r.1 }))
            .collect();
        for cap in [Cap::None, Cap::Quantile(0.99), Cap::Fixed(10.0)] {
            prop_assert_eq!(
                coupling(&base, &verdicts, cap).unwrap(),
                coupling(&perturbed, &verdicts, cap).unwrap()
            );
        }
        Ok(())
    })
}

pub fn speed_ignores_minor_authors() -> Check {
    let strategy = (
        prop::collection::vec(0usize..40, 1..10),
        prop::collection::vec(1usize..12, 0..10),
    );
    check(128, strategy, |(major, minor)| {
        let mut commits = Vec::new();
        for (a, &n) in major.iter().enumerate() {
            for _ in 0..n {
                commits.push(commit("r", commits.len(), &format!("major{a}"), "m", 1));
            }
        }
        let before = developer_speed(&commits, &involved_authors(&commits, 12), 500);
        for (a, &n) in minor.iter().enumerate() {
            for _ in 0..n {
                commits.push(commit("r", commits.len(), &format!("minor{a}"), "m", 1));
            }
        }
        prop_assert_eq!(
            before,
            developer_speed(&commits, &involved_authors(&commits, 12), 500)
        );
        Ok(())
    })
}

pub fn estimate_strictly_increasing_in_k() -> Check {
    let strategy = (1usize..3000, 0.0..0.5f64, 0.01..0.5f64);
    check(256, strategy, |(n, fpr, gap)| {
        let perf = ModelPerformance::new((fpr + gap).min(1.0), fpr).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=n.min(400) {
            let e = estimate_ccp(k, n, &perf).unwrap();
            prop_assert!(e.ccp_raw > prev, "k={k}");
            prev = e.ccp_raw;
        }
        Ok(())
    })
}

pub fn estimate_round_trip() -> Check {
    let perf = Performance::baseline();
    check(512, (0.0..=1.0f64, 1usize..5000), move |(p, n)| {
        let hr = expected_hit_rate(p, &perf).unwrap();
        let k = (hr * n as f64).round() as usize;
        let e = estimate_ccp(k, n, &perf).unwrap();
        // quantizing k moves the hit rate by at most 1/(2n)
        let tol = 1.0 / (2.0 * n as f64) / (perf.recall() - perf.fpr()) + 1e-12;
        prop_assert!(
            (e.ccp_raw - p).abs() <= tol,
            "p={p} n={n} got {}",
            e.ccp_raw
        );
        Ok(())
    })
}

pub fn rate_identity_exact() -> Check {
    check(
        512,
        (0usize..500, 0usize..500, 0usize..500, 0usize..500),
        |(tp, fn_, fp, tn)| {
            let cm = ConfusionMatrix::new(tp, fn_, fp, tn);
            let total = Exact::from_integer(cm.total() as i64);
            match (cm.hit_rate::<Exact>(), cm.positive_rate::<Exact>()) {
                (Some(h), Some(p)) => {
                    prop_assert_eq!(h * total, Exact::from_integer((tp + fp) as i64));
                    prop_assert_eq!(p * total, Exact::from_integer((tp + fn_) as i64));
                }
                (h, p) => {
                    prop_assert_eq!(cm.total(), 0);
                    prop_assert!(h.is_none() && p.is_none());
                }
            }
            Ok(())
        },
    )
}

pub fn rank_monotone() -> Check {
    let table = DistributionTable::<f64>::bundled();
    check(1024, (-0.5..1.5f64, -0.5..1.5f64), move |(a, b)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(rank_on_scale(hi, &table) <= rank_on_scale(lo, &table));
        Ok(())
    })
}

fn project_strategy() -> impl Strategy<Value = Vec<ProjectDescriptor>> {
    let one = (
        0usize..4,
        0usize..3,
        any::<bool>(),
        0usize..250,
        0usize..150,
        0usize..150,
    );
    prop::collection::vec(one, 1..10).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (owner, name, fork, start, len, other))| {
                let mut d = ProjectDescriptor::new(ProjectMetadata {
                    repo_id: format!("o{owner}/n{name}-{i}"),
                    owner: format!("o{owner}"),
                    name: format!("n{name}"),
                    is_fork: fork && i % 3 == 0,
                });
                // overlapping hash ranges create shared commits
                for h in start..start + len {
                    d.add_commit(2019, format!("c{h}"));
                }
                for h in 0..other {
                    d.add_commit(2018, format!("p{i}-{h}"));
                }
                d
            })
            .collect()
    })
}

pub fn selection_idempotent() -> Check {
    check(256, (project_strategy(), 0usize..120), |(projects, min)| {
        let first = select_projects(&projects, 2019, min);
        prop_assert_eq!(first.accepted.len() + first.excluded.len(), projects.len());
        let ids: BTreeSet<&str> = first.excluded.iter().map(|e| e.repo_id.as_str()).collect();
        prop_assert_eq!(ids.len(), first.excluded.len());
        let second = select_projects(&first.accepted, 2019, min);
        prop_assert_eq!(&second.accepted, &first.accepted);
        prop_assert!(second.excluded.is_empty());
        Ok(())
    })
}

pub fn bootstrap_deterministic() -> Check {
    let strategy = (
        prop::collection::vec((any::<bool>(), any::<bool>()), 1..60),
        any::<u64>(),
    );
    check(32, strategy, |(pairs, seed)| {
        let perf = Performance::baseline();
        let a = bootstrap_differences(&pairs, &perf, 200, 0.95, seed).unwrap();
        let b = bootstrap_differences(&pairs, &perf, 200, 0.95, seed).unwrap();
        prop_assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        Ok(())
    })
}

pub fn classifier_total_and_deterministic() -> Check {
    let model = TermModel::default_model();
    check(512, "\\PC{0,200}", move |msg: String| {
        let v = model.classify(&msg);
        prop_assert_eq!(v, model.classify(&msg));
        prop_assert!(!v.corrective || v.fix_hits >= 1);
        Ok(())
    })
}

pub fn classifier_monotone() -> Check {
    let model = TermModel::default_model();
    let fragments = prop::sample::select(vec![
        "fix",
        "bug",
        "not a bug",
        "typo",
        "the",
        "crash",
        "error message",
        "works",
        "as",
        "intended",
        "readme",
        "add",
        "isn't",
        "problem",
        "won't",
        "fail-safe",
        "\n",
    ]);
    let strategy = prop::collection::vec(fragments, 0..20).prop_map(|w| w.join(" "));
    check(512, strategy, move |msg| {
        let base = model.classify(&msg).score;
        let with_fix = model.classify(&format!("{msg}\nsegfault")).score;
        let with_negation = model.classify(&format!("{msg}\nworks as intended")).score;
        prop_assert!(with_fix >= base);
        prop_assert!(with_negation <= base);
        Ok(())
    })
}

pub fn english_rate_order_invariant() -> Check {
    let english = EnglishModel::default_model();
    let words = prop::sample::select(vec![
        "the",
        "fix",
        "that",
        "ошибка",
        "und",
        "with",
        "über",
        "make",
    ]);
    let message = prop::collection::vec(words, 0..6).prop_map(|w| w.join(" "));
    let strategy = prop::collection::vec(message, 1..30)
        .prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle()));
    check(256, strategy, move |(messages, shuffled)| {
        prop_assert_eq!(
            english_hit_rate(&messages, &english).unwrap(),
            english_hit_rate(&shuffled, &english).unwrap()
        );
        Ok(())
    })
}

pub fn ndjson_round_trip() -> Check {
    let strategy = (
        "[a-z]{1,8}/[a-z]{1,8}",
        "[0-9a-f]{7,40}",
        "[A-Za-z0-9.]{1,10}@[a-z]{1,6}\\.org",
        0i64..2_000_000_000,
        "\\PC{0,80}",
        prop::collection::vec("[a-z/._-]{1,20}", 0..5),
        any::<bool>(),
    );
    check(
        256,
        strategy,
        |(repo, hash, author, secs, message, files, is_merge)| {
            let rec = CommitRecord {
                repo_id: repo,
                hash,
                author_id: author.to_lowercase(),
                timestamp: Utc.timestamp_opt(secs, 0).unwrap(),
                message,
                files,
                is_merge,
            };
            let parsed = parse_commit_log(&rec.to_ndjson())
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(parsed.records.len(), 1);
            prop_assert_eq!(&parsed.records[0], &rec);
            Ok(())
        },
    )
}

/// Every property, by name.
pub fn all_properties() -> Vec<Property> {
    vec![
        ("lift symmetry", lift_symmetry),
        (
            "event counts monotone in threshold",
            event_counts_monotone_in_threshold,
        ),
        ("pearson affine invariance", pearson_affine_invariance),
        (
            "twin precision on identical metrics",
            twin_identity_precision,
        ),
        (
            "winsorize idempotent and monotone",
            winsorize_idempotent_and_monotone,
        ),
        (
            "coupling ignores corrective commits",
            coupling_ignores_corrective_commits,
        ),
        ("speed ignores minor authors", speed_ignores_minor_authors),
        (
            "estimate strictly increasing in k",
            estimate_strictly_increasing_in_k,
        ),
        ("estimate round trip", estimate_round_trip),
        ("rate identity exact", rate_identity_exact),
        ("rank monotone", rank_monotone),
        ("selection idempotent", selection_idempotent),
        ("bootstrap deterministic", bootstrap_deterministic),
        (
            "classifier total and deterministic",
            classifier_total_and_deterministic,
        ),
        ("classifier monotone", classifier_monotone),
        ("english rate order invariant", english_rate_order_invariant),
        ("ndjson round trip", ndjson_round_trip),
    ]
}
