mod support;

use std::collections::BTreeSet;

use ccp_core::analytics::{project_year_stats, project_years, StatsOptions};
use ccp_core::classifier::{english_hit_rate, EnglishModel, TermModel};
use ccp_core::estimator::{rank_on_scale, Validity};
use ccp_core::ingestion::{
    group_by_repo, parse_commit_log, parse_raw_git_log, window_by_year, CommitRecord,
};
use ccp_core::{Performance, Table};

fn ndjson(records: &[CommitRecord]) -> String {
    records
        .iter()
        .map(CommitRecord::to_ndjson)
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn ndjson_to_yearly_stats() {
    let mut records = Vec::new();
    for i in 0..400 {
        let msg = if i % 4 == 0 {
            "fix crash in loader"
        } else {
            "add option"
        };
        let author = format!("dev{}@x.org", i % 5);
        records.push(support::commit("acme/app", i, &author, msg, 2));
    }
    let log = parse_commit_log(&ndjson(&records)).unwrap();
    assert!(log.skipped.is_empty());
    assert_eq!(log.records, records);

    let by_repo = group_by_repo(log.records);
    let by_year = window_by_year(by_repo["acme/app"].clone());
    let model = TermModel::default_model();
    let perf = Performance::baseline();
    let s = project_year_stats(
        "acme/app",
        &by_year,
        2019,
        &model,
        &perf,
        &StatsOptions::default(),
        None,
    )
    .unwrap();

    // independent arithmetic: 100 hits of 400
    let expected = (100.0 / 400.0 - 0.042) / (0.84 - 0.042);
    assert_eq!((s.ccp.k, s.ccp.n), (100, 400));
    assert!((s.ccp.ccp_raw - expected).abs() < 1e-12);
    assert_eq!(s.ccp.status, Validity::Valid);
    assert_eq!(s.developers, 5);
    assert_eq!(s.involved_developers, 5);
    assert_eq!(s.speed, Some(80.0));
    assert_eq!(s.coupling, Some(2.0));
    assert_eq!(s.retention, None);
    assert_eq!(
        rank_on_scale(s.ccp.ccp_raw, &Table::bundled()).label(),
        "percentile 30-40"
    );
}

#[test]
fn multi_year_history() {
    let model = TermModel::default_model();
    let perf = Performance::baseline();
    let mut records = Vec::new();
    for (year, authors) in [(2017, ["a", "b", "c"]), (2018, ["a", "b", "d"])] {
        for (j, a) in authors.iter().enumerate() {
            for i in 0..12 {
                let mut c = support::commit("r/x", 0, &format!("{a}@x.org"), "update docs", 1);
                c.hash = format!("{year}-{j}-{i}");
                c.timestamp =
                    chrono::TimeZone::with_ymd_and_hms(&chrono::Utc, year, 6, 1, 0, 0, 0).unwrap();
                records.push(c);
            }
        }
    }
    let by_year = window_by_year(records);
    let years = project_years("r/x", &by_year, &model, &perf, &StatsOptions::default()).unwrap();
    assert_eq!(years.len(), 2);
    // two of three involved developers of 2017 stay
    assert!((years[0].retention.unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(years[0].ccp.status, Validity::BelowZero);
    assert_eq!(years[1].retention, None);
}

#[test]
fn raw_log_matches_ndjson() {
    let raw = "\0aaa\x1f\x1fDev@X.org\x1f2019-04-01T10:00:00+02:00\x1ffix leak\n\nin pool\n\x1e\nsrc/pool.rs\nsrc/lib.rs\n\
               \0bbb\x1faaa ccc\x1fdev@x.org\x1f2019-04-02T10:00:00+00:00\x1fMerge branch 'x'\n\x1e\n";
    let log = parse_raw_git_log(raw, "acme/pool").unwrap();
    assert_eq!(log.records.len(), 2);
    assert_eq!(log.records[0].message, "fix leak\n\nin pool");
    assert_eq!(log.records[0].files, ["src/pool.rs", "src/lib.rs"]);
    assert_eq!(
        log.records[0].timestamp.to_rfc3339(),
        "2019-04-01T08:00:00+00:00"
    );
    assert!(log.records[1].is_merge);
    let again = parse_commit_log(&ndjson(&log.records)).unwrap();
    assert_eq!(again.records, log.records);
}

#[test]
fn non_english_history_is_out_of_domain() {
    let model = TermModel::default_model();
    let english = EnglishModel::default_model();
    let msgs = [
        "исправлена ошибка",
        "новая функция",
        "обновлена документация",
    ];
    let records: Vec<CommitRecord> = (0..60)
        .map(|i| support::commit("ru/x", i, "a@x.ru", msgs[i % 3], 1))
        .collect();
    let e = ccp_core::analytics::project_ccp(&records, &model, &Performance::baseline()).unwrap();
    assert_eq!(e.status, Validity::BelowZero);
    let messages: Vec<&str> = records.iter().map(|c| c.message.as_str()).collect();
    assert_eq!(english_hit_rate(&messages, &english).unwrap(), 0.0);
    let authors: BTreeSet<_> = records.iter().map(|c| c.author_id.clone()).collect();
    assert_eq!(authors.len(), 1);
}
