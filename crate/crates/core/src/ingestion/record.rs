use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One commit of one repository.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitRecord {
    pub repo_id: String,
    pub hash: String,
    /// Lowercased author email.
    pub author_id: String,
    pub timestamp: DateTime<Utc>,
    /// Subject and body.
    pub message: String,
    pub files: Vec<String>,
    pub is_merge: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireCommit {
    repo: String,
    hash: String,
    author: String,
    ts: String,
    msg: String,
    #[serde(default)]
    files: Vec<String>,
    #[serde(default)]
    merge: bool,
}

impl CommitRecord {
    /// Serializes to one line of the NDJSON export format.
    pub fn to_ndjson(&self) -> String {
        let wire = WireCommit {
            repo: self.repo_id.clone(),
            hash: self.hash.clone(),
            author: self.author_id.clone(),
            ts: self.timestamp.to_rfc3339_opts(SecondsFormat::AutoSi, true),
            msg: self.message.clone(),
            files: self.files.clone(),
            merge: self.is_merge,
        };
        serde_json::to_string(&wire).expect("commit serializes")
    }

    fn from_wire(w: WireCommit) -> std::result::Result<Self, String> {
        if w.hash.trim().is_empty() {
            return Err("empty hash".into());
        }
        if w.repo.trim().is_empty() {
            return Err("empty repo".into());
        }
        let timestamp = DateTime::parse_from_rfc3339(w.ts.trim())
            .map_err(|e| format!("bad timestamp {:?}: {e}", w.ts))?
            .with_timezone(&Utc);
        Ok(Self {
            repo_id: w.repo,
            hash: w.hash,
            author_id: w.author.trim().to_lowercase(),
            timestamp,
            message: w.msg,
            files: w.files,
            is_merge: w.merge,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedRecord {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedLog {
    pub records: Vec<CommitRecord>,
    pub skipped: Vec<SkippedRecord>,
}

/// Parses the NDJSON commit export.
///
/// Malformed lines and repeated `(repo, hash)` pairs are skipped and listed
/// in [`ParsedLog::skipped`]. Input with no usable record is an error.
pub fn parse_commit_log(text: &str) -> Result<ParsedLog> {
    let mut seen = std::collections::HashSet::new();
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<WireCommit>(line)
            .map_err(|e| e.to_string())
            .and_then(CommitRecord::from_wire);
        match parsed {
            Ok(rec) => {
                if seen.insert((rec.repo_id.clone(), rec.hash.clone())) {
                    records.push(rec);
                } else {
                    skipped.push(SkippedRecord {
                        line: idx + 1,
                        reason: format!("duplicate hash {}", rec.hash),
                    });
                }
            }
            Err(reason) => skipped.push(SkippedRecord {
                line: idx + 1,
                reason,
            }),
        }
    }
    if records.is_empty() {
        return Err(Error::EmptyInput("commit log contains no parseable record"));
    }
    Ok(ParsedLog { records, skipped })
}

/// `git log` invocation whose output [`parse_raw_git_log`] reads.
///
/// Each commit starts with a NUL byte; header fields are separated by the
/// unit separator (0x1f) and the message is closed by the record separator
/// (0x1e), followed by the changed paths one per line.
pub const GIT_LOG_RECIPE: &str =
    "git log --no-renames --name-only --format='%x00%H%x1f%P%x1f%ae%x1f%aI%x1f%B%x1e'";

/// Parses output of [`GIT_LOG_RECIPE`] for repository `repo_id`.
pub fn parse_raw_git_log(text: &str, repo_id: &str) -> Result<ParsedLog> {
    let mut seen = std::collections::HashSet::new();
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (idx, chunk) in text.split('\0').skip(1).enumerate() {
        let entry = idx + 1;
        let parsed = (|| -> std::result::Result<CommitRecord, String> {
            let (header, rest) = chunk
                .split_once('\x1e')
                .ok_or("missing message terminator")?;
            let fields: Vec<&str> = header.splitn(5, '\x1f').collect();
            let [hash, parents, author, ts, msg] = fields[..] else {
                return Err(format!("expected 5 header fields, found {}", fields.len()));
            };
            let files = rest
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect();
            CommitRecord::from_wire(WireCommit {
                repo: repo_id.to_string(),
                hash: hash.trim().to_string(),
                author: author.to_string(),
                ts: ts.to_string(),
                msg: msg.trim_end_matches('\n').to_string(),
                files,
                merge: parents.split_whitespace().count() > 1,
            })
        })();
        match parsed {
            Ok(rec) if seen.insert(rec.hash.clone()) => records.push(rec),
            Ok(rec) => skipped.push(SkippedRecord {
                line: entry,
                reason: format!("duplicate hash {}", rec.hash),
            }),
            Err(reason) => skipped.push(SkippedRecord {
                line: entry,
                reason,
            }),
        }
    }
    if records.is_empty() {
        return Err(Error::EmptyInput("git log contains no parseable commit"));
    }
    Ok(ParsedLog { records, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: &str = r#"{"repo":"acme/app","hash":"a1","author":"Dev@Example.COM","ts":"2019-03-04T05:06:07Z","msg":"fix crash\n\nbody","files":["src/a.rs","src/b.rs"],"merge":false}"#;

    #[test]
    fn single_record() {
        let log = parse_commit_log(ONE).unwrap();
        assert!(log.skipped.is_empty());
        let c = &log.records[0];
        assert_eq!(c.repo_id, "acme/app");
        assert_eq!(c.hash, "a1");
        assert_eq!(c.author_id, "dev@example.com");
        assert_eq!(c.timestamp.to_rfc3339(), "2019-03-04T05:06:07+00:00");
        assert_eq!(c.message, "fix crash\n\nbody");
        assert_eq!(c.files, vec!["src/a.rs", "src/b.rs"]);
        assert!(!c.is_merge);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(parse_commit_log("").is_err());
        assert!(parse_commit_log("\n\n").is_err());
        assert!(parse_commit_log("not json").is_err());
    }

    #[test]
    fn five_with_one_malformed() {
        let mut lines = Vec::new();
        for i in 0..4 {
            lines.push(ONE.replace("\"a1\"", &format!("\"h{i}\"")));
        }
        lines.insert(
            2,
            r#"{"repo":"acme/app","hash":"bad","author":"x","ts":"yesterday","msg":""}"#.into(),
        );
        let log = parse_commit_log(&lines.join("\n")).unwrap();
        assert_eq!(log.records.len(), 4);
        assert_eq!(log.skipped.len(), 1);
        assert_eq!(log.skipped[0].line, 3);
    }

    #[test]
    fn duplicates_are_skipped() {
        let log = parse_commit_log(&format!("{ONE}\n{ONE}\n")).unwrap();
        assert_eq!(log.records.len(), 1);
        assert_eq!(log.skipped.len(), 1);
    }

    #[test]
    fn offsets_normalize_to_utc() {
        let line = ONE.replace("2019-03-04T05:06:07Z", "2019-01-01T01:30:00+02:00");
        let c = &parse_commit_log(&line).unwrap().records[0];
        assert_eq!(c.timestamp.to_rfc3339(), "2018-12-31T23:30:00+00:00");
    }

    #[test]
    fn ndjson_round_trip() {
        let first = parse_commit_log(ONE).unwrap().records;
        let again = parse_commit_log(&first[0].to_ndjson()).unwrap().records;
        assert_eq!(first, again);
    }

    #[test]
    fn raw_git_log() {
        let raw = "\0abc\x1fp1\x1fA@B.org\x1f2019-05-01T10:00:00+02:00\x1ffix bug\n\nmore\n\x1e\n\nsrc/x.c\nREADME\n\
                   \0def\x1fp1 p2\x1fa@b.org\x1f2019-05-02T10:00:00Z\x1fMerge branch 'x'\n\x1e\n\
                   \0broken";
        let log = parse_raw_git_log(raw, "local").unwrap();
        assert_eq!(log.records.len(), 2);
        assert_eq!(log.skipped.len(), 1);
        let a = &log.records[0];
        assert_eq!(a.message, "fix bug\n\nmore");
        assert_eq!(a.files, vec!["src/x.c", "README"]);
        assert_eq!(a.author_id, "a@b.org");
        assert!(log.records[1].is_merge);
        assert!(log.records[1].files.is_empty());
    }
}
