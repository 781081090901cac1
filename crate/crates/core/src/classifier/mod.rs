//! Pattern-based corrective-commit classifier.
//!
//! A [`TermModel`] holds three pattern lists. A message scores one point per
//! distinct `fix` pattern it matches and loses one per distinct `other_fix`
//! or `negation` pattern. Positive scores are corrective.
//!
//! The lists overlap on purpose: "fixed indentation" matches a `fix` pattern
//! and an `other_fix` pattern, so the two cancel.

mod english;
mod evaluation;
mod profile;

pub use english::{english_hit_rate, EnglishModel};
pub use evaluation::{
    annotator_agreement, evaluate_model, gold_corpus, parse_corpus, Certainty, ConfusionMatrix,
    LabeledCommit, Rates, GOLD_CORPUS,
};
pub use profile::{terse_message_profile, MessageLengthProfile};

use std::fmt;
use std::path::Path;

use regex::{RegexSet, RegexSetBuilder};
use serde::Serialize;

use crate::ingestion::CommitRecord;
use crate::{Error, Result};

const DEFAULT_MODEL: &str = include_str!("../../data/default_model.txt");

/// Which of the three pattern lists a pattern belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternList {
    Fix,
    OtherFix,
    Negation,
}

impl PatternList {
    pub const ALL: [PatternList; 3] = [
        PatternList::Fix,
        PatternList::OtherFix,
        PatternList::Negation,
    ];

    pub fn section(self) -> &'static str {
        match self {
            PatternList::Fix => "fix",
            PatternList::OtherFix => "other_fix",
            PatternList::Negation => "negation",
        }
    }

    fn from_section(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.section() == name)
    }
}

#[derive(Debug, Clone)]
struct CompiledList {
    sources: Vec<String>,
    set: RegexSet,
}

impl CompiledList {
    fn compile(list: PatternList, sources: Vec<String>) -> Result<Self> {
        // Compile one by one first so the error names the offending pattern.
        for p in &sources {
            regex::RegexBuilder::new(p)
                .case_insensitive(true)
                .build()
                .map_err(|source| Error::Pattern {
                    section: list.section().to_string(),
                    pattern: p.clone(),
                    source,
                })?;
        }
        let set = RegexSetBuilder::new(&sources)
            .case_insensitive(true)
            .build()
            .map_err(|e| Error::Model(format!("[{}]: {e}", list.section())))?;
        Ok(Self { sources, set })
    }

    fn hits(&self, message: &str) -> usize {
        if self.sources.is_empty() {
            return 0;
        }
        self.set.matches(message).iter().count()
    }

    fn matched(&self, message: &str) -> Vec<&str> {
        self.set
            .matches(message)
            .iter()
            .map(|i| self.sources[i].as_str())
            .collect()
    }
}

/// Versioned set of classifier patterns. Immutable once loaded.
#[derive(Debug, Clone)]
pub struct TermModel {
    model_id: String,
    fix: CompiledList,
    other_fix: CompiledList,
    negation: CompiledList,
}

impl TermModel {
    /// Builds a model from raw pattern lists. Every pattern must compile and
    /// the fix list must be non-empty.
    pub fn new(
        model_id: impl Into<String>,
        fix: Vec<String>,
        other_fix: Vec<String>,
        negation: Vec<String>,
    ) -> Result<Self> {
        let model_id = model_id.into();
        if model_id.trim().is_empty() {
            return Err(Error::Model("empty model_id".into()));
        }
        if fix.is_empty() {
            return Err(Error::Model("the [fix] list is empty".into()));
        }
        Ok(Self {
            model_id,
            fix: CompiledList::compile(PatternList::Fix, fix)?,
            other_fix: CompiledList::compile(PatternList::OtherFix, other_fix)?,
            negation: CompiledList::compile(PatternList::Negation, negation)?,
        })
    }

    /// The model shipped with the crate.
    pub fn default_model() -> Self {
        Self::parse(DEFAULT_MODEL).expect("bundled term model is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses the line-oriented model format.
    ///
    /// ```text
    /// model_id: my-model-3
    /// [fix]
    /// \bbugs?\b
    /// [other_fix]
    /// \berror messages?\b
    /// [negation]
    /// \bnot an? error\b
    /// ```
    ///
    /// Lines starting with `#` are comments. A missing `model_id:` header is
    /// replaced by a content digest, so the id still tracks list changes.
    pub fn parse(text: &str) -> Result<Self> {
        let mut model_id: Option<String> = None;
        let mut current: Option<PatternList> = None;
        let mut lists: [Vec<String>; 3] = Default::default();

        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(id) = line.strip_prefix("model_id:") {
                if current.is_some() {
                    return Err(Error::Model(format!(
                        "line {}: model_id must precede the first section",
                        idx + 1
                    )));
                }
                model_id = Some(id.trim().to_string());
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                let name = &line[1..line.len() - 1];
                current = Some(PatternList::from_section(name).ok_or_else(|| {
                    Error::Model(format!("line {}: unknown section [{name}]", idx + 1))
                })?);
                continue;
            }
            match current {
                Some(list) => lists[list as usize].push(line.to_string()),
                None => {
                    return Err(Error::Model(format!(
                        "line {}: pattern outside of a section",
                        idx + 1
                    )))
                }
            }
        }

        let [fix, other_fix, negation] = lists;
        let model_id = match model_id {
            Some(id) => id,
            None => format!(
                "content-{:016x}",
                content_digest(&fix, &other_fix, &negation)
            ),
        };
        Self::new(model_id, fix, other_fix, negation)
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn patterns(&self, list: PatternList) -> &[String] {
        &self.list(list).sources
    }

    fn list(&self, list: PatternList) -> &CompiledList {
        match list {
            PatternList::Fix => &self.fix,
            PatternList::OtherFix => &self.other_fix,
            PatternList::Negation => &self.negation,
        }
    }

    /// Scores one message.
    pub fn classify(&self, message: &str) -> ClassifierVerdict {
        ClassifierVerdict::from_hits(
            self.fix.hits(message),
            self.other_fix.hits(message),
            self.negation.hits(message),
        )
    }

    /// The patterns of each list that matched `message`.
    pub fn matched_patterns<'a>(&'a self, message: &str) -> MatchedPatterns<'a> {
        MatchedPatterns {
            fix: self.fix.matched(message),
            other_fix: self.other_fix.matched(message),
            negation: self.negation.matched(message),
        }
    }
}

impl Default for TermModel {
    fn default() -> Self {
        Self::default_model()
    }
}

// FNV-1a over the section-tagged pattern text.
fn content_digest(fix: &[String], other: &[String], neg: &[String]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for (tag, list) in [("fix", fix), ("other_fix", other), ("negation", neg)] {
        for byte in tag.bytes().chain(std::iter::once(0)) {
            h = (h ^ byte as u64).wrapping_mul(0x0100_0000_01b3);
        }
        for p in list {
            for byte in p.bytes().chain(std::iter::once(b'\n')) {
                h = (h ^ byte as u64).wrapping_mul(0x0100_0000_01b3);
            }
        }
    }
    h
}

/// Outcome of scoring a single message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassifierVerdict {
    pub fix_hits: usize,
    pub other_fix_hits: usize,
    pub negation_hits: usize,
    pub score: i64,
    pub corrective: bool,
}

impl ClassifierVerdict {
    pub fn from_hits(fix_hits: usize, other_fix_hits: usize, negation_hits: usize) -> Self {
        let score = fix_hits as i64 - other_fix_hits as i64 - negation_hits as i64;
        Self {
            fix_hits,
            other_fix_hits,
            negation_hits,
            score,
            corrective: score > 0,
        }
    }
}

impl fmt::Display for ClassifierVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (score {} = {} - {} - {})",
            if self.corrective {
                "corrective"
            } else {
                "other"
            },
            self.score,
            self.fix_hits,
            self.other_fix_hits,
            self.negation_hits
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchedPatterns<'a> {
    pub fix: Vec<&'a str>,
    pub other_fix: Vec<&'a str>,
    pub negation: Vec<&'a str>,
}

pub fn classify_message(message: &str, model: &TermModel) -> ClassifierVerdict {
    model.classify(message)
}

/// Lazily classifies a commit stream, preserving order.
pub fn classify_commits<'m, I>(
    commits: I,
    model: &'m TermModel,
) -> impl Iterator<Item = (CommitRecord, ClassifierVerdict)> + 'm
where
    I: IntoIterator<Item = CommitRecord>,
    I::IntoIter: 'm,
{
    commits.into_iter().map(move |c| {
        let v = model.classify(&c.message);
        (c, v)
    })
}
