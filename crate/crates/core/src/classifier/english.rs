use std::collections::BTreeSet;
use std::path::Path;

use crate::{Error, Result};

const DEFAULT_WORDS: &str = include_str!("../../data/english_words.txt");

/// Frequent English words, used to flag histories that are probably not
/// written in English.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnglishModel {
    words: BTreeSet<String>,
}

impl EnglishModel {
    pub fn new<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = BTreeSet::new();
        for w in words {
            let w = w.as_ref().trim().to_lowercase();
            if w.chars().count() < 3 {
                return Err(Error::Model(format!(
                    "english word {w:?} is shorter than three letters"
                )));
            }
            set.insert(w);
        }
        if set.is_empty() {
            return Err(Error::Model("english model has no words".into()));
        }
        Ok(Self { words: set })
    }

    /// One word per line; blank lines and `#` comments ignored.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn default_model() -> Self {
        Self::parse(DEFAULT_WORDS).expect("bundled english model is valid")
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    /// True when any whole token of `message` is a model word.
    pub fn is_english(&self, message: &str) -> bool {
        message
            .split(|c: char| !c.is_alphanumeric() && c != '\'')
            .filter(|t| !t.is_empty())
            .any(|t| self.words.contains(&t.to_lowercase()))
    }
}

impl Default for EnglishModel {
    fn default() -> Self {
        Self::default_model()
    }
}

/// Fraction of messages containing at least one model word.
pub fn english_hit_rate<S: AsRef<str>>(messages: &[S], model: &EnglishModel) -> Result<f64> {
    if messages.is_empty() {
        return Err(Error::Undefined(
            "english hit rate of an empty message list",
        ));
    }
    let hits = messages
        .iter()
        .filter(|m| model.is_english(m.as_ref()))
        .count();
    Ok(hits as f64 / messages.len() as f64)
}
