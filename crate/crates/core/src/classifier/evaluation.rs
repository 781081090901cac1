use serde::Serialize;

use super::TermModel;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certainty {
    Certain,
    Uncertain,
}

/// A commit message with a reference label (true = corrective).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabeledCommit {
    pub message: String,
    pub label: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annotator_labels: Option<Vec<bool>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certainty: Option<Certainty>,
}

impl LabeledCommit {
    pub fn new(message: impl Into<String>, label: bool) -> Self {
        Self {
            message: message.into(),
            label,
            annotator_labels: None,
            certainty: None,
        }
    }

    /// Attaches annotator votes; the label must be their strict majority.
    pub fn with_votes(mut self, votes: Vec<bool>) -> Result<Self> {
        let yes = votes.iter().filter(|v| **v).count();
        let no = votes.len() - yes;
        let majority = match yes.cmp(&no) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => {
                return Err(Error::InvalidArgument(format!(
                    "annotator votes {votes:?} have no majority"
                )))
            }
        };
        if majority != self.label {
            return Err(Error::InvalidArgument(format!(
                "label {} disagrees with annotator majority",
                self.label as u8
            )));
        }
        self.annotator_labels = Some(votes);
        Ok(self)
    }
}

/// Hand-labeled reference messages shipped with the crate, in the
/// [`parse_corpus`] format.
pub const GOLD_CORPUS: &str = include_str!("../../data/gold_corpus.tsv");

pub fn gold_corpus() -> Vec<LabeledCommit> {
    parse_corpus(GOLD_CORPUS).expect("bundled gold corpus is valid")
}

/// Parses `label<TAB>message[<TAB>a,b,c]` records, one per line.
///
/// Messages may encode newlines and tabs as `\n` and `\t`.
pub fn parse_corpus(text: &str) -> Result<Vec<LabeledCommit>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        let mut cols = line.splitn(3, '\t');
        let label = parse_label(cols.next().unwrap_or_default().trim())
            .ok_or_else(|| parse_err("label must be 0 or 1".into()))?;
        let message = cols
            .next()
            .ok_or_else(|| parse_err("missing message column".into()))?;
        let mut record = LabeledCommit::new(unescape(message), label);
        if let Some(votes) = cols.next() {
            let votes = votes
                .split(',')
                .map(|v| parse_label(v.trim()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| parse_err("annotator votes must be 0 or 1".into()))?;
            record = record
                .with_votes(votes)
                .map_err(|e| parse_err(e.to_string()))?;
        }
        out.push(record);
    }
    Ok(out)
}

fn parse_label(s: &str) -> Option<bool> {
    match s {
        "1" => Some(true),
        "0" => Some(false),
        _ => None,
    }
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

/// Counts of (label, prediction) pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub fp: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn new(tp: usize, fn_: usize, fp: usize, tn: usize) -> Self {
        Self { tp, fn_, fp, tn }
    }

    pub fn from_pairs<I: IntoIterator<Item = (bool, bool)>>(pairs: I) -> Self {
        let mut cm = Self::default();
        for (label, predicted) in pairs {
            cm.record(label, predicted);
        }
        cm
    }

    pub fn record(&mut self, label: bool, predicted: bool) {
        match (label, predicted) {
            (true, true) => self.tp += 1,
            (true, false) => self.fn_ += 1,
            (false, true) => self.fp += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fn_ + self.fp + self.tn
    }

    pub fn positives(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> usize {
        self.fp + self.tn
    }

    pub fn hits(&self) -> usize {
        self.tp + self.fp
    }

    pub fn accuracy<T: Scalar>(&self) -> Option<T> {
        ratio(self.tp + self.tn, self.total())
    }

    pub fn precision<T: Scalar>(&self) -> Option<T> {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall<T: Scalar>(&self) -> Option<T> {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn fpr<T: Scalar>(&self) -> Option<T> {
        ratio(self.fp, self.fp + self.tn)
    }

    pub fn hit_rate<T: Scalar>(&self) -> Option<T> {
        ratio(self.hits(), self.total())
    }

    pub fn positive_rate<T: Scalar>(&self) -> Option<T> {
        ratio(self.positives(), self.total())
    }

    /// precision / positive_rate - 1
    pub fn precision_lift<T: Scalar>(&self) -> Option<T> {
        let pr: T = self.positive_rate()?;
        if pr == T::zero() {
            return None;
        }
        Some(self.precision::<T>()? / pr - T::one())
    }

    pub fn rates(&self) -> Rates {
        Rates {
            accuracy: self.accuracy(),
            precision: self.precision(),
            recall: self.recall(),
            fpr: self.fpr(),
            hit_rate: self.hit_rate(),
            positive_rate: self.positive_rate(),
            precision_lift: self.precision_lift(),
        }
    }
}

fn ratio<T: Scalar>(num: usize, den: usize) -> Option<T> {
    (den > 0).then(|| T::from_count(num) / T::from_count(den))
}

/// Derived rates; each is absent when its denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rates {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub fpr: Option<f64>,
    pub hit_rate: Option<f64>,
    pub positive_rate: Option<f64>,
    pub precision_lift: Option<f64>,
}

pub fn evaluate_model(corpus: &[LabeledCommit], model: &TermModel) -> Result<ConfusionMatrix> {
    if corpus.is_empty() {
        return Err(Error::EmptyInput(
            "cannot evaluate a model on an empty corpus",
        ));
    }
    Ok(ConfusionMatrix::from_pairs(
        corpus
            .iter()
            .map(|c| (c.label, model.classify(&c.message).corrective)),
    ))
}

/// Cohen's kappa between two annotators.
pub fn annotator_agreement(labels_a: &[bool], labels_b: &[bool]) -> Result<f64> {
    if labels_a.len() != labels_b.len() {
        return Err(Error::InvalidArgument(format!(
            "label vectors differ in length ({} vs {})",
            labels_a.len(),
            labels_b.len()
        )));
    }
    if labels_a.is_empty() {
        return Err(Error::EmptyInput("kappa of empty label vectors"));
    }
    let n = labels_a.len() as f64;
    let agree = labels_a
        .iter()
        .zip(labels_b)
        .filter(|(a, b)| a == b)
        .count() as f64;
    let a_pos = labels_a.iter().filter(|x| **x).count() as f64 / n;
    let b_pos = labels_b.iter().filter(|x| **x).count() as f64 / n;
    let p_o = agree / n;
    let p_e = a_pos * b_pos + (1.0 - a_pos) * (1.0 - b_pos);
    if p_e >= 1.0 {
        return Err(Error::Undefined(
            "kappa with chance agreement 1 (both annotators used a single class)",
        ));
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}
