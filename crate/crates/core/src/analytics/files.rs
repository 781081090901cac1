use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::winsorize::{mean, Cap};
use crate::{Error, Result};

/// Extensions of general-purpose programming languages considered when
/// looking for a dominant language.
pub const LANGUAGE_EXTENSIONS: &[&str] = &[
    "c", "cc", "clj", "cpp", "cs", "cxx", "dart", "erl", "ex", "exs", "go", "groovy", "h", "hpp",
    "hs", "java", "jl", "js", "jsx", "kt", "lua", "m", "ml", "php", "pl", "py", "r", "rb", "rs",
    "scala", "sh", "swift", "ts", "tsx", "vb",
];

/// Share of files an extension must exceed to be dominant.
pub const DOMINANCE_SHARE: f64 = 0.8;

/// One file of a HEAD snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadEntry {
    pub path: String,
    pub size_bytes: u64,
}

impl HeadEntry {
    pub fn new(path: impl Into<String>, size_bytes: u64) -> Self {
        Self {
            path: path.into(),
            size_bytes,
        }
    }

    /// Lowercased extension of the file name, if any.
    pub fn extension(&self) -> Option<String> {
        let name = self.path.rsplit('/').next().unwrap_or(&self.path);
        let (stem, ext) = name.rsplit_once('.')?;
        (!stem.is_empty() && !ext.is_empty()).then(|| ext.to_lowercase())
    }
}

/// Parses the CSV listing `path,size_bytes`.
pub fn parse_head_listing(text: &str) -> Result<Vec<HeadEntry>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    reader
        .deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Parse {
                line: i + 2,
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FileLengthStats {
    pub files: usize,
    /// Mean capped size, in KiB.
    pub mean_kb: f64,
    pub cap_bytes: Option<f64>,
}

pub fn file_length_stats(listing: &[HeadEntry], cap: Cap) -> Result<FileLengthStats> {
    if listing.is_empty() {
        return Err(Error::EmptyInput(
            "file length statistics of an empty listing",
        ));
    }
    let sizes: Vec<f64> = listing.iter().map(|e| e.size_bytes as f64).collect();
    let cap_bytes = cap.threshold(&sizes)?;
    let capped = cap.apply(&sizes)?;
    Ok(FileLengthStats {
        files: listing.len(),
        mean_kb: mean(&capped).expect("non-empty") / 1024.0,
        cap_bytes,
    })
}

/// The language extension held by more than 80% of all files.
pub fn dominant_language(listing: &[HeadEntry]) -> Result<Option<String>> {
    if listing.is_empty() {
        return Err(Error::EmptyInput("dominant language of an empty listing"));
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for ext in listing.iter().filter_map(HeadEntry::extension) {
        *counts.entry(ext).or_default() += 1;
    }
    let total = listing.len();
    Ok(counts
        .into_iter()
        .filter(|(ext, _)| LANGUAGE_EXTENSIONS.contains(&ext.as_str()))
        // strictly above 4/5, in integers
        .find(|&(_, n)| n * 5 > total * 4)
        .map(|(ext, _)| ext))
}
