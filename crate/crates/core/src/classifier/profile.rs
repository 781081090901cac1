use serde::Serialize;

use crate::quantile::sorted_quantile;
use crate::{Error, Result};

/// Median and 90th-percentile message length, in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MessageLengthProfile {
    pub median: usize,
    pub p90: usize,
}

pub fn terse_message_profile<S: AsRef<str>>(messages: &[S]) -> Result<MessageLengthProfile> {
    if messages.is_empty() {
        return Err(Error::EmptyInput("message length profile of an empty list"));
    }
    let mut lengths: Vec<usize> = messages
        .iter()
        .map(|m| m.as_ref().chars().count())
        .collect();
    lengths.sort_unstable();
    Ok(MessageLengthProfile {
        median: sorted_quantile(&lengths, 0.5)?,
        p90: sorted_quantile(&lengths, 0.9)?,
    })
}
