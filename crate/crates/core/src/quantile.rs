//! Order statistics with nearest-rank (lower) selection.
//!
//! For a sorted sample `x[0..n]` the `q`-quantile is the element of 1-based
//! rank `ceil(q * n)` (rank 1 when that is zero). No interpolation is
//! performed, so results are always sample members.

use std::cmp::Ordering;

use crate::{Error, Result};

/// Index of the lower nearest-rank quantile in a sorted sample of length `n`.
pub fn lower_rank(n: usize, q: f64) -> usize {
    debug_assert!(n > 0);
    // The nudge keeps products like 0.29 * 100 from landing just above an integer.
    let rank = (q * n as f64 - 1e-9).ceil();
    (rank.max(1.0) as usize).min(n) - 1
}

/// `q`-quantile of an already sorted slice.
pub fn sorted_quantile<T: Copy>(sorted: &[T], q: f64) -> Result<T> {
    check_q(q)?;
    if sorted.is_empty() {
        return Err(Error::EmptyInput("quantile of an empty sample"));
    }
    Ok(sorted[lower_rank(sorted.len(), q)])
}

/// `q`-quantile of an unsorted sample.
pub fn quantile<T: Copy + PartialOrd>(values: &[T], q: f64) -> Result<T> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    sorted_quantile(&sorted, q)
}

fn check_q(q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "quantile {q} outside [0, 1]"
        )))
    }
}
