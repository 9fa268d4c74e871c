//! Time-linkage fitness functions.
//!
//! `OneMax_(0,1^n)` scores the current string by its number of ones and
//! subtracts `n` when the first bit of the previous string is set:
//!
//! ```text
//! f(x^{t-1}, x^t) = |x^t| - n * x^{t-1}_1
//! ```
//!
//! Its unique optimum is `x^t = 1^n` with `x^{t-1}_1 = 0`.

use crate::bits::BitString;

/// Fitness values are integral, so comparisons are exact.
pub type FitnessValue = i64;

/// `|curr| - n * prev_first`.
#[inline]
pub fn onemax01n(prev_first: bool, curr: &BitString) -> FitnessValue {
    let n = curr.len() as FitnessValue;
    curr.ones_count() as FitnessValue - n * FitnessValue::from(prev_first)
}

/// Plain OneMax, `|curr|`.
#[inline]
pub fn onemax(curr: &BitString) -> FitnessValue {
    curr.ones_count() as FitnessValue
}

/// True iff `onemax01n(prev_first, curr) == n`.
#[inline]
pub fn is_global_optimum(prev_first: bool, curr: &BitString) -> bool {
    !prev_first && curr.is_all_ones()
}

/// A fitness that depends on the current solution and a window of
/// immediately preceding solutions (oldest first).
pub trait TimeLinkageFitness {
    /// Number of historical solutions the function reads.
    fn history_window(&self) -> usize;

    /// Must be pure. `history.len()` equals [`Self::history_window`].
    fn evaluate(&self, history: &[BitString], curr: &BitString) -> FitnessValue;
}

/// `OneMax_(0,1^n)` as a window-1 time-linkage function.
#[derive(Clone, Copy, Debug, Default)]
pub struct OneMax01n;

impl TimeLinkageFitness for OneMax01n {
    fn history_window(&self) -> usize {
        1
    }

    fn evaluate(&self, history: &[BitString], curr: &BitString) -> FitnessValue {
        let prev = history
            .last()
            .expect("OneMax_(0,1^n) needs the previous solution");
        onemax01n(prev.first(), curr)
    }
}
