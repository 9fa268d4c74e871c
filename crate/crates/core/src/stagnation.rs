//! Classification of `(previous, current)` pairs against the global optimum
//! and the two absorbing configurations of elitist search.
//!
//! * Event I: `(prev_1, curr_1) = (0, 1)` and `curr` is not all ones.
//! * Event II: `prev_1 = 1` and `curr = 1^n`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::Error;
use crate::problem::is_global_optimum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OutcomeClass {
    #[serde(rename = "optimum")]
    Optimum,
    #[serde(rename = "event1")]
    EventI,
    #[serde(rename = "event2")]
    EventII,
    #[serde(rename = "running")]
    Running,
    #[serde(rename = "censored")]
    Censored,
}

impl OutcomeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeClass::Optimum => "optimum",
            OutcomeClass::EventI => "event1",
            OutcomeClass::EventII => "event2",
            OutcomeClass::Running => "running",
            OutcomeClass::Censored => "censored",
        }
    }

    pub fn is_event(self) -> bool {
        matches!(self, OutcomeClass::EventI | OutcomeClass::EventII)
    }
}

impl fmt::Display for OutcomeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OutcomeClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "optimum" => OutcomeClass::Optimum,
            "event1" => OutcomeClass::EventI,
            "event2" => OutcomeClass::EventII,
            "running" => OutcomeClass::Running,
            "censored" => OutcomeClass::Censored,
            other => return Err(Error::Parse(format!("unknown outcome {other:?}"))),
        })
    }
}

#[inline]
pub fn detect_event_i_bits(prev_first: bool, curr: &BitString) -> bool {
    !prev_first && curr.first() && !curr.tail_all_ones()
}

#[inline]
pub fn detect_event_ii_bits(prev_first: bool, curr: &BitString) -> bool {
    prev_first && curr.is_all_ones()
}

pub fn detect_event_i(prev: &BitString, curr: &BitString) -> bool {
    assert_eq!(prev.len(), curr.len(), "pair lengths differ");
    detect_event_i_bits(prev.first(), curr)
}

pub fn detect_event_ii(prev: &BitString, curr: &BitString) -> bool {
    assert_eq!(prev.len(), curr.len(), "pair lengths differ");
    detect_event_ii_bits(prev.first(), curr)
}

/// Classification from the previous first bit alone; that is all the
/// classes depend on.
#[inline]
pub fn classify_bits(prev_first: bool, curr: &BitString) -> OutcomeClass {
    if is_global_optimum(prev_first, curr) {
        OutcomeClass::Optimum
    } else if detect_event_i_bits(prev_first, curr) {
        OutcomeClass::EventI
    } else if detect_event_ii_bits(prev_first, curr) {
        OutcomeClass::EventII
    } else {
        OutcomeClass::Running
    }
}

/// Optimum, Event I, Event II, otherwise Running.
pub fn classify(prev: &BitString, curr: &BitString) -> OutcomeClass {
    assert_eq!(prev.len(), curr.len(), "pair lengths differ");
    classify_bits(prev.first(), curr)
}
