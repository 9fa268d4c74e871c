use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algorithms::AlgorithmId;
use crate::error::Error;
use crate::stagnation::OutcomeClass;

use super::experiment::RunRecord;

/// Per-cell aggregate. Quantiles are over the evaluations of successful runs
/// only and are absent when no run succeeded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algo: AlgorithmId,
    pub n: usize,
    #[serde(with = "super::csv_io::float_text")]
    pub param: f64,
    pub runs: usize,
    pub successes: usize,
    pub event1: usize,
    pub event2: usize,
    pub censored: usize,
    pub median_evals: Option<f64>,
    pub q1_evals: Option<f64>,
    pub q3_evals: Option<f64>,
}

impl SummaryRow {
    pub fn has_quantiles(&self) -> bool {
        self.median_evals.is_some() && self.q1_evals.is_some() && self.q3_evals.is_some()
    }
}

/// Quantile of sorted data with linear interpolation between closest ranks
/// (the "type 7" rule: position `(len - 1) * p`).
pub fn quantile(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() || !(0.0..=1.0).contains(&p) {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

#[derive(Clone, Copy, PartialEq)]
struct CellKey(AlgorithmId, usize, f64);

impl Eq for CellKey {}

impl PartialOrd for CellKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CellKey {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.0, self.1)
            .cmp(&(other.0, other.1))
            .then(self.2.total_cmp(&other.2))
    }
}

/// Aggregates records into one row per `(algorithm, n, parameter)` cell,
/// ordered by those keys. The result does not depend on record order.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<SummaryRow>, Error> {
    if records.is_empty() {
        return Err(Error::EmptyCell("no records to summarize".into()));
    }
    let mut cells: BTreeMap<CellKey, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        cells
            .entry(CellKey(r.algo, r.n, r.param))
            .or_default()
            .push(r);
    }
    cells
        .into_iter()
        .map(|(CellKey(algo, n, param), rows)| {
            let count = |c: OutcomeClass| rows.iter().filter(|r| r.outcome == c).count();
            if let Some(r) = rows.iter().find(|r| r.outcome == OutcomeClass::Running) {
                return Err(Error::Parse(format!(
                    "record {algo} n={n} run {} has unfinished outcome `running`",
                    r.run
                )));
            }
            let mut evals: Vec<f64> = rows
                .iter()
                .filter(|r| r.outcome == OutcomeClass::Optimum)
                .map(|r| r.evaluations as f64)
                .collect();
            evals.sort_by(f64::total_cmp);
            Ok(SummaryRow {
                algo,
                n,
                param,
                runs: rows.len(),
                successes: count(OutcomeClass::Optimum),
                event1: count(OutcomeClass::EventI),
                event2: count(OutcomeClass::EventII),
                censored: count(OutcomeClass::Censored),
                median_evals: quantile(&evals, 0.5),
                q1_evals: quantile(&evals, 0.25),
                q3_evals: quantile(&evals, 0.75),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(
        algo: AlgorithmId,
        n: usize,
        run: usize,
        outcome: OutcomeClass,
        evals: u64,
    ) -> RunRecord {
        RunRecord {
            algo,
            n,
            param: 3.0,
            run,
            seed: run as u64 * 7,
            outcome,
            evaluations: evals,
            generations: evals / 3,
            first_event1_gen: None,
            first_event2_gen: None,
        }
    }

    #[test]
    fn type7_quantiles() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&xs, 0.5), Some(2.5));
        assert_eq!(quantile(&xs, 0.25), Some(1.75));
        assert_eq!(quantile(&xs, 0.75), Some(3.25));
        assert_eq!(quantile(&[5.0], 0.25), Some(5.0));
        assert_eq!(quantile(&[], 0.5), None);
    }

    #[test]
    fn single_run_cell() {
        let rows =
            summarize(&[record(AlgorithmId::Ocl, 10, 0, OutcomeClass::Optimum, 77)]).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!(
            (r.median_evals, r.q1_evals, r.q3_evals),
            (Some(77.0), Some(77.0), Some(77.0))
        );
    }

    #[test]
    fn median_of_four() {
        let records: Vec<_> = (1..=4)
            .map(|e| record(AlgorithmId::Cga, 10, e as usize, OutcomeClass::Optimum, e))
            .collect();
        assert_eq!(summarize(&records).unwrap()[0].median_evals, Some(2.5));
    }

    #[test]
    fn failures_have_no_quantiles_and_counts_are_conserved() {
        let records = vec![
            record(AlgorithmId::Opl, 20, 0, OutcomeClass::EventI, 5),
            record(AlgorithmId::Opl, 20, 1, OutcomeClass::EventII, 50),
            record(AlgorithmId::Opl, 20, 2, OutcomeClass::EventI, 9),
            record(AlgorithmId::Opl, 20, 3, OutcomeClass::Censored, 90),
        ];
        let r = &summarize(&records).unwrap()[0];
        assert_eq!((r.successes, r.event1, r.event2, r.censored), (0, 2, 1, 1));
        assert_eq!(r.successes + r.event1 + r.event2 + r.censored, r.runs);
        assert!(!r.has_quantiles());
    }

    #[test]
    fn order_independent() {
        let mut records = vec![
            record(AlgorithmId::Ocl, 10, 0, OutcomeClass::Optimum, 30),
            record(AlgorithmId::Ocl, 10, 1, OutcomeClass::Optimum, 10),
            record(AlgorithmId::Cga, 10, 0, OutcomeClass::Optimum, 20),
            record(AlgorithmId::Ocl, 30, 0, OutcomeClass::Optimum, 300),
        ];
        let a = summarize(&records).unwrap();
        records.reverse();
        assert_eq!(a, summarize(&records).unwrap());
        assert_eq!(a.len(), 3);
        assert_eq!((a[0].algo, a[0].n), (AlgorithmId::Ocl, 10));
        assert_eq!((a[2].algo, a[2].n), (AlgorithmId::Cga, 10));
    }

    #[test]
    fn empty_input_and_running_records_rejected() {
        assert!(matches!(summarize(&[]), Err(Error::EmptyCell(_))));
        assert!(summarize(&[record(AlgorithmId::Ocl, 4, 0, OutcomeClass::Running, 1)]).is_err());
    }
}
