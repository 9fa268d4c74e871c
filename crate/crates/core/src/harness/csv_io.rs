//! Records and summary CSV files.
//!
//! Records: `algo,n,param,run,seed,outcome,evaluations,generations,first_event1_gen,first_event2_gen`.
//! Summary: `algo,n,param,runs,successes,event1,event2,censored,median_evals,q1_evals,q3_evals`.
//! Missing values are empty fields.

use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::Error;

use super::experiment::RunRecord;
use super::summary::SummaryRow;

pub const RECORDS_HEADER: [&str; 10] = [
    "algo",
    "n",
    "param",
    "run",
    "seed",
    "outcome",
    "evaluations",
    "generations",
    "first_event1_gen",
    "first_event2_gen",
];

pub const SUMMARY_HEADER: [&str; 11] = [
    "algo",
    "n",
    "param",
    "runs",
    "successes",
    "event1",
    "event2",
    "censored",
    "median_evals",
    "q1_evals",
    "q3_evals",
];

/// Serializes a float with `Display`, so `14.0` is written as `14`.
pub(crate) mod float_text {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(value)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

fn write_rows<T: Serialize, W: Write>(rows: &[T], header: &[&str], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    // Written by hand so that an empty list still gets a header.
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<T: DeserializeOwned, R: Read>(
    input: R,
    header: &[&str],
) -> csv::Result<Result<Vec<T>, String>> {
    let mut r = csv::Reader::from_reader(input);
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Ok(Err(format!(
            "unexpected header {:?}, expected {:?}",
            found.join(","),
            header.join(",")
        )));
    }
    Ok(Ok(r.deserialize().collect::<csv::Result<Vec<T>>>()?))
}

pub fn write_records<W: Write>(records: &[RunRecord], out: W) -> csv::Result<()> {
    write_rows(records, &RECORDS_HEADER, out)
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> csv::Result<()> {
    write_rows(rows, &SUMMARY_HEADER, out)
}

/// Row types with a fixed CSV layout.
pub trait CsvRow: Serialize {
    const HEADER: &'static [&'static str];
}

impl CsvRow for RunRecord {
    const HEADER: &'static [&'static str] = &RECORDS_HEADER;
}

impl CsvRow for SummaryRow {
    const HEADER: &'static [&'static str] = &SUMMARY_HEADER;
}

/// Writes records or summary rows, header first, in the given order.
pub fn emit_csv<T: CsvRow>(rows: &[T], path: &Path) -> Result<(), Error> {
    write_rows(rows, T::HEADER, create(path)?).map_err(|e| Error::csv(path, e))
}

fn create(path: &Path) -> Result<std::fs::File, Error> {
    std::fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<std::fs::File, Error> {
    std::fs::File::open(path).map_err(|e| Error::io(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, Error> {
    read_rows(open(path)?, &RECORDS_HEADER)
        .map_err(|e| Error::csv(path, e))?
        .map_err(|msg| Error::Parse(format!("{}: {msg}", path.display())))
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>, Error> {
    read_rows(open(path)?, &SUMMARY_HEADER)
        .map_err(|e| Error::csv(path, e))?
        .map_err(|msg| Error::Parse(format!("{}: {msg}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::AlgorithmId;
    use crate::harness::summary::summarize;
    use crate::stagnation::OutcomeClass;

    fn records() -> Vec<RunRecord> {
        vec![
            RunRecord {
                algo: AlgorithmId::Opl,
                n: 500,
                param: 14.0,
                run: 0,
                seed: 12_345_678_901_234,
                outcome: OutcomeClass::EventII,
                evaluations: 4201,
                generations: 300,
                first_event1_gen: None,
                first_event2_gen: Some(300),
            },
            RunRecord {
                algo: AlgorithmId::Metropolis,
                n: 20,
                param: 0.75,
                run: 3,
                seed: u64::MAX,
                outcome: OutcomeClass::Censored,
                evaluations: 1_000_000,
                generations: 999_999,
                first_event1_gen: Some(1),
                first_event2_gen: None,
            },
        ]
    }

    #[test]
    fn records_layout() {
        let mut buf = Vec::new();
        write_records(&records(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], RECORDS_HEADER.join(","));
        assert_eq!(lines[1], "opl,500,14,0,12345678901234,event2,4201,300,,300");
        assert_eq!(
            lines[2],
            "metropolis,20,0.75,3,18446744073709551615,censored,1000000,999999,1,"
        );
    }

    #[test]
    fn empty_records_give_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        emit_csv::<RunRecord>(&[], &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            format!("{}\n", RECORDS_HEADER.join(","))
        );
        assert!(read_records(&path).unwrap().is_empty());
    }

    #[test]
    fn round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        emit_csv(&records(), &path).unwrap();
        assert_eq!(read_records(&path).unwrap(), records());

        let summary = summarize(&records()).unwrap();
        let spath = dir.path().join("s.csv");
        emit_csv(&summary, &spath).unwrap();
        assert_eq!(read_summary(&spath).unwrap(), summary);
        let text = std::fs::read_to_string(&spath).unwrap();
        assert!(text.starts_with(&SUMMARY_HEADER.join(",")));
    }

    #[test]
    fn io_errors_carry_the_path() {
        let err = read_records(Path::new("/nonexistent/dir/r.csv")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("/nonexistent/dir/r.csv"));
        let err = emit_csv(&records(), Path::new("/nonexistent/dir/r.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/r.csv"));
    }

    #[test]
    fn wrong_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        emit_csv(&summarize(&records()).unwrap(), &path).unwrap();
        assert!(matches!(read_records(&path), Err(Error::Parse(_))));
    }
}
