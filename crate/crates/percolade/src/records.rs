//! Run records (JSON), per-trial results (CSV), experiment reports (JSON) and
//! sweep tables (CSV).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use percolade_core::dfs::RUN_FORMAT;
use percolade_core::trial::ExperimentReport;
use percolade_core::{DfsRun, TrialResult};
use serde::{Deserialize, Serialize};

use crate::edgelist::FormatError;
use crate::harness::SweepRow;

pub fn write_run<W: Write>(run: &DfsRun, mut w: W) -> Result<(), FormatError> {
    serde_json::to_writer_pretty(&mut w, run)?;
    writeln!(w).and_then(|_| w.flush()).map_err(serde_json::Error::io)?;
    Ok(())
}

/// Reads a run record, refusing any layout other than the current one.
pub fn read_run<R: Read>(r: R) -> Result<DfsRun, FormatError> {
    let value: serde_json::Value = serde_json::from_reader(BufReader::new(r))?;
    match value.get("format") {
        Some(f) if f.as_u64() == Some(u64::from(RUN_FORMAT)) => Ok(serde_json::from_value(value)?),
        found => Err(FormatError::Schema {
            found: found.map_or_else(|| "<missing>".to_string(), |f| f.to_string()),
            expected: RUN_FORMAT,
        }),
    }
}

pub fn save_run(run: &DfsRun, path: &Path) -> Result<(), FormatError> {
    let file = File::create(path).map_err(|e| FormatError::io(path, e))?;
    write_run(run, BufWriter::new(file))
}

pub fn load_run(path: &Path) -> Result<DfsRun, FormatError> {
    let file = File::open(path).map_err(|e| FormatError::io(path, e))?;
    read_run(file)
}

/// One line of the results table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRow {
    pub trial: u64,
    pub seed: u64,
    pub cycle_found: bool,
    pub cycle_len: usize,
    pub long_edges: usize,
    pub bad_blocks: usize,
    pub failed: bool,
    pub millis: u64,
}

impl From<&TrialResult> for ResultRow {
    fn from(r: &TrialResult) -> Self {
        ResultRow {
            trial: r.trial,
            seed: r.seed,
            cycle_found: r.cycle_found,
            cycle_len: r.cycle_len,
            long_edges: r.long_edges,
            bad_blocks: r.bad_blocks,
            failed: r.failed,
            millis: r.millis,
        }
    }
}

pub const RESULTS_HEADER: &str = "trial,seed,cycle_found,cycle_len,long_edges,bad_blocks,failed,millis";

pub fn write_results<W: Write>(results: &[TrialResult], w: W) -> Result<(), FormatError> {
    let mut out = csv::Writer::from_writer(w);
    for r in results {
        out.serialize(ResultRow::from(r))?;
    }
    if results.is_empty() {
        out.write_record(RESULTS_HEADER.split(','))?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_results<R: Read>(r: R) -> Result<Vec<ResultRow>, FormatError> {
    let mut rdr = csv::Reader::from_reader(r);
    Ok(rdr.deserialize().collect::<Result<_, _>>()?)
}

pub fn write_sweep<W: Write>(rows: &[SweepRow], w: W) -> Result<(), FormatError> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_sweep<R: Read>(r: R) -> Result<Vec<SweepRow>, FormatError> {
    let mut rdr = csv::Reader::from_reader(r);
    Ok(rdr.deserialize().collect::<Result<_, _>>()?)
}

/// Non-reproducible facts about an invocation, kept apart from the results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub created_unix: u64,
    pub version: String,
    pub threads: usize,
}

impl Metadata {
    pub fn now(threads: usize) -> Self {
        Metadata {
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            version: env!("CARGO_PKG_VERSION").to_string(),
            threads,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    #[serde(flatten)]
    pub report: ExperimentReport,
    pub metadata: Metadata,
}

pub fn write_report<W: Write>(report: &ReportFile, mut w: W) -> Result<(), FormatError> {
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w).and_then(|_| w.flush()).map_err(serde_json::Error::io)?;
    Ok(())
}

pub fn create(path: &Path) -> Result<BufWriter<File>, FormatError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| FormatError::io(path, e))
}

pub fn open(path: &Path) -> Result<File, FormatError> {
    File::open(path).map_err(|e| FormatError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use percolade_core::{generators, run_trial, ExperimentConfig};

    #[test]
    fn results_header_is_stable() {
        let mut buf = Vec::new();
        write_results(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{RESULTS_HEADER}\n"));
        let r = TrialResult {
            trial: 3,
            seed: 99,
            cycle_found: true,
            cycle_len: 12,
            long_edges: 1,
            blocks: 12,
            bad_blocks: 0,
            failed: false,
            truncated: false,
            millis: 0,
        };
        let mut buf = Vec::new();
        write_results(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, format!("{RESULTS_HEADER}\n3,99,true,12,1,0,false,0\n"));
        assert_eq!(read_results(text.as_bytes()).unwrap()[0].cycle_len, 12);
    }

    #[test]
    fn run_round_trip_and_schema_check() {
        let g = generators::random_regular(60, 4, 0).unwrap();
        let cfg = ExperimentConfig::builder(2, 2.0, 0.5).p(0.6).build().unwrap();
        let run = run_trial(&g, &cfg, 0).unwrap().run;
        let mut buf = Vec::new();
        write_run(&run, &mut buf).unwrap();
        assert_eq!(read_run(buf.as_slice()).unwrap(), run);
        let text = String::from_utf8(buf).unwrap().replacen("\"format\": 1", "\"format\": 7", 1);
        let err = read_run(text.as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Schema { .. }));
        assert!(err.to_string().contains("format 7"));
        assert!(matches!(read_run("{}".as_bytes()), Err(FormatError::Schema { .. })));
    }
}
