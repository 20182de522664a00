//! JSONL records and the append-only sinks that persist them.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coincidence::{CoincidenceResult, Pair};
use crate::matrix::IntMatrix;
use crate::subst::Substitution;

/// One sieve-accepted matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptedRecord {
    pub index: u64,
    pub matrix: IntMatrix,
    /// `[a_0, .., a_{n-1}]`
    pub charpoly: Vec<i128>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultStatus {
    Coincident,
    Limit,
}

/// Outcome of the coincidence check on one sampled substitution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub matrix_index: u64,
    pub sample_index: u64,
    pub substitution: Substitution,
    pub status: ResultStatus,
    pub pair_levels: BTreeMap<Pair, u32>,
    pub max_level: Option<u32>,
}

impl ResultRecord {
    pub fn new(
        matrix_index: u64,
        sample_index: u64,
        substitution: Substitution,
        result: &CoincidenceResult,
    ) -> Self {
        Self {
            matrix_index,
            sample_index,
            substitution,
            status: if result.is_coincident() {
                ResultStatus::Coincident
            } else {
                ResultStatus::Limit
            },
            pair_levels: result.pair_levels.clone(),
            max_level: result.max_level(),
        }
    }
}

/// Receives records in index order at chunk boundaries.
pub trait RecordSink {
    fn accepted(&mut self, record: &AcceptedRecord) -> io::Result<()>;
    fn result(&mut self, record: &ResultRecord) -> io::Result<()>;
    /// Called before every checkpoint; everything written so far must be durable.
    fn flush(&mut self) -> io::Result<()>;
}

/// Appends records as JSON lines to up to two files.
#[derive(Debug, Default)]
pub struct JsonlSink {
    accepted: Option<BufWriter<File>>,
    results: Option<BufWriter<File>>,
}

impl JsonlSink {
    /// Creates (or truncates) the output files.
    pub fn create(accepted: Option<&Path>, results: Option<&Path>) -> io::Result<Self> {
        let open = |p: &Path| File::create(p).map(BufWriter::new);
        Ok(Self {
            accepted: accepted.map(open).transpose()?,
            results: results.map(open).transpose()?,
        })
    }

    /// Reopens files written by an interrupted run, keeping only the first
    /// `accepted_lines` / `result_lines` records, which are the ones covered
    /// by the checkpoint.
    pub fn resume(
        accepted: Option<(&Path, u64)>,
        results: Option<(&Path, u64)>,
    ) -> io::Result<Self> {
        let open = |(p, lines): (&Path, u64)| truncate_to_lines(p, lines);
        Ok(Self {
            accepted: accepted.map(open).transpose()?,
            results: results.map(open).transpose()?,
        })
    }
}

fn truncate_to_lines(path: &Path, lines: u64) -> io::Result<BufWriter<File>> {
    let mut keep = 0u64;
    if lines > 0 {
        let mut reader = BufReader::new(File::open(path)?);
        let mut buf = Vec::new();
        for _ in 0..lines {
            buf.clear();
            let read = reader.read_until(b'\n', &mut buf)?;
            if read == 0 || buf.last() != Some(&b'\n') {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{} has fewer than {lines} complete records", path.display()),
                ));
            }
            keep += read as u64;
        }
    }
    let mut file = OpenOptions::new()
        .write(true)
        .create(true)
        .truncate(false)
        .open(path)?;
    file.set_len(keep)?;
    file.seek(SeekFrom::End(0))?;
    Ok(BufWriter::new(file))
}

fn write_line<T: Serialize>(w: &mut BufWriter<File>, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")
}

impl RecordSink for JsonlSink {
    fn accepted(&mut self, record: &AcceptedRecord) -> io::Result<()> {
        match &mut self.accepted {
            Some(w) => write_line(w, record),
            None => Ok(()),
        }
    }

    fn result(&mut self, record: &ResultRecord) -> io::Result<()> {
        match &mut self.results {
            Some(w) => write_line(w, record),
            None => Ok(()),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        for w in [&mut self.accepted, &mut self.results]
            .into_iter()
            .flatten()
        {
            w.flush()?;
            w.get_ref().sync_data()?;
        }
        Ok(())
    }
}

/// Collects records in memory.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct MemorySink {
    pub accepted: Vec<AcceptedRecord>,
    pub results: Vec<ResultRecord>,
}

impl RecordSink for MemorySink {
    fn accepted(&mut self, record: &AcceptedRecord) -> io::Result<()> {
        self.accepted.push(record.clone());
        Ok(())
    }

    fn result(&mut self, record: &ResultRecord) -> io::Result<()> {
        self.results.push(record.clone());
        Ok(())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

/// Reads a JSONL file of records; blank lines are skipped.
pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> io::Result<Vec<T>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| {
            io::Error::new(
                io::ErrorKind::InvalidData,
                format!("{}:{}: {e}", path.display(), k + 1),
            )
        })?;
        out.push(value);
    }
    Ok(out)
}
