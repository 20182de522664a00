//! Seeded, resumable search: generate, sieve, sample, check, aggregate.
//!
//! The unit of work is one matrix index: generation, sieve and all samples
//! of that matrix. Indices are processed in chunks; within a chunk workers
//! run in parallel, and results are folded in index order at the chunk
//! boundary, which is also where checkpoints are taken and records are
//! appended to the output files.

mod checkpoint;
mod records;
mod report;
mod run;

use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charpoly::CharPolyError;
use crate::coincidence::{DEFAULT_MAX_ITER, DEFAULT_MAX_WORD_LENGTH};
use crate::realise::RealiseError;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_VERSION};
pub use records::{
    read_jsonl, AcceptedRecord, JsonlSink, MemorySink, RecordSink, ResultRecord, ResultStatus,
};
pub use report::{Candidate, SearchReport, Tally, OVERFLOW_TAG};
pub use run::{run_search, run_search_with, sieve_stream, MatrixRecord, MatrixSource, RunOptions};

pub const DEFAULT_SAMPLES_PER_MATRIX: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// `samples_per_matrix` independent uniform draws per accepted matrix.
    Random,
    /// Every realisation, in lexicographic order; fails if a matrix has more
    /// than `samples_per_matrix` of them.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub p: f64,
    pub matrix_budget: u64,
    pub samples_per_matrix: u64,
    pub max_iter: u32,
    pub max_word_length: usize,
    pub master_seed: u64,
    pub workers: usize,
    pub sampling: SamplingMode,
}

impl SearchConfig {
    pub fn new(n: usize, matrix_budget: u64, master_seed: u64) -> Self {
        Self {
            n,
            p: 0.5,
            matrix_budget,
            samples_per_matrix: DEFAULT_SAMPLES_PER_MATRIX,
            max_iter: DEFAULT_MAX_ITER,
            max_word_length: DEFAULT_MAX_WORD_LENGTH,
            master_seed,
            workers: 1,
            sampling: SamplingMode::Random,
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::InvalidConfig(m.to_string()));
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.p) {
            return bad("p must lie in [0, 1]");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        if self.max_word_length == 0 {
            return bad("max_word_length must be at least 1");
        }
        Ok(())
    }

    /// Equality of everything that affects the output. Worker count does not.
    pub fn same_run(&self, other: &Self) -> bool {
        Self {
            workers: 1,
            ..self.clone()
        } == Self {
            workers: 1,
            ..other.clone()
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("checkpoint was written for a different configuration")]
    CheckpointMismatch,
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("matrix {index}")]
    CharPoly { index: u64, source: CharPolyError },
    #[error("matrix {index}")]
    Realise { index: u64, source: RealiseError },
    #[error(transparent)]
    Io(#[from] io::Error),
}
