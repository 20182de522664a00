use std::collections::VecDeque;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use rayon::ThreadPool;

use super::{
    save_checkpoint, AcceptedRecord, Candidate, Checkpoint, RecordSink, ResultRecord, SamplingMode,
    SearchConfig, SearchError, SearchReport, Tally, OVERFLOW_TAG,
};
use crate::charpoly::{CharPoly, CharPolyError};
use crate::coincidence::{strong_coincidence, CoincidenceResult};
use crate::matrix::IntMatrix;
use crate::realise::{enumerate_realisations, sample_realisation};
use crate::rng::{gen_matrix, sample_stream};
use crate::sieve::{passes_pisot_sieve, RejectReason, SieveVerdict};
use crate::subst::Substitution;

/// Where the matrices of a run come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixSource {
    /// `gen_matrix(master_seed, k, n, p)` for `k` in `0..matrix_budget`.
    Generated,
    /// Explicit `(index, matrix)` pairs, e.g. read back from a sieve run.
    /// The index keys the sampling stream, so re-searching sieve output
    /// reproduces an inline search with the same seed.
    Supplied(Vec<(u64, IntMatrix)>),
}

impl MatrixSource {
    fn get(&self, config: &SearchConfig, position: u64) -> (u64, IntMatrix) {
        match self {
            MatrixSource::Generated => (
                position,
                gen_matrix(config.master_seed, position, config.n, config.p),
            ),
            MatrixSource::Supplied(list) => list[position as usize].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixRecord {
    pub index: u64,
    pub matrix: IntMatrix,
    pub verdict: Result<SieveVerdict, CharPolyError>,
}

pub struct RunOptions<'a> {
    /// Indices per chunk. Checkpoints and sink writes happen between chunks.
    pub chunk_size: u64,
    pub checkpoint_path: Option<&'a Path>,
    /// Stop once this many indices are done, leaving a resumable checkpoint.
    pub stop_at: Option<u64>,
    pub sink: Option<&'a mut dyn RecordSink>,
    /// Called after every chunk with `(next_index, matrix_budget)`.
    pub progress: Option<&'a (dyn Fn(u64, u64) + Sync)>,
}

impl Default for RunOptions<'_> {
    fn default() -> Self {
        Self {
            chunk_size: 1 << 16,
            checkpoint_path: None,
            stop_at: None,
            sink: None,
            progress: None,
        }
    }
}

fn build_pool(workers: usize) -> Result<ThreadPool, SearchError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SearchError::InvalidConfig(format!("cannot start {workers} workers: {e}")))
}

/// Sieve records for every index of the budget, in index order. Each chunk
/// is computed in parallel before it is yielded.
pub fn sieve_stream(
    config: &SearchConfig,
) -> Result<impl Iterator<Item = MatrixRecord>, SearchError> {
    config.validate()?;
    let pool = build_pool(config.workers)?;
    let config = config.clone();
    let mut next = 0u64;
    let mut buffer = VecDeque::new();
    Ok(std::iter::from_fn(move || {
        if buffer.is_empty() && next < config.matrix_budget {
            let end = (next + 4096).min(config.matrix_budget);
            let chunk: Vec<MatrixRecord> = pool.install(|| {
                (next..end)
                    .into_par_iter()
                    .map(|index| {
                        let matrix = gen_matrix(config.master_seed, index, config.n, config.p);
                        let verdict = passes_pisot_sieve(&matrix);
                        MatrixRecord {
                            index,
                            matrix,
                            verdict,
                        }
                    })
                    .collect()
            });
            buffer.extend(chunk);
            next = end;
        }
        buffer.pop_front()
    }))
}

/// Uninterrupted run over generated matrices, without output files.
pub fn run_search(
    config: &SearchConfig,
    checkpoint: Option<Checkpoint>,
) -> Result<SearchReport, SearchError> {
    run_search_with(
        config,
        &MatrixSource::Generated,
        checkpoint,
        RunOptions::default(),
    )
}

pub fn run_search_with(
    config: &SearchConfig,
    source: &MatrixSource,
    checkpoint: Option<Checkpoint>,
    mut opts: RunOptions<'_>,
) -> Result<SearchReport, SearchError> {
    let started = Instant::now();
    config.validate()?;
    if let MatrixSource::Supplied(list) = source {
        if list.len() as u64 != config.matrix_budget {
            return Err(SearchError::InvalidConfig(format!(
                "matrix_budget {} but {} matrices supplied",
                config.matrix_budget,
                list.len()
            )));
        }
    }
    let mut state = match checkpoint {
        Some(ck) => {
            if !ck.config.same_run(config) {
                return Err(SearchError::CheckpointMismatch);
            }
            ck.validate()?;
            Checkpoint {
                config: config.clone(),
                ..ck
            }
        }
        None => Checkpoint::start(config),
    };
    let pool = build_pool(config.workers)?;
    let end = opts
        .stop_at
        .map_or(config.matrix_budget, |s| s.min(config.matrix_budget));
    let chunk_size = opts.chunk_size.max(1);

    while state.next_index < end {
        let chunk_end = (state.next_index + chunk_size).min(end);
        let acc = pool.install(|| {
            (state.next_index..chunk_end)
                .into_par_iter()
                .fold(ChunkAcc::default, |mut acc, position| {
                    acc.process(config, source, position);
                    acc
                })
                .reduce(ChunkAcc::default, ChunkAcc::merge)
        });
        let tally = acc.finish(opts.sink.as_deref_mut())?;
        state.partials.absorb(tally);
        state.next_index = chunk_end;
        if let Some(sink) = opts.sink.as_deref_mut() {
            sink.flush()?;
        }
        if let Some(path) = opts.checkpoint_path {
            save_checkpoint(path, &state)?;
        }
        if let Some(progress) = opts.progress {
            progress(state.next_index, config.matrix_budget);
        }
    }
    if let Some(path) = opts.checkpoint_path {
        // also covers runs that had nothing left to do
        save_checkpoint(path, &state)?;
    }

    Ok(SearchReport {
        config: config.clone(),
        complete: state.next_index == config.matrix_budget,
        tally: state.partials,
        duration_secs: started.elapsed().as_secs_f64(),
    })
}

struct Found {
    index: u64,
    matrix: IntMatrix,
    charpoly: CharPoly,
    samples: Vec<(u64, Substitution, CoincidenceResult)>,
}

#[derive(Default)]
struct ChunkAcc {
    tested: u64,
    /// Indexed like [`RejectReason::ALL`], with overflow last.
    rejections: [u64; 4],
    found: Vec<Found>,
    error: Option<(u64, SearchError)>,
}

impl ChunkAcc {
    fn process(&mut self, config: &SearchConfig, source: &MatrixSource, position: u64) {
        if self.error.is_some() {
            return;
        }
        let (index, matrix) = source.get(config, position);
        self.tested += 1;
        let verdict = match passes_pisot_sieve(&matrix) {
            Ok(v) => v,
            Err(CharPolyError::OverflowDetected) => {
                self.rejections[3] += 1;
                return;
            }
            Err(source) => {
                self.error = Some((position, SearchError::CharPoly { index, source }));
                return;
            }
        };
        if !verdict.accepted {
            for &r in &verdict.reasons {
                self.rejections[r as usize] += 1;
            }
            return;
        }
        match check_realisations(config, index, &matrix) {
            Ok(samples) => self.found.push(Found {
                index,
                matrix,
                charpoly: verdict.charpoly,
                samples,
            }),
            Err(e) => self.error = Some((position, e)),
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.tested += other.tested;
        for (a, b) in self.rejections.iter_mut().zip(other.rejections) {
            *a += b;
        }
        self.found.extend(other.found);
        // keep the error with the lowest position so failures are reproducible
        self.error = match (self.error, other.error) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }

    fn finish<'s>(
        mut self,
        mut sink: Option<&mut (dyn RecordSink + 's)>,
    ) -> Result<Tally, SearchError> {
        if let Some((_, e)) = self.error {
            return Err(e);
        }
        self.found.sort_by_key(|f| f.index);
        let mut tally = Tally {
            matrices_tested: self.tested,
            ..Tally::default()
        };
        let tags = RejectReason::ALL.map(RejectReason::as_str);
        for (tag, count) in tags.iter().chain([&OVERFLOW_TAG]).zip(self.rejections) {
            tally.add_rejections(tag, count);
        }
        for f in self.found {
            tally.matrices_accepted += 1;
            if let Some(sink) = sink.as_deref_mut() {
                sink.accepted(&AcceptedRecord {
                    index: f.index,
                    matrix: f.matrix.clone(),
                    charpoly: f.charpoly.coeffs().to_vec(),
                })?;
            }
            for (sample_index, substitution, result) in f.samples {
                tally.substitutions_checked += 1;
                if let Some(sink) = sink.as_deref_mut() {
                    sink.result(&ResultRecord::new(
                        f.index,
                        sample_index,
                        substitution.clone(),
                        &result,
                    ))?;
                }
                if result.is_coincident() {
                    tally.coincident_count += 1;
                    *tally
                        .level_histogram
                        .entry(result.max_level().unwrap_or(0))
                        .or_default() += 1;
                } else {
                    tally.limit_reached_count += 1;
                    tally.candidates.push(Candidate {
                        matrix_index: f.index,
                        sample_index,
                        matrix: f.matrix.clone(),
                        substitution,
                        result,
                    });
                }
            }
        }
        Ok(tally)
    }
}

fn check_realisations(
    config: &SearchConfig,
    index: u64,
    matrix: &IntMatrix,
) -> Result<Vec<(u64, Substitution, CoincidenceResult)>, SearchError> {
    let realise_err = |source| SearchError::Realise { index, source };
    let substitutions: Vec<(u64, Substitution)> = match config.sampling {
        SamplingMode::Random => (0..config.samples_per_matrix)
            .map(|s| {
                let mut rng = sample_stream(config.master_seed, index, s);
                sample_realisation(matrix, &mut rng)
                    .map(|sub| (s, sub))
                    .map_err(realise_err)
            })
            .collect::<Result<_, _>>()?,
        SamplingMode::Exhaustive => enumerate_realisations(matrix, config.samples_per_matrix)
            .map_err(realise_err)?
            .into_iter()
            .zip(0u64..)
            .map(|(sub, s)| (s, sub))
            .collect(),
    };
    Ok(substitutions
        .into_iter()
        .map(|(s, sub)| {
            let result = strong_coincidence(&sub, config.max_iter, config.max_word_length);
            (s, sub, result)
        })
        .collect())
}
