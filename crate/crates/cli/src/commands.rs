use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use pisot_search::coincidence::{DEFAULT_MAX_ITER, DEFAULT_MAX_WORD_LENGTH};
use pisot_search::pipeline::{
    load_checkpoint, read_jsonl, run_search_with, AcceptedRecord, JsonlSink, MatrixSource,
    RunOptions, SamplingMode, SearchConfig, SearchReport, DEFAULT_SAMPLES_PER_MATRIX,
};
use pisot_search::{
    passes_pisot_sieve, realisation_count, strong_coincidence, IntMatrix, RealiseError,
    Substitution,
};

use crate::diagnostic::EigenDiagnostic;
use crate::shards::ShardTotals;
use crate::{Failure, Outcome};

#[derive(Debug, Parser)]
#[command(
    name = "pisot",
    version,
    about = "Search for counterexamples to the strong coincidence conjecture"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sieve random binary matrices for the irreducible Pisot condition.
    Sieve(SieveArgs),
    /// Sample realisations of accepted matrices and check strong coincidence.
    Search(SearchArgs),
    /// Check one substitution for strong coincidence.
    Check(CheckArgs),
    /// Count the realisations of a matrix exactly.
    Count(MatrixArg),
    /// Print eigenvalue moduli next to the sieve verdict (numeric, not a proof).
    Verify(MatrixArg),
    /// Aggregate result files from several runs.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GeneratorArgs {
    /// Matrix dimension (alphabet size).
    #[arg(long)]
    pub size: Option<usize>,
    /// Number of random matrices to generate.
    #[arg(long)]
    pub count: Option<u64>,
    /// Probability of a one in each entry.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Master seed; falls back to PISOT_SEED, then 0.
    #[arg(long, env = "PISOT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Checkpoint file; resumed from if it exists.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Write the full JSON report here.
    #[arg(long)]
    pub report_out: Option<PathBuf>,
    /// Print progress to standard error.
    #[arg(long)]
    pub progress: bool,
    /// Matrix indices per chunk (checkpoint interval).
    #[arg(long, default_value_t = 1 << 20, hide = true)]
    pub chunk_size: u64,
    /// Stop after this many matrices, leaving a resumable checkpoint.
    #[arg(long, hide = true)]
    pub stop_at: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SieveArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Accepted matrices, one JSON object per line.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Accepted-matrix JSONL from `sieve`; otherwise matrices are generated.
    #[arg(long, conflicts_with_all = ["count", "size"])]
    pub matrices: Option<PathBuf>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Realisations sampled per accepted matrix.
    #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_MATRIX)]
    pub samples: u64,
    /// Check every realisation instead of sampling (at most --samples of them).
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: u32,
    #[arg(long, default_value_t = DEFAULT_MAX_WORD_LENGTH)]
    pub max_word_length: usize,
    /// Per-substitution results, one JSON object per line.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Accepted matrices of an inline sieve, one JSON object per line.
    #[arg(long)]
    pub accepted_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Substitution file, one `i: l1 l2 ...` line per letter.
    #[arg(long)]
    pub subst: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: u32,
    #[arg(long, default_value_t = DEFAULT_MAX_WORD_LENGTH)]
    pub max_word_length: usize,
}

#[derive(Debug, Args)]
pub struct MatrixArg {
    /// Matrix file, `{"n": .., "rows": [[..]]}`.
    #[arg(long)]
    pub matrix: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Result JSONL files (repeatable).
    #[arg(long = "in", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
}

impl Cli {
    pub fn run(self) -> Result<Outcome, Failure> {
        match self.command {
            Command::Sieve(a) => cmd_sieve(a),
            Command::Search(a) => cmd_search(a),
            Command::Check(a) => cmd_check(a),
            Command::Count(a) => cmd_count(a),
            Command::Verify(a) => cmd_verify(a),
            Command::Report(a) => cmd_report(a),
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::io)
}

fn read_matrix(path: &Path) -> Result<IntMatrix, Failure> {
    let text = read_text(path)?;
    IntMatrix::from_json(&text)
        .with_context(|| format!("{}", path.display()))
        .map_err(Failure::usage)
}

fn generated_config(g: &GeneratorArgs, r: &RunArgs) -> Result<SearchConfig, Failure> {
    let n = g
        .size
        .ok_or_else(|| Failure::usage(anyhow!("--size is required")))?;
    let count = g
        .count
        .ok_or_else(|| Failure::usage(anyhow!("--count is required")))?;
    let mut c = SearchConfig::new(n, count, r.seed);
    c.p = g.p;
    c.workers = r.workers;
    Ok(c)
}

/// Runs the pipeline with output files, resuming from the checkpoint if present.
fn execute(
    config: &SearchConfig,
    source: &MatrixSource,
    run: &RunArgs,
    accepted_out: Option<&Path>,
    results_out: Option<&Path>,
) -> Result<SearchReport, Failure> {
    config.validate()?;
    let checkpoint = match &run.checkpoint {
        Some(path) if path.exists() => Some(load_checkpoint(path)?),
        _ => None,
    };
    let mut sink = match &checkpoint {
        Some(ck) => JsonlSink::resume(
            accepted_out.map(|p| (p, ck.partials.matrices_accepted)),
            results_out.map(|p| (p, ck.partials.substitutions_checked)),
        ),
        None => JsonlSink::create(accepted_out, results_out),
    }
    .context("cannot open output files")
    .map_err(Failure::io)?;
    let progress = |done: u64, total: u64| eprintln!("progress: {done}/{total}");
    let opts = RunOptions {
        chunk_size: run.chunk_size,
        checkpoint_path: run.checkpoint.as_deref(),
        stop_at: run.stop_at,
        sink: Some(&mut sink),
        progress: if run.progress { Some(&progress) } else { None },
    };
    let report = run_search_with(config, source, checkpoint, opts)?;
    if let Some(path) = &run.report_out {
        fs::write(path, report.to_json() + "\n")
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::io)?;
    }
    Ok(report)
}

fn print(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
}

pub fn cmd_sieve(a: SieveArgs) -> Result<Outcome, Failure> {
    let mut config = generated_config(&a.generator, &a.run)?;
    config.samples_per_matrix = 0;
    let report = execute(
        &config,
        &MatrixSource::Generated,
        &a.run,
        a.out.as_deref(),
        None,
    )?;
    print(&report.summary());
    Ok(Outcome::Clean)
}

pub fn cmd_search(a: SearchArgs) -> Result<Outcome, Failure> {
    let (mut config, source) = match &a.matrices {
        Some(path) => {
            let records: Vec<AcceptedRecord> = read_jsonl(path)
                .with_context(|| format!("cannot read matrices from {}", path.display()))
                .map_err(|e| {
                    let invalid = e
                        .downcast_ref::<std::io::Error>()
                        .is_some_and(|io| io.kind() == std::io::ErrorKind::InvalidData);
                    if invalid {
                        Failure::usage(e)
                    } else {
                        Failure::io(e)
                    }
                })?;
            let n = records
                .first()
                .map_or(a.generator.size.unwrap_or(2), |r| r.matrix.n());
            let list: Vec<(u64, IntMatrix)> =
                records.into_iter().map(|r| (r.index, r.matrix)).collect();
            let mut c = SearchConfig::new(n, list.len() as u64, a.run.seed);
            c.workers = a.run.workers;
            c.p = a.generator.p;
            (c, MatrixSource::Supplied(list))
        }
        None => (
            generated_config(&a.generator, &a.run)?,
            MatrixSource::Generated,
        ),
    };
    config.samples_per_matrix = a.samples;
    config.max_iter = a.max_iter;
    config.max_word_length = a.max_word_length;
    if a.exhaustive {
        config.sampling = SamplingMode::Exhaustive;
    }
    let report = execute(
        &config,
        &source,
        &a.run,
        a.accepted_out.as_deref(),
        a.out.as_deref(),
    )?;
    print(&report.summary());
    if report.tally.limit_reached_count > 0 {
        print(
            "possible counterexample: re-run the candidates with `pisot check` at a higher limit\n",
        );
        for c in &report.tally.candidates {
            print(&format!(
                "candidate matrix {} sample {}:\n{}",
                c.matrix_index, c.sample_index, c.substitution
            ));
        }
        return Ok(Outcome::Pending);
    }
    Ok(Outcome::Clean)
}

pub fn cmd_check(a: CheckArgs) -> Result<Outcome, Failure> {
    let text = read_text(&a.subst)?;
    let phi = Substitution::parse(&text)
        .with_context(|| format!("{}", a.subst.display()))
        .map_err(Failure::usage)?;
    if a.max_iter == 0 || a.max_word_length == 0 {
        return Err(Failure::usage(anyhow!("limits must be positive")));
    }
    let result = strong_coincidence(&phi, a.max_iter, a.max_word_length);
    let n = phi.n() as u32;
    let mut out = String::new();
    for x in 1..=n {
        for y in x + 1..=n {
            let pair = pisot_search::Pair(x, y);
            match result.pair_levels.get(&pair) {
                Some(level) => out += &format!("{pair}: level {level}\n"),
                None => out += &format!("{pair}: PENDING\n"),
            }
        }
    }
    if let Some(reason) = result.limit_reason {
        out += &format!("limit reached: {reason:?}\n");
    }
    print(&out);
    Ok(if result.is_coincident() {
        Outcome::Clean
    } else {
        Outcome::Pending
    })
}

pub fn cmd_count(a: MatrixArg) -> Result<Outcome, Failure> {
    let m = read_matrix(&a.matrix)?;
    match realisation_count(&m) {
        Ok(count) => {
            print(&format!("{count}\n"));
            Ok(Outcome::Clean)
        }
        Err(RealiseError::EmptyColumn(col)) => Err(Failure::usage(anyhow!(
            "column {col} sums to zero: no realisation exists"
        ))),
        Err(e) => Err(Failure::usage(e)),
    }
}

pub fn cmd_verify(a: MatrixArg) -> Result<Outcome, Failure> {
    let m = read_matrix(&a.matrix)?;
    let diag = EigenDiagnostic::of(&m);
    let mut out = String::from("numeric diagnostic, not a certificate\n");
    out += "eigenvalue moduli:";
    for x in &diag.moduli {
        out += &format!(" {x:.6}");
    }
    out += "\n";
    out += &format!(
        "Pisot pattern: {}\n",
        if diag.pisot_pattern() { "yes" } else { "no" }
    );
    match passes_pisot_sieve(&m) {
        Ok(v) if v.accepted => out += "sieve: accepted\n",
        Ok(v) => {
            let reasons: Vec<&str> = v.reasons.iter().map(|r| r.as_str()).collect();
            out += &format!("sieve: rejected ({})\n", reasons.join(", "));
        }
        Err(e) => out += &format!("sieve: rejected ({e})\n"),
    }
    print(&out);
    Ok(Outcome::Clean)
}

pub fn cmd_report(a: ReportArgs) -> Result<Outcome, Failure> {
    let totals = ShardTotals::from_paths(&a.inputs)
        .context("cannot read result files")
        .map_err(Failure::io)?;
    print(&totals.render());
    Ok(if totals.pending > 0 {
        Outcome::Pending
    } else {
        Outcome::Clean
    })
}
