//! Criterion benchmarks for the sieve and coincidence hot paths; see `benches/`.
