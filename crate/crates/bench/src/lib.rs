//! Criterion benchmarks for the classification pipeline; see `benches/`.
