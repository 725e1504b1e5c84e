//! Criterion benchmarks for the propagators and pairings; see `benches/`.
