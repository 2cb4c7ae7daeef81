//! Benchmarks for the culinaria pipeline live under `benches/`.
