//! Criterion benchmarks for the map family live in `benches/`.
