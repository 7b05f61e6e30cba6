//! Criterion benchmarks for `qherm-core`; see `benches/`.
