//! Criterion benchmarks for the arithmetic kernels; see `benches/`.
