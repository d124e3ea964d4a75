//! Criterion benchmarks for the numerical kernels live in `benches/`.
