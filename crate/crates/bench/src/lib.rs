//! Criterion benchmarks for the heavy kernels live in `benches/`.
