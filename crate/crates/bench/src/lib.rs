//! Criterion benchmarks for the iwk kernels live in `benches/`.
