//! Criterion benchmarks for `homotopy-bvp` live under `benches/`; run them
//! with `cargo bench -p homotopy-bvp-bench`.
