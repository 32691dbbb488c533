//! Criterion benchmarks for `isoladder`; run with `cargo bench -p isoladder-bench`.
