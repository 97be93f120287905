//! Criterion benchmarks for `formlab`; see `benches/operators.rs`.
