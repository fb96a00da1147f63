//! Benchmark-only crate; see `benches/trace.rs`.
