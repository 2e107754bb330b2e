//! Criterion benchmarks for the relayrate analyses; see `benches/analyses.rs`.
