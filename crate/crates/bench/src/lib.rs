//! Benchmarks for the satisfiability, counting and filtering engines; see `benches/`.
