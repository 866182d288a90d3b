//! Shared workloads for the benchmarks.

use frustration_core::generate::{generate, GenSpec, Width};
use frustration_core::CnfFormula;

/// Random 3-SAT with `ratio · n` clauses (rounded down).
pub fn random_3sat(n: usize, ratio: f64, seed: u64) -> CnfFormula {
    let m = (ratio * n as f64) as usize;
    generate(&GenSpec { n, m, width: Width::Fixed(3), seed }).expect("n >= 3")
}

/// Random formula with clause widths 2 to 6, for the normalizer.
pub fn random_mixed(n: usize, m: usize, seed: u64) -> CnfFormula {
    generate(&GenSpec { n, m, width: Width::Range(2, 6), seed }).expect("n >= 6")
}
