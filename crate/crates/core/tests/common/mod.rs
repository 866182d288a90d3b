#![allow(dead_code)]

use frustration_core::generate::{generate, GenSpec, SplitMix64, Width};
use frustration_core::CnfFormula;

/// Master seed for the random ensembles.
pub const ENSEMBLE_SEED: u64 = 0x5EED_0001;

pub struct Member {
    pub spec: GenSpec,
    pub formula: CnfFormula,
}

/// Random instances with `n ∈ [lo, hi]`, `m ∈ [n, 3n]` and widths 2, 3 or
/// mixed, derived deterministically from `master`.
pub fn ensemble(count: usize, master: u64, lo: usize, hi: usize) -> Vec<Member> {
    let mut rng = SplitMix64::new(master);
    (0..count)
        .map(|_| {
            let n = lo + rng.below((hi - lo + 1) as u64) as usize;
            let m = n + rng.below(2 * n as u64 + 1) as usize;
            let width = match rng.below(3) {
                0 => Width::Fixed(2),
                1 => Width::Fixed(3),
                _ => Width::Range(2, 3),
            };
            let spec = GenSpec { n, m, width, seed: rng.next_u64() };
            Member { spec, formula: generate(&spec).expect("valid spec") }
        })
        .collect()
}

/// Plain DPLL with unit propagation, independent of the crate's code paths.
pub fn is_satisfiable(f: &CnfFormula) -> bool {
    let clauses: Vec<Vec<i64>> = f.clauses().iter().map(|c| c.to_dimacs()).collect();
    dpll(clauses)
}

fn dpll(mut clauses: Vec<Vec<i64>>) -> bool {
    loop {
        if clauses.is_empty() {
            return true;
        }
        if clauses.iter().any(|c| c.is_empty()) {
            return false;
        }
        match clauses.iter().find(|c| c.len() == 1) {
            Some(unit) => {
                let lit = unit[0];
                clauses = assign(&clauses, lit);
            }
            None => break,
        }
    }
    let lit = clauses[0][0];
    dpll(assign(&clauses, lit)) || dpll(assign(&clauses, -lit))
}

fn assign(clauses: &[Vec<i64>], lit: i64) -> Vec<Vec<i64>> {
    clauses
        .iter()
        .filter(|c| !c.contains(&lit))
        .map(|c| c.iter().copied().filter(|&l| l != -lit).collect())
        .collect()
}
