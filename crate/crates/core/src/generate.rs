//! Seeded random k-SAT generation.
//!
//! The stream is fixed so that a seed names the same instance on every
//! platform and release:
//!
//! 1. the generator is SplitMix64 seeded with `seed`;
//! 2. for each clause, the width is drawn as `lo + below(hi − lo + 1)`
//!    (no draw for a fixed width);
//! 3. variables are drawn as `1 + below(n)`, rejecting repeats, until the
//!    clause has `k` distinct variables;
//! 4. then, in draw order, each literal is positive iff the top bit of the
//!    next output is set.
//!
//! `below(b)` is Lemire's multiply-shift with rejection, so it is unbiased.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Clause, CnfFormula, Literal};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound`. Panics if `bound == 0`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let product = u128::from(self.next_u64()) * u128::from(bound);
            if (product as u64) >= threshold {
                return (product >> 64) as u64;
            }
        }
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Width {
    Fixed(usize),
    /// Inclusive range.
    Range(usize, usize),
}

impl Width {
    pub fn bounds(self) -> (usize, usize) {
        match self {
            Width::Fixed(k) => (k, k),
            Width::Range(lo, hi) => (lo, hi),
        }
    }
}

impl std::fmt::Display for Width {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Width::Fixed(k) => write!(f, "{k}"),
            Width::Range(lo, hi) => write!(f, "{lo}-{hi}"),
        }
    }
}

impl std::str::FromStr for Width {
    type Err = GenerateError;

    /// `"3"` or `"2-3"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GenerateError::BadWidth(s.to_string());
        match s.split_once('-') {
            Some((lo, hi)) => {
                let lo = lo.trim().parse().map_err(|_| bad())?;
                let hi = hi.trim().parse().map_err(|_| bad())?;
                Ok(Width::Range(lo, hi))
            }
            None => Ok(Width::Fixed(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("clause width {width} exceeds the number of variables {n}")]
    WidthExceedsVars { width: usize, n: usize },
    #[error("clause width must be at least 1")]
    ZeroWidth,
    #[error("empty width range {lo}-{hi}")]
    EmptyRange { lo: usize, hi: usize },
    #[error("cannot parse width {0:?}; expected K or LO-HI")]
    BadWidth(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub m: usize,
    pub width: Width,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), GenerateError> {
        let (lo, hi) = self.width.bounds();
        if lo == 0 {
            return Err(GenerateError::ZeroWidth);
        }
        if lo > hi {
            return Err(GenerateError::EmptyRange { lo, hi });
        }
        if hi > self.n {
            return Err(GenerateError::WidthExceedsVars { width: hi, n: self.n });
        }
        Ok(())
    }
}

pub fn generate(spec: &GenSpec) -> Result<CnfFormula, GenerateError> {
    spec.validate()?;
    let (lo, hi) = spec.width.bounds();
    let mut rng = SplitMix64::new(spec.seed);
    let mut clauses = Vec::with_capacity(spec.m);
    let mut vars = Vec::with_capacity(hi);
    for _ in 0..spec.m {
        let k = if lo == hi { lo } else { lo + rng.below((hi - lo + 1) as u64) as usize };
        vars.clear();
        while vars.len() < k {
            let v = 1 + rng.below(spec.n as u64) as usize;
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let literals: Vec<Literal> = vars.iter().map(|&v| Literal::new(v, rng.coin())).collect();
        clauses.push(Clause::new(literals).expect("distinct variables"));
    }
    Ok(CnfFormula::new(spec.n, clauses).expect("variables in range"))
}

/// One instance per seed, generated in parallel, in seed order.
pub fn generate_many(n: usize, m: usize, width: Width, seeds: &[u64]) -> Result<Vec<CnfFormula>, GenerateError> {
    seeds.par_iter().map(|&seed| generate(&GenSpec { n, m, width, seed })).collect()
}
