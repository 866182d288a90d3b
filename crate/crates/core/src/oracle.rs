//! Exact brute-force distribution of `u` over all `2^n` assignments.
//!
//! This is deliberately exhaustive: it is the ground truth the moment bounds
//! are checked against, and it supplies the low-frustration probabilities
//! (`v_1`, `v_≤`, `Δ≤`) the sharpened bounds need.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Assignment, CnfFormula};
use crate::rational::{pow2, strict_floor_sqrt, Rational};

/// Default upper limit on `n` for enumeration (about 10^9 assignments).
pub const DEFAULT_VAR_CAP: usize = 30;
/// Counts are kept in `u64`, which bounds any configured cap.
pub const HARD_VAR_CAP: usize = 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("refusing to enumerate 2^{n} assignments: n = {n} exceeds the oracle cap of {cap} variables")]
    CapExceeded { n: usize, cap: usize },
    #[error("cutoff must be positive, got {0}")]
    NonPositiveCutoff(String),
    #[error("k = {k} outside 0..={m}")]
    OutOfRange { k: usize, m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_vars: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_vars: DEFAULT_VAR_CAP }
    }
}

impl OracleConfig {
    pub fn with_cap(max_vars: usize) -> Self {
        OracleConfig { max_vars: max_vars.min(HARD_VAR_CAP) }
    }

    fn check(&self, n: usize) -> Result<(), OracleError> {
        let cap = self.max_vars.min(HARD_VAR_CAP);
        if n > cap {
            Err(OracleError::CapExceeded { n, cap })
        } else {
            Ok(())
        }
    }
}

/// Histogram of `u`: `counts[i]` assignments frustrate exactly `i` clauses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UDistribution {
    pub n: usize,
    pub counts: Vec<u64>,
}

/// Clause as bit masks over the assignment index (bit `s-1` ↔ variable `s`).
#[derive(Clone, Copy)]
struct MaskedClause {
    pos: u64,
    neg: u64,
}

impl MaskedClause {
    #[inline]
    fn frustrated(self, x: u64) -> bool {
        x & self.pos == 0 && x & self.neg == self.neg
    }
}

fn masks(f: &CnfFormula) -> Vec<MaskedClause> {
    f.clauses()
        .iter()
        .map(|c| {
            let mut mc = MaskedClause { pos: 0, neg: 0 };
            for l in c.literals() {
                let bit = 1u64 << (l.var() - 1);
                if l.is_positive() {
                    mc.pos |= bit;
                } else {
                    mc.neg |= bit;
                }
            }
            mc
        })
        .collect()
}

#[inline]
fn count_frustrated(clauses: &[MaskedClause], x: u64) -> usize {
    clauses.iter().filter(|c| c.frustrated(x)).count()
}

/// Assignments are split into blocks by their top bits; block histograms are
/// merged by integer addition, so the result does not depend on scheduling.
pub fn enumerate(f: &CnfFormula, config: OracleConfig) -> Result<UDistribution, OracleError> {
    let n = f.num_vars();
    config.check(n)?;
    let clauses = masks(f);
    let m = clauses.len();
    let block_bits = n.min(10);
    let low_bits = n - block_bits;
    let counts = (0u64..1 << block_bits)
        .into_par_iter()
        .map(|block| {
            let mut local = vec![0u64; m + 1];
            let base = block << low_bits;
            for low in 0u64..1 << low_bits {
                local[count_frustrated(&clauses, base | low)] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; m + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(UDistribution { n, counts })
}

/// All satisfying assignments in index order.
pub fn solutions(f: &CnfFormula, config: OracleConfig) -> Result<Vec<Assignment>, OracleError> {
    let n = f.num_vars();
    config.check(n)?;
    let clauses = masks(f);
    Ok((0u64..1 << n)
        .into_par_iter()
        .filter(|&x| count_frustrated(&clauses, x) == 0)
        .map(|x| Assignment::from_index(x, n))
        .collect())
}

/// Number of satisfying assignments (`counts[0]`).
pub fn model_count(d: &UDistribution) -> u64 {
    d.counts.first().copied().unwrap_or(0)
}

impl UDistribution {
    pub fn num_clauses(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| u128::from(c)).sum()
    }

    pub fn model_count(&self) -> u64 {
        model_count(self)
    }

    /// Largest `i` with `v_i > 0`.
    pub fn max_u(&self) -> usize {
        self.counts.iter().rposition(|&c| c > 0).unwrap_or(0)
    }

    /// `v_i = counts[i] / 2^n`; zero beyond `m`.
    pub fn probability(&self, i: usize) -> Rational {
        let count = self.counts.get(i).copied().unwrap_or(0);
        Rational::new(BigInt::from(count), self.denominator())
    }

    fn denominator(&self) -> BigInt {
        BigInt::from(pow2(self.n))
    }

    fn weighted_sum(&self, weight: impl Fn(usize) -> BigInt) -> Rational {
        let num: BigInt = self.counts.iter().enumerate().map(|(i, &c)| BigInt::from(c) * weight(i)).sum();
        Rational::new(num, self.denominator())
    }

    /// Empirical `E(u)`.
    pub fn mean(&self) -> Rational {
        self.weighted_sum(BigInt::from)
    }

    /// Empirical `E(u²)`.
    pub fn second_moment(&self) -> Rational {
        self.weighted_sum(|i| BigInt::from(i) * BigInt::from(i))
    }

    pub fn variance(&self) -> Rational {
        let mean = self.mean();
        self.second_moment() - &mean * &mean
    }

    /// `v_1 + … + v_M`.
    pub fn v_le(&self, upper: usize) -> Rational {
        self.weighted_sum(|i| if (1..=upper).contains(&i) { BigInt::one() } else { BigInt::zero() })
    }

    /// `prob(u ≥ k)` for `0 ≤ k ≤ m`.
    pub fn tail_prob(&self, k: usize) -> Result<Rational, OracleError> {
        if k > self.num_clauses() {
            return Err(OracleError::OutOfRange { k, m: self.num_clauses() });
        }
        Ok(self.weighted_sum(|i| if i >= k { BigInt::one() } else { BigInt::zero() }))
    }

    /// `Δ≤(a) = Σ_{k=1}^{⌊a⌋} v_k (1 − k²/a²)` where `⌊a⌋` is the largest
    /// integer strictly below `a`.
    pub fn delta_leq(&self, a: &Rational) -> Result<Rational, OracleError> {
        if !a.is_positive() {
            return Err(OracleError::NonPositiveCutoff(a.to_string()));
        }
        self.delta_leq_sq(&(a * a))
    }

    /// [`delta_leq`](Self::delta_leq) parameterized by `a²`, which keeps
    /// irrational cutoffs with rational squares exact.
    pub fn delta_leq_sq(&self, a_squared: &Rational) -> Result<Rational, OracleError> {
        if !a_squared.is_positive() {
            return Err(OracleError::NonPositiveCutoff(a_squared.to_string()));
        }
        Ok(self.a2_delta_leq(a_squared) / a_squared)
    }

    /// `a² Δ≤(a) = Σ_{1 ≤ k, k² < a²} v_k (a² − k²)`, continuous in `a`.
    pub fn a2_delta_leq(&self, a_squared: &Rational) -> Rational {
        let upper = (strict_floor_sqrt(a_squared) as usize).min(self.num_clauses());
        let mut acc = Rational::zero();
        for k in 1..=upper {
            if self.counts[k] == 0 {
                continue;
            }
            let k2 = Rational::from_integer(BigInt::from(k * k));
            acc += self.probability(k) * (a_squared - k2);
        }
        acc
    }

    /// Checks `Σ counts = 2^n`.
    pub fn is_consistent(&self) -> bool {
        BigUint::from(self.total()) == pow2(self.n)
    }
}

/// Free-function form of [`UDistribution::delta_leq`].
pub fn delta_leq(d: &UDistribution, a: &Rational) -> Result<Rational, OracleError> {
    d.delta_leq(a)
}

/// Free-function form of [`UDistribution::tail_prob`].
pub fn tail_prob(d: &UDistribution, k: usize) -> Result<Rational, OracleError> {
    d.tail_prob(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frustration::eval_u_direct;
    use crate::instances;
    use crate::rational::{int, rat};

    fn dist(f: &CnfFormula) -> UDistribution {
        enumerate(f, OracleConfig::default()).unwrap()
    }

    #[test]
    fn histogram_of_three_clause_instance() {
        let d = dist(&instances::three_clause());
        assert_eq!(d.counts, vec![3, 5, 0, 0]);
        assert_eq!(d.probability(0), rat(3, 8));
        assert_eq!(d.probability(1), rat(5, 8));
        assert_eq!(model_count(&d), 3);
        assert_eq!(d.max_u(), 1);
    }

    #[test]
    fn histogram_of_four_variable_instances() {
        let d = dist(&instances::four_var_unique());
        assert_eq!(d.model_count(), 1);
        assert_eq!(d.probability(0), rat(1, 16));
        assert_eq!(d.probability(1), rat(1, 2));

        let d = dist(&instances::four_var_unsat());
        assert_eq!(d.model_count(), 0);
        assert_eq!(d.probability(1), rat(7, 16));
        assert_eq!(d.probability(2), rat(6, 16));
        assert_eq!(d.v_le(2), rat(13, 16));
    }

    #[test]
    fn bitmask_counts_match_direct_evaluation() {
        let f = instances::four_var_unsat();
        let clauses = masks(&f);
        for x in 0..16u64 {
            let direct = eval_u_direct(&f, &Assignment::from_index(x, 4)).unwrap();
            assert_eq!(count_frustrated(&clauses, x), direct);
        }
    }

    #[test]
    fn unique_solution_is_0100() {
        let sols = solutions(&instances::four_var_unique(), OracleConfig::default()).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].to_string(), "0100");
    }

    #[test]
    fn cap_is_enforced() {
        let f = CnfFormula::empty(31);
        assert_eq!(
            enumerate(&f, OracleConfig::default()),
            Err(OracleError::CapExceeded { n: 31, cap: 30 })
        );
        let msg = enumerate(&f, OracleConfig::with_cap(5)).unwrap_err().to_string();
        assert!(msg.contains("2^31"), "{msg}");
    }

    #[test]
    fn empty_formula_counts_every_assignment() {
        let d = dist(&CnfFormula::empty(3));
        assert_eq!(d.counts, vec![8]);
        assert_eq!(d.model_count(), 8);
    }

    #[test]
    fn delta_leq_examples() {
        let d = dist(&instances::four_var_unique());
        assert_eq!(d.delta_leq(&rat(23, 12)).unwrap(), rat(385, 1058));
        assert_eq!(d.delta_leq(&int(1)).unwrap(), int(0));
        assert_eq!(d.delta_leq(&rat(1, 2)).unwrap(), int(0));
        assert!(d.delta_leq(&int(0)).is_err());
        assert!(d.delta_leq(&int(-1)).is_err());

        let d = dist(&instances::three_clause());
        assert_eq!(d.delta_leq(&rat(3, 2)).unwrap(), rat(25, 72));
        // k = a exactly is excluded, and contributes zero anyway.
        assert_eq!(d.delta_leq(&int(2)).unwrap(), rat(5, 8) * rat(3, 4));
    }

    #[test]
    fn tail_probabilities() {
        let d = dist(&instances::three_clause());
        assert_eq!(d.tail_prob(1).unwrap(), rat(5, 8));
        assert_eq!(d.tail_prob(0).unwrap(), int(1));
        assert!(d.tail_prob(4).is_err());
        let d = dist(&instances::four_var_unsat());
        assert_eq!(d.tail_prob(1).unwrap(), int(1));
    }

    #[test]
    fn distribution_json_schema() {
        let d = dist(&instances::three_clause());
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"n":3,"counts":[3,5,0,0]}"#);
    }
}
