//! The frustration count `u(x)` (number of clauses falsified by `x`), its
//! multilinear expansion over `x ∈ {−1,+1}^n`, and its first two moments
//! under the uniform distribution on assignments.
//!
//! Each clause `j` contributes `2^{-k_j} ∏_s (1 − f_{js} x_s)` to `u`. For
//! clauses of width at most three, expanding the product gives
//!
//! ```text
//! u(x) = C − Σ λ_s x_s + Σ μ_st x_s x_t − Σ ν_rst x_r x_s x_t
//! ```
//!
//! and, because the monomials are orthonormal, `E(u) = C` and the variance
//! is the sum of the squared non-constant coefficients.
//!
//! The second moment for arbitrary widths comes from pairwise clause
//! overlaps: two clauses are jointly falsified with probability 0 if they
//! contain a variable with opposite signs, and `2^{-w}` otherwise, where `w`
//! is the number of distinct variables in their union.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Assignment, Clause, CnfError, CnfFormula};
use crate::rational::{dyadic, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrustrationError {
    #[error("clause {clause} has width {width}; the polynomial form needs width <= 3")]
    UnsupportedWidth { clause: usize, width: usize },
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

/// Number of clauses all of whose literals are false under `x`.
pub fn eval_u_direct(f: &CnfFormula, x: &Assignment) -> Result<usize, CnfError> {
    x.check_len(f.num_vars())?;
    Ok(f.clauses().iter().filter(|c| c.is_frustrated_by(x)).count())
}

/// Coefficients of `u(x)` for formulas of width at most three.
///
/// Quadratic and cubic terms are keyed by strictly increasing variable
/// tuples (1-based); zero coefficients are not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrustrationPolynomial {
    n: usize,
    constant: Rational,
    linear: Vec<Rational>,
    quadratic: BTreeMap<(usize, usize), Rational>,
    cubic: BTreeMap<(usize, usize, usize), Rational>,
}

impl FrustrationPolynomial {
    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    /// λ_s for 1-based `s`.
    pub fn linear(&self, s: usize) -> &Rational {
        &self.linear[s - 1]
    }

    pub fn linear_terms(&self) -> &[Rational] {
        &self.linear
    }

    /// μ_st, symmetric in its arguments; zero when absent.
    pub fn quadratic(&self, s: usize, t: usize) -> Rational {
        let key = if s < t { (s, t) } else { (t, s) };
        self.quadratic.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn quadratic_terms(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.quadratic
    }

    /// ν_rst, symmetric in its arguments; zero when absent.
    pub fn cubic(&self, r: usize, s: usize, t: usize) -> Rational {
        let mut key = [r, s, t];
        key.sort_unstable();
        self.cubic.get(&(key[0], key[1], key[2])).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn cubic_terms(&self) -> &BTreeMap<(usize, usize, usize), Rational> {
        &self.cubic
    }

    pub fn nonzero_linear_count(&self) -> usize {
        self.linear.iter().filter(|l| !l.is_zero()).count()
    }

    /// Sum of squared non-constant coefficients, which is the variance of `u`.
    pub fn variance(&self) -> Rational {
        let sq = |r: &Rational| r * r;
        self.linear.iter().map(sq).sum::<Rational>()
            + self.quadratic.values().map(sq).sum::<Rational>()
            + self.cubic.values().map(sq).sum::<Rational>()
    }
}

pub fn poly_coefficients(f: &CnfFormula) -> Result<FrustrationPolynomial, FrustrationError> {
    let mut constant = Rational::zero();
    let mut linear = vec![Rational::zero(); f.num_vars()];
    let mut quadratic: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    let mut cubic: BTreeMap<(usize, usize, usize), Rational> = BTreeMap::new();

    for (j, clause) in f.clauses().iter().enumerate() {
        let k = clause.width();
        if k > 3 {
            return Err(FrustrationError::UnsupportedWidth { clause: j, width: k });
        }
        let weight = dyadic(k);
        let lits = clause.literals();
        constant += &weight;
        for l in lits {
            linear[l.var() - 1] += &weight * signed(l.sign());
        }
        for (a, la) in lits.iter().enumerate() {
            for lb in &lits[a + 1..] {
                *quadratic.entry((la.var(), lb.var())).or_insert_with(Rational::zero) +=
                    &weight * signed(la.sign() * lb.sign());
            }
        }
        if let [a, b, c] = lits {
            *cubic.entry((a.var(), b.var(), c.var())).or_insert_with(Rational::zero) +=
                &weight * signed(a.sign() * b.sign() * c.sign());
        }
    }
    quadratic.retain(|_, v| !v.is_zero());
    cubic.retain(|_, v| !v.is_zero());
    Ok(FrustrationPolynomial { n: f.num_vars(), constant, linear, quadratic, cubic })
}

fn signed(sign: i8) -> Rational {
    Rational::from_integer(BigInt::from(sign))
}

/// Evaluates `C − Σλx + Σμxx − Σνxxx` exactly.
pub fn eval_u_poly(p: &FrustrationPolynomial, x: &Assignment) -> Result<Rational, CnfError> {
    x.check_len(p.n)?;
    let xv = |s: usize| i64::from(x.value(s));
    let mut acc = p.constant.clone();
    for (s, lambda) in p.linear.iter().enumerate() {
        if xv(s + 1) > 0 {
            acc -= lambda;
        } else {
            acc += lambda;
        }
    }
    for (&(s, t), mu) in &p.quadratic {
        if xv(s) * xv(t) > 0 {
            acc += mu;
        } else {
            acc -= mu;
        }
    }
    for (&(r, s, t), nu) in &p.cubic {
        if xv(r) * xv(s) * xv(t) > 0 {
            acc -= nu;
        } else {
            acc += nu;
        }
    }
    Ok(acc)
}

/// First two moments of `u` under uniformly random assignments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Moments {
    #[serde(with = "crate::rational::serde_fraction")]
    pub mean: Rational,
    #[serde(with = "crate::rational::serde_fraction")]
    pub second_moment: Rational,
    #[serde(with = "crate::rational::serde_fraction")]
    pub variance: Rational,
    /// `E(u²)/E(u)²`; absent when `E(u) = 0`.
    #[serde(with = "crate::rational::serde_fraction::option")]
    pub beta: Option<Rational>,
}

impl Moments {
    /// Builds moments from `E(u)` and `E(u²)`.
    pub fn from_raw(mean: Rational, second_moment: Rational) -> Moments {
        let variance = &second_moment - &mean * &mean;
        let beta = (!mean.is_zero()).then(|| &second_moment / (&mean * &mean));
        Moments { mean, second_moment, variance, beta }
    }

    /// Builds moments from `E(u)` and the variance.
    pub fn from_mean_variance(mean: Rational, variance: Rational) -> Moments {
        let second_moment = &variance + &mean * &mean;
        Moments::from_raw(mean, second_moment)
    }

    pub fn to_f64(&self) -> MomentsF64 {
        use crate::rational::to_f64;
        MomentsF64 {
            mean: to_f64(&self.mean),
            second_moment: to_f64(&self.second_moment),
            variance: to_f64(&self.variance),
        }
    }
}

/// Exact moments via the sparse pairwise-overlap formula.
///
/// Only clause pairs sharing a variable deviate from independence, so
/// `σ² = Σ_{(i,j) sharing a variable} (p_ij − 2^{-k_i-k_j})` with the diagonal
/// included. The work is proportional to the number of overlapping pairs.
pub fn moments(f: &CnfFormula) -> Moments {
    let clauses = f.clauses();
    let mean: Rational = clauses.iter().map(|c| dyadic(c.width())).sum();
    if clauses.is_empty() {
        return Moments::from_raw(mean, Rational::zero());
    }
    let scale = 2 * f.max_width();
    let occurrences = occurrence_lists(f);

    // Every term is a multiple of 2^-scale; accumulate numerators exactly.
    let numerator: BigInt = (0..clauses.len())
        .into_par_iter()
        .map(|i| {
            let ci = &clauses[i];
            let ki = ci.width();
            let mut acc = BigInt::one() << (scale - ki);
            acc -= BigInt::one() << (scale - 2 * ki);
            let mut partners: Vec<usize> = ci
                .literals()
                .iter()
                .flat_map(|l| occurrences[l.var() - 1].iter().copied())
                .filter(|&j| j > i)
                .collect();
            partners.sort_unstable();
            partners.dedup();
            for j in partners {
                let cj = &clauses[j];
                let independent = BigInt::one() << (scale - ki - cj.width());
                let joint = match union_width(ci, cj) {
                    Some(w) => BigInt::one() << (scale - w),
                    None => BigInt::zero(),
                };
                acc += (joint - independent) * 2;
            }
            acc
        })
        .reduce(BigInt::zero, |a, b| a + b);

    let variance = Rational::new(numerator, BigInt::one() << scale);
    Moments::from_mean_variance(mean, variance)
}

/// `E(u²) = Σ_{i,j} p_ij` over all ordered clause pairs. Quadratic in `m`;
/// kept as an independent route for cross-checking [`moments`].
pub fn second_moment_all_pairs(f: &CnfFormula) -> Rational {
    let clauses = f.clauses();
    let mut total = Rational::zero();
    for ci in clauses {
        for cj in clauses {
            if let Some(w) = union_width(ci, cj) {
                total += dyadic(w);
            }
        }
    }
    total
}

/// Number of distinct variables in `a ∪ b`, or `None` if some variable
/// appears with opposite signs (the clauses cannot both be false).
fn union_width(a: &Clause, b: &Clause) -> Option<usize> {
    let (la, lb) = (a.literals(), b.literals());
    let (mut i, mut j, mut shared) = (0, 0, 0);
    while i < la.len() && j < lb.len() {
        match la[i].var().cmp(&lb[j].var()) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if la[i].sign() != lb[j].sign() {
                    return None;
                }
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    Some(la.len() + lb.len() - shared)
}

fn occurrence_lists(f: &CnfFormula) -> Vec<Vec<usize>> {
    let mut occ = vec![Vec::new(); f.num_vars()];
    for (j, c) in f.clauses().iter().enumerate() {
        for l in c.literals() {
            occ[l.var() - 1].push(j);
        }
    }
    occ
}

/// Moments in binary floating point, for ensembles too large for exact mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentsF64 {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

impl MomentsF64 {
    pub fn beta(&self) -> Option<f64> {
        (self.mean > 0.0).then(|| self.second_moment / (self.mean * self.mean))
    }

    pub fn basic_bound(&self) -> f64 {
        if self.mean > 0.0 {
            self.variance / self.second_moment
        } else {
            1.0
        }
    }
}

pub fn moments_f64(f: &CnfFormula) -> MomentsF64 {
    let clauses = f.clauses();
    let weight = |k: usize| 0.5f64.powi(k as i32);
    let mean: f64 = clauses.iter().map(|c| weight(c.width())).sum();
    let occurrences = occurrence_lists(f);
    let variance: f64 = (0..clauses.len())
        .into_par_iter()
        .map(|i| {
            let ci = &clauses[i];
            let qi = weight(ci.width());
            let mut acc = qi - qi * qi;
            let mut partners: Vec<usize> = ci
                .literals()
                .iter()
                .flat_map(|l| occurrences[l.var() - 1].iter().copied())
                .filter(|&j| j > i)
                .collect();
            partners.sort_unstable();
            partners.dedup();
            for j in partners {
                let cj = &clauses[j];
                let joint = union_width(ci, cj).map_or(0.0, weight);
                acc += 2.0 * (joint - qi * weight(cj.width()));
            }
            acc
        })
        .sum();
    let variance = variance.max(0.0);
    MomentsF64 { mean, second_moment: variance + mean * mean, variance }
}

/// True when `σ² ≥ 0`, `E(u²) ≥ E(u)²`, `E(u) ≥ 0` and `E(u) = 0` only for `m = 0`.
pub fn moments_are_consistent(f: &CnfFormula, m: &Moments) -> bool {
    !m.variance.is_negative()
        && !m.mean.is_negative()
        && m.second_moment >= &m.mean * &m.mean
        && (m.mean.is_zero() == (f.num_clauses() == 0))
}
