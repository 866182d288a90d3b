//! Minimizing the sharpened bound over the cutoff `a` with the exact
//! distribution.
//!
//! Everything is parameterized by `t = a²`. On each interval
//! `M² < t ≤ (M+1)²` the strict floor of `a` is `M`, and with
//! `S0 = Σ_{k≤M} v_k`, `S2 = Σ_{k≤M} k² v_k`
//!
//! ```text
//! a²Δ≤ = S0·t − S2,    f(t) = 1 − S0 + S2/t − E(u)²/(E(u²) − S2 + S0·t)
//! ```
//!
//! Any `t > 0` evaluated exactly gives a valid bound, so candidates only
//! have to be good, not exact: the stationary point of each interval is
//! located in floating point and then rounded to a rational.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{require_mean, BoundsError};
use crate::frustration::Moments;
use crate::oracle::UDistribution;
use crate::rational::{clamp_unit, from_f64, strict_floor_sqrt, to_f64, Rational};

/// Grid points per unit interval of `a`.
pub const DEFAULT_SCAN_RESOLUTION: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutoffScan {
    /// Square of the best cutoff found.
    #[serde(with = "crate::rational::serde_fraction")]
    pub a_squared: Rational,
    #[serde(with = "crate::rational::serde_fraction")]
    pub value: Rational,
    pub evaluations: usize,
}

/// Unclamped `f(a) = 1 − Δ≤(a) − E(u)²/(E(u²) + a²Δ≤(a))` with exact `Δ≤`.
pub fn cutoff_objective(mom: &Moments, dist: &UDistribution, a_squared: &Rational) -> Result<Rational, BoundsError> {
    require_mean(mom)?;
    if !a_squared.is_positive() {
        return Err(BoundsError::NonPositiveCutoff(a_squared.to_string()));
    }
    let scaled = dist.a2_delta_leq(a_squared);
    let delta = &scaled / a_squared;
    Ok(Rational::one() - delta - &mom.mean * &mom.mean / (&mom.second_moment + scaled))
}

/// Partial sums for one interval.
struct Piece {
    m: u64,
    s0: Rational,
    s2: Rational,
}

impl Piece {
    fn eval(&self, mom: &Moments, t: &Rational) -> Rational {
        let mean_sq = &mom.mean * &mom.mean;
        Rational::one() - &self.s0 + &self.s2 / t - mean_sq / (&mom.second_moment - &self.s2 + &self.s0 * t)
    }

    fn contains(&self, t: &Rational) -> bool {
        let lo = Rational::from_integer(BigInt::from(self.m * self.m));
        let hi = Rational::from_integer(BigInt::from((self.m + 1) * (self.m + 1)));
        *t > lo && *t <= hi
    }

    /// Stationary point of `f` in `t`: `t* = √S2 (E(u²) − S2) / (E(u)√S0 − S0√S2)`.
    fn stationary(&self, mom: &Moments) -> Option<Rational> {
        if self.m == 1 {
            // Exact: S0 = S2 = v_1.
            let excess = &mom.mean - &self.s0;
            if !excess.is_positive() || self.s0.is_zero() {
                return None;
            }
            return Some((&mom.second_moment - &self.s0) / excess);
        }
        let (s0, s2) = (to_f64(&self.s0), to_f64(&self.s2));
        let (e, e2) = (to_f64(&mom.mean), to_f64(&mom.second_moment));
        let denom = e * s0.sqrt() - s0 * s2.sqrt();
        if s0 <= 0.0 || denom <= 0.0 {
            return None;
        }
        let t = s2.sqrt() * (e2 - s2) / denom;
        t.is_finite().then(|| from_f64(t)).flatten()
    }
}

fn pieces(dist: &UDistribution, u_max: usize) -> Vec<Piece> {
    let mut s0 = Rational::zero();
    let mut s2 = Rational::zero();
    let mut out = Vec::with_capacity(u_max + 1);
    out.push(Piece { m: 0, s0: s0.clone(), s2: s2.clone() });
    for k in 1..=u_max {
        let v = dist.probability(k);
        s2 += &v * Rational::from_integer(BigInt::from(k * k));
        s0 += v;
        out.push(Piece { m: k as u64, s0: s0.clone(), s2: s2.clone() });
    }
    out
}

/// Scans `a ∈ [1, u_max + 1]` on a grid of `resolution` points per unit,
/// plus the medium cutoff and each interval's stationary point, and returns
/// the smallest bound. `a = 1` gives the basic bound, so the result never
/// exceeds it.
pub fn cutoff_scan(mom: &Moments, dist: &UDistribution, resolution: u32) -> Result<CutoffScan, BoundsError> {
    require_mean(mom)?;
    if dist.counts.is_empty() {
        return Err(BoundsError::Degenerate("empty distribution"));
    }
    let resolution = resolution.max(1);
    let u_max = dist.max_u().max(1);
    let pieces = pieces(dist, u_max);
    let piece_for = |t: &Rational| {
        let m = (strict_floor_sqrt(t) as usize).min(u_max);
        &pieces[m]
    };

    let mut candidates: Vec<Rational> = vec![Rational::one()];
    let step = Rational::new(BigInt::one(), BigInt::from(resolution));
    let mut a = Rational::one();
    for _ in 0..(resolution as usize * u_max) {
        a += &step;
        candidates.push(&a * &a);
    }
    let medium = &mom.second_moment / &mom.mean;
    candidates.push(&medium * &medium);
    for piece in &pieces[1..] {
        if let Some(t) = piece.stationary(mom) {
            if piece.contains(&t) {
                candidates.push(t);
            }
        }
    }

    let mut best: Option<(Rational, Rational)> = None;
    for t in &candidates {
        let value = clamp_unit(piece_for(t).eval(mom, t)).0;
        if best.as_ref().is_none_or(|(_, v)| value < *v) {
            best = Some((t.clone(), value));
        }
    }
    let (a_squared, value) = best.expect("at least one candidate");
    Ok(CutoffScan { a_squared, value, evaluations: candidates.len() })
}
