//! Upper bounds on `v_0`, the fraction of satisfying assignments.
//!
//! The moment bounds need only `E(u)` and `E(u²)`, both polynomial-time
//! computable. The cutoff bounds additionally use low-frustration
//! probabilities (`v_1`, `v_≤`, `Δ≤`) which in general require the full
//! distribution; with exact inputs they are proven inequalities, with
//! externally estimated inputs they are only conditional. The large-instance
//! expressions drop higher-order terms and are estimates, never certificates.

mod report;
mod scan;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::frustration::Moments;
use crate::rational::{clamp_unit, strict_floor, Rational};

pub use report::{
    distribution_entries, external_entries, moments_only_entries, sat_verdict, BoundEntry, BoundParams,
    BoundReport, ExternalEstimates, Inputs, Soundness, Target, Verdict,
};
pub use scan::{cutoff_objective, cutoff_scan, CutoffScan, DEFAULT_SCAN_RESOLUTION};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("E(u) = 0 (no clauses); the bound is undefined")]
    ZeroMean,
    #[error("Δ≤ must lie in [0, 1), got {0}")]
    InvalidDelta(String),
    #[error("cutoff must be positive, got {0}")]
    NonPositiveCutoff(String),
    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(String),
    #[error("tail bound needs k > E(u); k = {k}, E(u) = {mean}")]
    TailRegime { k: u64, mean: String },
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("no sound bound on v_0 among the entries")]
    NoSoundBound,
}

fn require_mean(mom: &Moments) -> Result<(), BoundsError> {
    if mom.mean.is_positive() {
        Ok(())
    } else {
        Err(BoundsError::ZeroMean)
    }
}

fn require_probability(p: &Rational) -> Result<(), BoundsError> {
    if p.is_negative() || *p > Rational::one() {
        Err(BoundsError::InvalidProbability(p.to_string()))
    } else {
        Ok(())
    }
}

fn from_u64(k: u64) -> Rational {
    Rational::from_integer(BigInt::from(k))
}

/// `v_0 ≤ σ²/(σ² + E(u)²) = 1 − E(u)²/E(u²)`; 1 for the empty formula.
pub fn basic_bound(mom: &Moments) -> Rational {
    if mom.mean.is_zero() {
        return Rational::one();
    }
    &mom.variance / &mom.second_moment
}

/// `v_k ≤ σ²/(σ² + (E(u) − k)²)`, valid for every `k ≥ 0`. At `k = 0` this
/// is [`basic_bound`]; a zero denominator yields the vacuous value 1.
pub fn cantelli_vk(mom: &Moments, k: u64) -> Rational {
    let gap = &mom.mean - from_u64(k);
    let denom = &mom.variance + &gap * &gap;
    if denom.is_zero() {
        return Rational::one();
    }
    clamp_unit(&mom.variance / denom).0
}

/// `prob(u ≥ k) ≤ σ²/(σ² + (E(u) − k)²)`; only for `k > E(u)`.
pub fn cantelli_tail(mom: &Moments, k: u64) -> Result<Rational, BoundsError> {
    if from_u64(k) <= mom.mean {
        return Err(BoundsError::TailRegime { k, mean: mom.mean.to_string() });
    }
    Ok(cantelli_vk(mom, k))
}

/// Sharpened Cauchy–Schwarz bound `1 − Δ≤ − E(u)²/(E(u²) + a²Δ≤)`, clamped.
pub fn sharpened_bound(mom: &Moments, delta: &Rational, a: &Rational) -> Result<Rational, BoundsError> {
    if !a.is_positive() {
        return Err(BoundsError::NonPositiveCutoff(a.to_string()));
    }
    sharpened_bound_sq(mom, delta, &(a * a))
}

/// [`sharpened_bound`] with the cutoff given by its square.
pub fn sharpened_bound_sq(mom: &Moments, delta: &Rational, a_squared: &Rational) -> Result<Rational, BoundsError> {
    Ok(clamp_unit(sharpened_raw(mom, delta, a_squared)?).0)
}

pub(crate) fn sharpened_raw(mom: &Moments, delta: &Rational, a_squared: &Rational) -> Result<Rational, BoundsError> {
    require_mean(mom)?;
    if !a_squared.is_positive() {
        return Err(BoundsError::NonPositiveCutoff(a_squared.to_string()));
    }
    if delta.is_negative() || *delta >= Rational::one() {
        return Err(BoundsError::InvalidDelta(delta.to_string()));
    }
    let mean_sq = &mom.mean * &mom.mean;
    Ok(Rational::one() - delta - mean_sq / (&mom.second_moment + a_squared * delta))
}

/// Cutoff parameters: `a`, `M` = strict floor of `a`, `μ = E(u)/a`, `β = E(u²)/E(u)²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutoffParams {
    #[serde(with = "crate::rational::serde_fraction")]
    pub a: Rational,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(with = "crate::rational::serde_fraction")]
    pub mu: Rational,
    #[serde(with = "crate::rational::serde_fraction")]
    pub beta: Rational,
}

impl CutoffParams {
    pub fn new(mom: &Moments, a: Rational) -> Result<Self, BoundsError> {
        require_mean(mom)?;
        if !a.is_positive() {
            return Err(BoundsError::NonPositiveCutoff(a.to_string()));
        }
        let m = strict_floor(&a).to_u64().unwrap_or(0);
        let mu = &mom.mean / &a;
        let beta = mom.beta.clone().expect("mean is positive");
        Ok(CutoffParams { a, m, mu, beta })
    }

    /// The cutoff `a = E(u) + σ²/E(u) = E(u²)/E(u)`, where `βμ = 1`.
    pub fn medium(mom: &Moments) -> Result<Self, BoundsError> {
        require_mean(mom)?;
        CutoffParams::new(mom, &mom.second_moment / &mom.mean)
    }
}

/// `g(x) = 1 − (1/β)(1 + x²/(1 + x))`, decreasing for `x ≥ 0`.
pub fn medium_cutoff_g(beta: &Rational, x: &Rational) -> Rational {
    let one = Rational::one();
    &one - (&one + x * x / (&one + x)) / beta
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MediumCutoff {
    pub params: CutoffParams,
    #[serde(with = "crate::rational::serde_fraction")]
    pub v_le: Rational,
    #[serde(with = "crate::rational::serde_fraction")]
    pub x_app: Rational,
    #[serde(with = "crate::rational::serde_fraction")]
    pub bound: Rational,
    #[serde(skip)]
    pub raw: Rational,
}

/// Bound at the medium cutoff with `a²Δ≤` under-approximated by
/// `(a² − M²) v_≤`, `v_≤ = v_1 + … + v_M`. Since `g` is decreasing, any
/// under-estimate of `v_≤` keeps the bound valid.
pub fn medium_cutoff_bound(mom: &Moments, v_le: &Rational) -> Result<MediumCutoff, BoundsError> {
    require_probability(v_le)?;
    let params = CutoffParams::medium(mom)?;
    let m_sq = from_u64(params.m * params.m);
    let x_app = (&params.beta - m_sq / &mom.second_moment) * v_le;
    let raw = medium_cutoff_g(&params.beta, &x_app);
    let bound = clamp_unit(raw.clone()).0;
    Ok(MediumCutoff { params, v_le: v_le.clone(), x_app, bound, raw })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptimizedCutoff {
    /// Stationary point `a_min² = (E(u²) − v_1)/(E(u) − v_1)`.
    #[serde(with = "crate::rational::serde_fraction")]
    pub a_squared: Rational,
    #[serde(with = "crate::rational::serde_fraction")]
    pub f_min: Rational,
    /// True when `1 < a_min² < 4`, i.e. the minimum lies where `M = 1`.
    pub valid: bool,
    #[serde(skip)]
    pub raw: Rational,
}

/// Optimal cutoff when `M = 1`: `f_min = 1 − v_1 − (E(u) − v_1)²/(E(u²) − v_1)`.
pub fn optimized_cutoff_m1(mom: &Moments, v1: &Rational) -> Result<OptimizedCutoff, BoundsError> {
    require_probability(v1)?;
    if mom.mean <= *v1 {
        return Err(BoundsError::Degenerate("E(u) <= v_1"));
    }
    if mom.second_moment <= *v1 {
        return Err(BoundsError::Degenerate("E(u²) <= v_1"));
    }
    let excess = &mom.mean - v1;
    let second = &mom.second_moment - v1;
    let a_squared = &second / &excess;
    let raw = Rational::one() - v1 - &excess * &excess / &second;
    let valid = a_squared > Rational::one() && a_squared < Rational::from_integer(BigInt::from(4));
    Ok(OptimizedCutoff { a_squared, f_min: clamp_unit(raw.clone()).0, valid, raw })
}

/// Cauchy–Schwarz with the indicator of `u > 1`:
/// `v_0 ≤ 1 − v_1 − (E(u) − v_1)²/E(u²)`.
pub fn v1_split_bound(mom: &Moments, v1: &Rational) -> Result<Rational, BoundsError> {
    Ok(clamp_unit(v1_split_raw(mom, v1)?).0)
}

pub(crate) fn v1_split_raw(mom: &Moments, v1: &Rational) -> Result<Rational, BoundsError> {
    require_probability(v1)?;
    if mom.second_moment.is_zero() {
        return Ok(Rational::one() - v1);
    }
    let excess = &mom.mean - v1;
    Ok(Rational::one() - v1 - &excess * &excess / &mom.second_moment)
}

/// Large-instance estimates. These drop higher-order corrections and are
/// not sound bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AsymptoticEstimates {
    /// `r = σ²/E(u)²`.
    #[serde(with = "crate::rational::serde_fraction")]
    pub ratio: Rational,
    /// `r − v_1`, unclamped.
    #[serde(with = "crate::rational::serde_fraction::option")]
    pub minus_v1: Option<Rational>,
    /// `r − 4α v_≤ / E(u)²`, unclamped.
    #[serde(with = "crate::rational::serde_fraction::option")]
    pub minus_tail: Option<Rational>,
    /// `α` actually used (defaults to `(a − M)²` at the medium cutoff).
    #[serde(with = "crate::rational::serde_fraction::option")]
    pub alpha: Option<Rational>,
}

pub fn asymptotic_bounds(
    mom: &Moments,
    v1: Option<&Rational>,
    v_le: Option<&Rational>,
    alpha: Option<&Rational>,
) -> Result<AsymptoticEstimates, BoundsError> {
    require_mean(mom)?;
    let mean_sq = &mom.mean * &mom.mean;
    let ratio = &mom.variance / &mean_sq;
    let minus_v1 = v1.map(|v| &ratio - v);
    let (minus_tail, alpha) = match v_le {
        Some(v) => {
            let alpha = match alpha {
                Some(a) => a.clone(),
                None => {
                    let p = CutoffParams::medium(mom)?;
                    let frac = &p.a - from_u64(p.m);
                    &frac * &frac
                }
            };
            (Some(&ratio - from_u64(4) * &alpha * v / &mean_sq), Some(alpha))
        }
        None => (None, alpha.cloned()),
    };
    Ok(AsymptoticEstimates { ratio, minus_v1, minus_tail, alpha })
}
