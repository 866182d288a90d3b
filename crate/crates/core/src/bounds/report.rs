use std::fmt;

use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive};
use serde::{Serialize, Serializer};

use super::{
    asymptotic_bounds, basic_bound, cantelli_vk, cutoff_scan, medium_cutoff_bound, optimized_cutoff_m1,
    sharpened_raw, v1_split_raw, BoundsError, CutoffParams, DEFAULT_SCAN_RESOLUTION,
};
use crate::frustration::Moments;
use crate::oracle::UDistribution;
use crate::rational::{clamp_unit, decimal_up, floor_scaled, fraction_string, pow2, Rational};

/// How much an entry can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Soundness {
    /// A proven inequality evaluated on exact inputs.
    Sound,
    /// A proven inequality evaluated on externally supplied probabilities.
    Conditional,
    /// A large-instance expression with dropped correction terms.
    Estimate,
}

/// The probability an entry bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `v_0`, the satisfying fraction.
    Solutions,
    /// `v_k` for a single `k`.
    Exactly(u64),
    /// `prob(u ≥ k)`.
    AtLeast(u64),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Solutions => f.write_str("v_0"),
            Target::Exactly(k) => write!(f, "v_{k}"),
            Target::AtLeast(k) => write!(f, "P(u>={k})"),
        }
    }
}

impl Serialize for Target {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inputs {
    MomentsOnly,
    Distribution,
    External,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BoundParams {
    #[serde(with = "crate::rational::serde_fraction::option")]
    pub a: Option<Rational>,
    #[serde(with = "crate::rational::serde_fraction::option", skip_serializing_if = "Option::is_none")]
    pub a_squared: Option<Rational>,
    #[serde(rename = "M")]
    pub m: Option<u64>,
    #[serde(with = "crate::rational::serde_fraction::option")]
    pub v1: Option<Rational>,
    #[serde(with = "crate::rational::serde_fraction::option")]
    pub v_le: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundEntry {
    pub name: String,
    pub target: Target,
    /// Value clamped to `[0, 1]`.
    pub value: Rational,
    /// Value before clamping.
    pub raw: Rational,
    pub soundness: Soundness,
    pub inputs: Inputs,
    pub params: BoundParams,
    /// `floor(2^n · value)` for sound and conditional bounds on `v_0`.
    pub max_solutions: Option<BigUint>,
}

impl BoundEntry {
    fn new(name: impl Into<String>, target: Target, raw: Rational, soundness: Soundness, inputs: Inputs) -> Self {
        let value = clamp_unit(raw.clone()).0;
        BoundEntry {
            name: name.into(),
            target,
            value,
            raw,
            soundness,
            inputs,
            params: BoundParams::default(),
            max_solutions: None,
        }
    }

    fn with_params(mut self, params: BoundParams) -> Self {
        self.params = params;
        self
    }

    pub fn clamped(&self) -> bool {
        self.value != self.raw
    }

    pub fn is_sound(&self) -> bool {
        self.soundness == Soundness::Sound
    }

    /// Sound or conditional bound on the satisfying fraction.
    pub fn bounds_solutions(&self) -> bool {
        self.target == Target::Solutions && self.soundness != Soundness::Estimate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SatPossible,
    UnsatCertified,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::SatPossible => "SAT-possible",
            Verdict::UnsatCertified => "UNSAT-certified",
        })
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub n: usize,
    pub m: usize,
    pub entries: Vec<BoundEntry>,
    pub verdict: Verdict,
}

impl BoundReport {
    pub fn get(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// The smallest sound bound on `v_0`.
    pub fn best_sound(&self) -> Option<&BoundEntry> {
        self.entries
            .iter()
            .filter(|e| e.is_sound() && e.target == Target::Solutions)
            .min_by(|a, b| a.value.cmp(&b.value))
    }

    pub fn clamped_entries(&self) -> impl Iterator<Item = &BoundEntry> {
        self.entries.iter().filter(|e| e.clamped())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let bounds: Vec<_> = self
            .entries
            .iter()
            .map(|e| {
                serde_json::json!({
                    "name": e.name,
                    "target": e.target,
                    "value_num": e.value.numer().to_string(),
                    "value_den": e.value.denom().to_string(),
                    "value": fraction_string(&e.value),
                    "decimal": decimal_up(&e.value, 6),
                    "sound": e.is_sound(),
                    "soundness": e.soundness,
                    "inputs": e.inputs,
                    "clamped": e.clamped(),
                    "params": e.params,
                    "max_solutions": e.max_solutions.as_ref().map(|c| c.to_string()),
                })
            })
            .collect();
        let max_solutions: serde_json::Map<String, serde_json::Value> = self
            .entries
            .iter()
            .filter(|e| e.is_sound())
            .filter_map(|e| e.max_solutions.as_ref().map(|c| (e.name.clone(), c.to_string().into())))
            .collect();
        serde_json::json!({
            "n": self.n,
            "m": self.m,
            "bounds": bounds,
            "max_solutions": max_solutions,
            "verdict": self.verdict,
        })
    }
}

/// Fills in solution caps and decides the verdict. Only sound bounds on
/// `v_0` can certify unsatisfiability: it is certified iff some such bound
/// is below `2^{-n}`.
pub fn sat_verdict(mut entries: Vec<BoundEntry>, n: usize, m: usize) -> Result<BoundReport, BoundsError> {
    let scale = pow2(n);
    for e in &mut entries {
        e.max_solutions = e.bounds_solutions().then(|| floor_scaled(&e.value, &scale));
    }
    let sound: Vec<&BoundEntry> =
        entries.iter().filter(|e| e.is_sound() && e.target == Target::Solutions).collect();
    if sound.is_empty() {
        return Err(BoundsError::NoSoundBound);
    }
    let certified = sound.iter().any(|e| e.max_solutions.as_ref().is_some_and(|c| c.bits() == 0));
    let verdict = if certified { Verdict::UnsatCertified } else { Verdict::SatPossible };
    Ok(BoundReport { n, m, entries, verdict })
}

/// Bounds computable from the two moments alone.
pub fn moments_only_entries(mom: &Moments) -> Vec<BoundEntry> {
    let mut out = vec![BoundEntry::new("basic", Target::Solutions, basic_bound(mom), Soundness::Sound, Inputs::MomentsOnly)];
    if !mom.mean.is_positive() {
        return out;
    }
    out.push(BoundEntry::new("cantelli_v1", Target::Exactly(1), cantelli_vk(mom, 1), Soundness::Sound, Inputs::MomentsOnly));
    let k_tail = mom.mean.floor().to_integer().to_u64().unwrap_or(0) + 1;
    out.push(BoundEntry::new(
        format!("cantelli_tail_{k_tail}"),
        Target::AtLeast(k_tail),
        cantelli_vk(mom, k_tail),
        Soundness::Sound,
        Inputs::MomentsOnly,
    ));
    if let Ok(est) = asymptotic_bounds(mom, None, None, None) {
        out.push(BoundEntry::new("ratio_estimate", Target::Solutions, est.ratio, Soundness::Estimate, Inputs::MomentsOnly));
    }
    out
}

/// Cutoff bounds evaluated with the exact distribution.
pub fn distribution_entries(mom: &Moments, dist: &UDistribution) -> Result<Vec<BoundEntry>, BoundsError> {
    if !mom.mean.is_positive() {
        return Ok(Vec::new());
    }
    let sound = |name: &str, raw: Rational| BoundEntry::new(name, Target::Solutions, raw, Soundness::Sound, Inputs::Distribution);
    let mut out = Vec::new();
    let medium = CutoffParams::medium(mom)?;
    let v1 = dist.probability(1);
    let v_le = dist.v_le(medium.m as usize);

    let a_sq = &medium.a * &medium.a;
    let delta = dist.delta_leq(&medium.a).map_err(|_| BoundsError::NonPositiveCutoff(medium.a.to_string()))?;
    out.push(sound("sharpened", sharpened_raw(mom, &delta, &a_sq)?).with_params(BoundParams {
        a: Some(medium.a.clone()),
        m: Some(medium.m),
        ..Default::default()
    }));

    let mc = medium_cutoff_bound(mom, &v_le)?;
    out.push(sound("medium_cutoff", mc.raw).with_params(BoundParams {
        a: Some(medium.a.clone()),
        m: Some(medium.m),
        v_le: Some(v_le.clone()),
        ..Default::default()
    }));

    if let Ok(oc) = optimized_cutoff_m1(mom, &v1) {
        if oc.valid {
            out.push(sound("optimized_cutoff", oc.raw).with_params(BoundParams {
                a_squared: Some(oc.a_squared),
                m: Some(1),
                v1: Some(v1.clone()),
                ..Default::default()
            }));
        }
    }

    out.push(sound("v1_split", v1_split_raw(mom, &v1)?).with_params(BoundParams {
        v1: Some(v1.clone()),
        ..Default::default()
    }));

    let scan = cutoff_scan(mom, dist, DEFAULT_SCAN_RESOLUTION)?;
    out.push(sound("cutoff_scan", scan.value).with_params(BoundParams {
        a_squared: Some(scan.a_squared),
        ..Default::default()
    }));

    let est = asymptotic_bounds(mom, Some(&v1), Some(&v_le), None)?;
    if let Some(raw) = est.minus_v1 {
        out.push(
            BoundEntry::new("ratio_minus_v1_estimate", Target::Solutions, raw, Soundness::Estimate, Inputs::Distribution)
                .with_params(BoundParams { v1: Some(v1.clone()), ..Default::default() }),
        );
    }
    if let Some(raw) = est.minus_tail {
        out.push(
            BoundEntry::new("ratio_minus_tail_estimate", Target::Solutions, raw, Soundness::Estimate, Inputs::Distribution)
                .with_params(BoundParams {
                    a: Some(medium.a.clone()),
                    m: Some(medium.m),
                    v_le: Some(v_le),
                    ..Default::default()
                }),
        );
    }
    Ok(out)
}

/// Probabilities supplied from outside the oracle, e.g. estimates.
#[derive(Debug, Clone, Default)]
pub struct ExternalEstimates {
    pub v1: Option<Rational>,
    pub v_le: Option<Rational>,
}

/// Cutoff bounds from external `v_1` / `v_≤`; marked conditional because
/// they are only as good as the supplied probabilities.
pub fn external_entries(mom: &Moments, ext: &ExternalEstimates) -> Result<Vec<BoundEntry>, BoundsError> {
    let mut out = Vec::new();
    if !mom.mean.is_positive() {
        return Ok(out);
    }
    let conditional = |name: &str, raw: Rational| BoundEntry::new(name, Target::Solutions, raw, Soundness::Conditional, Inputs::External);
    if let Some(v_le) = &ext.v_le {
        let mc = medium_cutoff_bound(mom, v_le)?;
        let params = BoundParams { a: Some(mc.params.a.clone()), m: Some(mc.params.m), v_le: Some(v_le.clone()), ..Default::default() };
        out.push(conditional("medium_cutoff", mc.raw).with_params(params));
    }
    if let Some(v1) = &ext.v1 {
        if let Ok(oc) = optimized_cutoff_m1(mom, v1) {
            if oc.valid {
                let params = BoundParams { a_squared: Some(oc.a_squared), m: Some(1), v1: Some(v1.clone()), ..Default::default() };
                out.push(conditional("optimized_cutoff", oc.raw).with_params(params));
            }
        }
        let params = BoundParams { v1: Some(v1.clone()), ..Default::default() };
        out.push(conditional("v1_split", v1_split_raw(mom, v1)?).with_params(params));
    }
    Ok(out)
}

impl BoundReport {
    /// Moment bounds only; polynomial time.
    pub fn from_moments(n: usize, m: usize, mom: &Moments) -> BoundReport {
        sat_verdict(moments_only_entries(mom), n, m).expect("basic bound is always present")
    }

    /// Moment bounds plus every cutoff bound on the exact distribution.
    pub fn with_distribution(n: usize, m: usize, mom: &Moments, dist: &UDistribution) -> Result<BoundReport, BoundsError> {
        let mut entries = moments_only_entries(mom);
        entries.extend(distribution_entries(mom, dist)?);
        sat_verdict(entries, n, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::CnfFormula;
    use crate::frustration::moments;
    use crate::instances;
    use crate::oracle::{enumerate, OracleConfig};
    use crate::rational::{int, rat};

    fn full_report(f: &CnfFormula) -> BoundReport {
        let mom = moments(f);
        let dist = enumerate(f, OracleConfig::default()).unwrap();
        BoundReport::with_distribution(f.num_vars(), f.num_clauses(), &mom, &dist).unwrap()
    }

    #[test]
    fn moments_only_report_for_unique_instance() {
        let f = instances::four_var_unique();
        let r = BoundReport::from_moments(4, 8, &moments(&f));
        let basic = r.get("basic").unwrap();
        assert_eq!(basic.value, rat(5, 23));
        assert_eq!(basic.max_solutions, Some(BigUint::from(3u32)));
        assert_eq!(r.verdict, Verdict::SatPossible);
        let est = r.get("ratio_estimate").unwrap();
        assert_eq!(est.soundness, Soundness::Estimate);
        assert_eq!(est.max_solutions, None);
        assert_eq!(r.get("cantelli_tail_2").unwrap().value, rat(5, 7));
    }

    #[test]
    fn optimized_cutoff_predicts_one_solution() {
        let r = full_report(&instances::four_var_unique());
        let oc = r.get("optimized_cutoff").unwrap();
        assert_eq!(oc.value, rat(3, 38));
        assert_eq!(oc.max_solutions, Some(BigUint::from(1u32)));
        assert_eq!(r.best_sound().unwrap().value, rat(3, 38));
        assert_eq!(r.verdict, Verdict::SatPossible);
    }

    #[test]
    fn unsat_variant_is_certified() {
        let r = full_report(&instances::four_var_unsat());
        assert_eq!(r.get("optimized_cutoff").unwrap().value, rat(3, 136));
        assert_eq!(r.get("optimized_cutoff").unwrap().max_solutions, Some(BigUint::from(0u32)));
        assert_eq!(r.get("basic").unwrap().max_solutions, Some(BigUint::from(2u32)));
        assert_eq!(r.verdict, Verdict::UnsatCertified);
    }

    #[test]
    fn empty_formula_allows_everything() {
        let f = CnfFormula::empty(3);
        let r = BoundReport::from_moments(3, 0, &moments(&f));
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.get("basic").unwrap().max_solutions, Some(BigUint::from(8u32)));
        assert_eq!(r.verdict, Verdict::SatPossible);
    }

    #[test]
    fn estimates_never_certify() {
        let e = BoundEntry::new("ratio_estimate", Target::Solutions, int(0), Soundness::Estimate, Inputs::MomentsOnly);
        let basic = BoundEntry::new("basic", Target::Solutions, rat(1, 2), Soundness::Sound, Inputs::MomentsOnly);
        let r = sat_verdict(vec![e.clone(), basic], 4, 1).unwrap();
        assert_eq!(r.verdict, Verdict::SatPossible);
        assert_eq!(sat_verdict(vec![e], 4, 1), Err(BoundsError::NoSoundBound));
    }

    #[test]
    fn clamping_is_reported() {
        let r = full_report(&instances::four_var_unique());
        let e = r.get("ratio_minus_v1_estimate").unwrap();
        assert!(e.clamped());
        assert_eq!(e.value, int(0));
        assert!(r.clamped_entries().any(|c| c.name == "ratio_minus_v1_estimate"));
    }

    #[test]
    fn external_inputs_are_conditional() {
        let f = instances::four_var_unique();
        let mom = moments(&f);
        let ext = ExternalEstimates { v1: Some(rat(1, 2)), v_le: Some(rat(1, 2)) };
        let mut entries = moments_only_entries(&mom);
        entries.extend(external_entries(&mom, &ext).unwrap());
        let r = sat_verdict(entries, 4, 8).unwrap();
        let oc = r.get("optimized_cutoff").unwrap();
        assert_eq!(oc.soundness, Soundness::Conditional);
        assert_eq!(oc.max_solutions, Some(BigUint::from(1u32)));
        // A conditional entry alone could never certify.
        assert!(r.best_sound().unwrap().name == "basic");
    }

    #[test]
    fn json_schema_fields() {
        let r = full_report(&instances::four_var_unique());
        let json = r.to_json();
        assert_eq!(json["n"], 4);
        assert_eq!(json["m"], 8);
        assert_eq!(json["verdict"], "SAT-possible");
        let basic = &json["bounds"][0];
        assert_eq!(basic["name"], "basic");
        assert_eq!(basic["value_num"], "5");
        assert_eq!(basic["value_den"], "23");
        assert_eq!(basic["sound"], true);
        assert!(basic["params"].as_object().unwrap().contains_key("M"));
        assert_eq!(json["max_solutions"]["optimized_cutoff"], "1");
    }
}
