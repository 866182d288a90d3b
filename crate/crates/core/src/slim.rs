//! Normalization to slim-SAT: every clause has 2 or 3 literals and every
//! variable occurs 2 or 3 times, as `(a ∨ X) ∧ (a ∨ Y) ∧ (ā ∨ Z)` or
//! `(a ∨ X) ∧ (ā ∨ Y)`.
//!
//! Pipeline:
//! 1. unit propagation and pure-literal elimination to a fixpoint;
//! 2. clauses wider than 3 are split with a chain of fresh variables;
//! 3. variables read more than 3 times are replaced by copies tied together
//!    by a cycle of implications `c_1 → c_2 → … → c_t → c_1`;
//! 4. variables with more negative than positive occurrences are flipped;
//! 5. variables are renumbered densely.
//!
//! Satisfiability is preserved throughout. The model count is preserved by
//! unit propagation, copying and flipping, but not by pure-literal
//! elimination, splitting, or dropping variables that became free.

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Clause, CnfFormula, Literal};
use crate::rational::{dyadic, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlimError {
    #[error("not a slim formula: {0}")]
    NotSlim(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TransformLog {
    pub input_vars: usize,
    pub input_clauses: usize,
    /// Literals forced by unit propagation (input numbering, DIMACS sign).
    pub units: Vec<i64>,
    /// Pure literals set true (input numbering).
    pub pure_literals: Vec<i64>,
    /// Input variables that vanished without being fixed.
    pub free_vars: Vec<usize>,
    pub split_clauses: usize,
    pub split_vars: usize,
    /// `(variable, occurrences)` for each variable expanded into copies.
    pub expanded_vars: Vec<(usize, usize)>,
    pub copy_vars: usize,
    /// Output variables whose polarity was flipped.
    pub flipped: Vec<usize>,
    /// `(input variable, output variable)` for surviving input variables.
    pub var_map: Vec<(usize, usize)>,
    /// `Some(sat)` when propagation alone decided the formula.
    pub decided: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    /// The slim formula. A decided-satisfiable input yields the empty formula
    /// over zero variables; a decided-unsatisfiable one a single empty clause.
    pub formula: CnfFormula,
    pub log: TransformLog,
    /// True when the output has exactly as many models as the input.
    pub count_preserving: bool,
}

impl Normalized {
    pub fn verdict(&self) -> Option<bool> {
        self.log.decided
    }
}

/// Working copy: literals as signed ids, `None` marks a removed clause.
struct Work {
    clauses: Vec<Option<Vec<i64>>>,
    next_var: usize,
}

impl Work {
    fn alive(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.clauses.iter().flatten()
    }

    fn fresh(&mut self) -> i64 {
        self.next_var += 1;
        self.next_var as i64
    }

    /// Sets `lit` true: drops satisfied clauses and removes `¬lit`
    /// elsewhere. Returns false if a clause became empty.
    fn assign(&mut self, lit: i64) -> bool {
        for slot in &mut self.clauses {
            let Some(c) = slot else { continue };
            if c.contains(&lit) {
                *slot = None;
            } else if c.contains(&-lit) {
                c.retain(|&l| l != -lit);
                if c.is_empty() {
                    return false;
                }
            }
        }
        true
    }

    fn occurrences(&self) -> Vec<(usize, usize)> {
        let mut occ = vec![(0, 0); self.next_var + 1];
        for &l in self.alive().flatten() {
            let slot = &mut occ[l.unsigned_abs() as usize];
            if l > 0 {
                slot.0 += 1;
            } else {
                slot.1 += 1;
            }
        }
        occ
    }
}

pub fn normalize(f: &CnfFormula) -> Normalized {
    let mut log = TransformLog { input_vars: f.num_vars(), input_clauses: f.num_clauses(), ..Default::default() };
    let mut work = Work {
        clauses: f.clauses().iter().map(|c| Some(c.to_dimacs())).collect(),
        next_var: f.num_vars(),
    };

    if f.has_empty_clause() || !propagate(&mut work, &mut log) {
        log.decided = Some(false);
        let formula = CnfFormula::new(0, vec![Clause::empty()]).expect("no variables");
        return Normalized { formula, log, count_preserving: true };
    }
    if work.alive().next().is_none() {
        log.decided = Some(true);
        log.free_vars = (1..=f.num_vars()).filter(|v| !is_fixed(&log, *v)).collect();
        let count_preserving = log.pure_literals.is_empty() && log.free_vars.is_empty();
        return Normalized { formula: CnfFormula::empty(0), log, count_preserving };
    }

    split_wide_clauses(&mut work, &mut log);
    expand_heavy_vars(&mut work, &mut log);

    let occ = work.occurrences();
    log.free_vars = (1..=f.num_vars()).filter(|&v| occ[v] == (0, 0) && !is_fixed(&log, v)).collect();

    // Dense renumbering, ascending in working id.
    let mut new_id = vec![0usize; work.next_var + 1];
    let mut n = 0;
    for v in 1..=work.next_var {
        if occ[v] != (0, 0) {
            n += 1;
            new_id[v] = n;
            if v <= f.num_vars() {
                log.var_map.push((v, n));
            }
        }
    }
    let clauses: Vec<Clause> = work
        .alive()
        .map(|c| {
            Clause::new(c.iter().map(|&l| Literal::new(new_id[l.unsigned_abs() as usize], l > 0)))
                .expect("propagation leaves no tautologies")
        })
        .collect();
    let formula = CnfFormula::new(n, clauses).expect("ids are dense");
    let (formula, flipped) = flip_to_canonical(&formula);
    log.flipped = flipped;

    let count_preserving = log.pure_literals.is_empty() && log.split_clauses == 0 && log.free_vars.is_empty();
    Normalized { formula, log, count_preserving }
}

fn is_fixed(log: &TransformLog, var: usize) -> bool {
    log.units.iter().chain(&log.pure_literals).any(|l| l.unsigned_abs() as usize == var)
}

/// Unit propagation and pure-literal elimination to a fixpoint. Returns
/// false on conflict.
fn propagate(work: &mut Work, log: &mut TransformLog) -> bool {
    loop {
        let unit = work.alive().find(|c| c.len() == 1).map(|c| c[0]);
        if let Some(unit) = unit {
            log.units.push(unit);
            if !work.assign(unit) {
                return false;
            }
            continue;
        }
        let occ = work.occurrences();
        let pure: Vec<i64> = (1..occ.len())
            .filter_map(|v| match occ[v] {
                (p, 0) if p > 0 => Some(v as i64),
                (0, q) if q > 0 => Some(-(v as i64)),
                _ => None,
            })
            .collect();
        if pure.is_empty() {
            return true;
        }
        for lit in pure {
            if !work.alive().any(|c| c.contains(&lit)) {
                continue;
            }
            log.pure_literals.push(lit);
            work.assign(lit);
        }
    }
}

/// `(l1 ∨ … ∨ lk)` becomes `(l1 ∨ l2 ∨ y1) ∧ (¬y1 ∨ l3 ∨ y2) ∧ … ∧ (¬y_{k−3} ∨ l_{k−1} ∨ lk)`.
fn split_wide_clauses(work: &mut Work, log: &mut TransformLog) {
    let mut out = Vec::with_capacity(work.clauses.len());
    let clauses = std::mem::take(&mut work.clauses);
    for c in clauses.into_iter().flatten() {
        if c.len() <= 3 {
            out.push(Some(c));
            continue;
        }
        log.split_clauses += 1;
        let k = c.len();
        let mut link = work.fresh();
        log.split_vars += 1;
        out.push(Some(vec![c[0], c[1], link]));
        for &lit in &c[2..k - 2] {
            let next = work.fresh();
            log.split_vars += 1;
            out.push(Some(vec![-link, lit, next]));
            link = next;
        }
        out.push(Some(vec![-link, c[k - 2], c[k - 1]]));
    }
    work.clauses = out;
}

/// A variable with `t > 3` occurrences keeps its first occurrence and gets
/// `t − 1` fresh copies for the rest, linked by `(¬c_i ∨ c_{i+1})` in a cycle.
/// Every copy then occurs exactly three times.
fn expand_heavy_vars(work: &mut Work, log: &mut TransformLog) {
    let occ = work.occurrences();
    let original_top = work.next_var;
    for (v, &(p, q)) in occ.iter().enumerate().take(original_top + 1).skip(1) {
        let t = p + q;
        if t <= 3 {
            continue;
        }
        log.expanded_vars.push((v, t));
        let mut copies = vec![v as i64];
        let mut seen = 0;
        for c in work.clauses.iter_mut().flatten() {
            for l in c.iter_mut() {
                if l.unsigned_abs() as usize == v {
                    if seen > 0 {
                        work.next_var += 1;
                        log.copy_vars += 1;
                        let copy = work.next_var as i64;
                        copies.push(copy);
                        *l = if *l > 0 { copy } else { -copy };
                    }
                    seen += 1;
                }
            }
        }
        for i in 0..copies.len() {
            let next = copies[(i + 1) % copies.len()];
            work.clauses.push(Some(vec![-copies[i], next]));
        }
    }
}

/// Flips every variable with fewer positive than negative occurrences.
/// Returns the flipped formula and the flipped variables; the model count is
/// unchanged.
pub fn flip_to_canonical(f: &CnfFormula) -> (CnfFormula, Vec<usize>) {
    let flips: Vec<usize> = f
        .occurrences()
        .iter()
        .enumerate()
        .filter(|(_, (p, q))| p < q)
        .map(|(i, _)| i + 1)
        .collect();
    let mut out = f.clone();
    for &v in &flips {
        out = out.flip_variable(v).expect("variable in range");
    }
    (out, flips)
}

/// Structural counts of a slim formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlimStats {
    pub n: usize,
    pub m: usize,
    /// Total literal occurrences.
    #[serde(rename = "N")]
    pub literals: usize,
    pub m2: usize,
    pub m3: usize,
    pub n2: usize,
    pub n3: usize,
    pub neg_literals: usize,
}

impl SlimStats {
    /// `m2 = 3m − N`, `m3 = N − 2m`, `n2 = 3n − N`, `n3 = N − 2n` and
    /// `2n/3 ≤ m ≤ 3n/2`.
    pub fn relations_hold(&self) -> bool {
        let (n, m, big_n) = (self.n as i64, self.m as i64, self.literals as i64);
        self.m2 as i64 == 3 * m - big_n
            && self.m3 as i64 == big_n - 2 * m
            && self.n2 as i64 == 3 * n - big_n
            && self.n3 as i64 == big_n - 2 * n
            && 2 * n <= 3 * m
            && 2 * m <= 3 * n
    }

    /// `E(u) = m3/8 + m2/4`.
    pub fn expected_mean(&self) -> Rational {
        dyadic(3) * Rational::from_integer(self.m3.into()) + dyadic(2) * Rational::from_integer(self.m2.into())
    }

    /// Every variable has exactly one negative occurrence.
    pub fn is_canonical(&self) -> bool {
        self.neg_literals == self.n
    }
}

pub fn slim_stats(f: &CnfFormula) -> Result<SlimStats, SlimError> {
    let mut m2 = 0;
    let mut m3 = 0;
    for (j, c) in f.clauses().iter().enumerate() {
        match c.width() {
            2 => m2 += 1,
            3 => m3 += 1,
            w => return Err(SlimError::NotSlim(format!("clause {j} has width {w}"))),
        }
    }
    let mut n2 = 0;
    let mut n3 = 0;
    let mut neg_literals = 0;
    for (i, &(p, q)) in f.occurrences().iter().enumerate() {
        match p + q {
            2 => n2 += 1,
            3 => n3 += 1,
            t => return Err(SlimError::NotSlim(format!("variable {} occurs {t} times", i + 1))),
        }
        neg_literals += q;
    }
    let stats = SlimStats {
        n: f.num_vars(),
        m: f.num_clauses(),
        literals: f.literal_count(),
        m2,
        m3,
        n2,
        n3,
        neg_literals,
    };
    if !stats.relations_hold() {
        return Err(SlimError::NotSlim(format!("counting relations fail: {stats:?}")));
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frustration::moments;
    use crate::oracle::{enumerate, OracleConfig};
    use crate::rational::rat;

    fn count(f: &CnfFormula) -> u64 {
        enumerate(f, OracleConfig::default()).unwrap().model_count()
    }

    /// `(1∨2) ∧ (1∨¬3) ∧ (¬1∨3) ∧ (¬2∨3) ∧ (2∨¬3∨…)`-style instance that is
    /// already slim and canonical.
    fn canonical_slim() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(3, &[&[1, 2], &[1, -3], &[-1, 2, 3], &[-2, 3]]).unwrap()
    }

    #[test]
    fn canonical_slim_formula_is_unchanged() {
        let f = canonical_slim();
        let stats = slim_stats(&f).unwrap();
        assert!(stats.is_canonical());
        let out = normalize(&f);
        assert_eq!(out.formula, f);
        assert!(out.count_preserving);
        assert!(out.log.flipped.is_empty());
    }

    #[test]
    fn negative_majority_gets_flipped() {
        // Variable 1 appears as (1 ∨ 2) ∧ (¬1 ∨ 3) ∧ (¬1 ∨ ¬2 ∨ ¬3).
        let f = CnfFormula::from_dimacs_clauses(3, &[&[1, 2], &[-1, 3], &[-1, -2, -3], &[2, 3]]).unwrap();
        let out = normalize(&f);
        assert!(out.log.flipped.contains(&1));
        assert!(out.count_preserving);
        assert_eq!(count(&out.formula), count(&f));
        let stats = slim_stats(&out.formula).unwrap();
        assert!(stats.is_canonical());
    }

    #[test]
    fn unit_and_pure_literals_decide_trivial_formulas() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1], &[-1, 2], &[-2]]).unwrap();
        let out = normalize(&f);
        assert_eq!(out.verdict(), Some(false));
        assert_eq!(count(&out.formula), 0);

        let f = CnfFormula::from_dimacs_clauses(3, &[&[1, 2], &[1, 3]]).unwrap();
        let out = normalize(&f);
        assert_eq!(out.verdict(), Some(true));
        assert_eq!(out.log.pure_literals, vec![1]);
        assert!(!out.count_preserving);
        assert_eq!(count(&out.formula), 1);
    }

    #[test]
    fn wide_clauses_are_split() {
        let f = CnfFormula::from_dimacs_clauses(5, &[&[1, 2, 3, 4, 5], &[-1, -2], &[-3, -4], &[-5, 1]]).unwrap();
        let out = normalize(&f);
        assert_eq!(out.log.split_clauses, 1);
        assert_eq!(out.log.split_vars, 2);
        assert!(!out.count_preserving);
        assert_eq!(out.formula.num_vars(), 7);
        slim_stats(&out.formula).unwrap();
        assert_eq!(count(&out.formula) > 0, count(&f) > 0);
    }

    #[test]
    fn heavy_variables_become_copy_cycles() {
        let f = CnfFormula::from_dimacs_clauses(3, &[&[1, 2], &[1, -2], &[-1, 3], &[-1, -3], &[1, 2, 3]]).unwrap();
        let out = normalize(&f);
        assert_eq!(out.log.expanded_vars, vec![(1, 5)]);
        assert_eq!(out.log.copy_vars, 4);
        assert!(out.count_preserving);
        assert_eq!(count(&out.formula), count(&f));
        let stats = slim_stats(&out.formula).unwrap();
        assert!(stats.is_canonical());
    }

    #[test]
    fn stats_of_constructed_instance() {
        // m2 = 2, m3 = 3 over 5 variables.
        let f = CnfFormula::from_dimacs_clauses(
            5,
            &[&[1, 2, 3], &[-1, 4, 5], &[1, -2, 4], &[2, -3], &[-4, -5]],
        )
        .unwrap();
        let s = slim_stats(&f).unwrap();
        assert_eq!((s.m2, s.m3), (2, 3));
        assert_eq!(s.m2 + s.m3, s.m);
        assert_eq!(2 * s.m2 + 3 * s.m3, s.literals);
        assert_eq!(s.expected_mean(), rat(7, 8));
        assert_eq!(moments(&f).mean, rat(7, 8));
    }

    #[test]
    fn non_slim_inputs_are_rejected() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1, 2]]).unwrap();
        assert!(matches!(slim_stats(&f), Err(SlimError::NotSlim(_))));
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1], &[-1, 2], &[1, -2]]).unwrap();
        assert!(slim_stats(&f).is_err());
    }
}
