//! CNF data model: literals, clauses, formulas and ±1 assignments.
//!
//! Variables are 1-based. A clause keeps its literals sorted by variable and
//! never mentions a variable twice, so every row of the clause/variable
//! adjacency matrix has exactly `width` non-zero entries. Variables that do
//! not occur in any clause still count towards `n`.

mod dimacs;
mod json;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use dimacs::{
    emit_dimacs, parse_dimacs, parse_dimacs_with, CountPolicy, ParseError, ParseOptions, ParseWarning,
    ParsedCnf,
};
pub use json::{JsonFormula, JsonFormulaError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("variable {var} out of range 1..={n}")]
    VarOutOfRange { var: usize, n: usize },
    #[error("clause {clause} mentions variable {var} with both signs")]
    Tautology { clause: usize, var: usize },
    #[error("assignment has length {got}, formula has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid assignment entry `{0}`")]
    InvalidAssignment(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: usize,
    positive: bool,
}

impl Literal {
    /// # Panics
    ///
    /// If `var == 0`.
    pub fn new(var: usize, positive: bool) -> Self {
        assert!(var >= 1, "variables are 1-based");
        Literal { var, positive }
    }

    pub fn positive(var: usize) -> Self {
        Literal::new(var, true)
    }

    pub fn negative(var: usize) -> Self {
        Literal::new(var, false)
    }

    /// Signed DIMACS encoding; `None` for 0.
    pub fn from_dimacs(value: i64) -> Option<Self> {
        (value != 0).then(|| Literal::new(value.unsigned_abs() as usize, value > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn var(self) -> usize {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    /// Adjacency-matrix entry: +1 for the atom, −1 for its negation.
    pub fn sign(self) -> i8 {
        if self.positive {
            1
        } else {
            -1
        }
    }

    pub fn negated(self) -> Self {
        Literal { var: self.var, positive: !self.positive }
    }

    /// Whether the literal is true under a ±1 value of its variable.
    pub fn is_satisfied_by(self, value: i8) -> bool {
        (value > 0) == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals over distinct variables, sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause {
    literals: Vec<Literal>,
}

/// What [`Clause::normalize`] had to do with its input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClauseShape {
    Clean(Clause),
    /// Duplicate literals were merged.
    Deduplicated(Clause),
    /// Some variable appears with both signs; the clause is always true.
    Tautology { var: usize },
}

impl Clause {
    /// Builds a clause, merging duplicate literals and rejecting tautologies.
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Result<Self, CnfError> {
        match Clause::normalize(literals) {
            ClauseShape::Clean(c) | ClauseShape::Deduplicated(c) => Ok(c),
            ClauseShape::Tautology { var } => Err(CnfError::Tautology { clause: 0, var }),
        }
    }

    pub fn normalize(literals: impl IntoIterator<Item = Literal>) -> ClauseShape {
        let mut lits: Vec<Literal> = literals.into_iter().collect();
        let raw_len = lits.len();
        lits.sort();
        lits.dedup();
        for pair in lits.windows(2) {
            if pair[0].var == pair[1].var {
                return ClauseShape::Tautology { var: pair[0].var };
            }
        }
        let clause = Clause { literals: lits };
        if clause.literals.len() == raw_len {
            ClauseShape::Clean(clause)
        } else {
            ClauseShape::Deduplicated(clause)
        }
    }

    pub fn from_dimacs(values: &[i64]) -> Result<Self, CnfError> {
        Clause::new(values.iter().filter_map(|&v| Literal::from_dimacs(v)))
    }

    pub fn empty() -> Self {
        Clause::default()
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn width(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// Sign of `var` in this clause, 0 if absent.
    pub fn sign_of(&self, var: usize) -> i8 {
        self.literals
            .binary_search_by_key(&var, |l| l.var)
            .map(|i| self.literals[i].sign())
            .unwrap_or(0)
    }

    pub fn max_var(&self) -> usize {
        self.literals.last().map_or(0, |l| l.var)
    }

    /// A clause is frustrated when every literal is false.
    pub fn is_frustrated_by(&self, x: &Assignment) -> bool {
        self.literals.iter().all(|l| !l.is_satisfied_by(x.value(l.var)))
    }

    pub fn to_dimacs(&self) -> Vec<i64> {
        self.literals.iter().map(|l| l.to_dimacs()).collect()
    }

    fn map_literals(&self, f: impl Fn(Literal) -> Literal) -> Clause {
        let mut literals: Vec<Literal> = self.literals.iter().copied().map(f).collect();
        literals.sort();
        Clause { literals }
    }
}

/// A CNF formula over variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfFormula {
    n: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self, CnfError> {
        for clause in &clauses {
            if clause.max_var() > n {
                return Err(CnfError::VarOutOfRange { var: clause.max_var(), n });
            }
        }
        Ok(CnfFormula { n, clauses })
    }

    /// Builds a formula from signed-integer clauses, rejecting tautologies.
    pub fn from_dimacs_clauses(n: usize, clauses: &[&[i64]]) -> Result<Self, CnfError> {
        let clauses = clauses
            .iter()
            .enumerate()
            .map(|(j, c)| {
                Clause::from_dimacs(c).map_err(|e| match e {
                    CnfError::Tautology { var, .. } => CnfError::Tautology { clause: j, var },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        CnfFormula::new(n, clauses)
    }

    /// Builds a formula from adjacency rows with entries in {−1, 0, +1}.
    pub fn from_adjacency(rows: &[&[i8]]) -> Result<Self, CnfError> {
        let n = rows.first().map_or(0, |r| r.len());
        let clauses = rows
            .iter()
            .map(|row| {
                Clause::new(
                    row.iter()
                        .enumerate()
                        .filter(|(_, &f)| f != 0)
                        .map(|(s, &f)| Literal::new(s + 1, f > 0)),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        CnfFormula::new(n, clauses)
    }

    pub fn empty(n: usize) -> Self {
        CnfFormula { n, clauses: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn into_clauses(self) -> Vec<Clause> {
        self.clauses
    }

    pub fn max_width(&self) -> usize {
        self.clauses.iter().map(Clause::width).max().unwrap_or(0)
    }

    /// True when some clause is empty, which makes the formula unsatisfiable.
    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    /// Adjacency entry f_{js}: sign of variable `s` in clause `j` (both 1-based
    /// in the usual notation; here `j` is 0-based and `s` is 1-based).
    pub fn adjacency(&self, j: usize, s: usize) -> i8 {
        self.clauses[j].sign_of(s)
    }

    /// Dense m×n adjacency matrix, rows indexed by clause, columns by variable.
    pub fn adjacency_matrix(&self) -> Vec<Vec<i8>> {
        self.clauses
            .iter()
            .map(|c| {
                let mut row = vec![0i8; self.n];
                for l in c.literals() {
                    row[l.var - 1] = l.sign();
                }
                row
            })
            .collect()
    }

    /// Negates column `s` of the adjacency matrix. The map `x ↦ x` with
    /// `x_s` negated is a bijection between the two solution sets.
    pub fn flip_variable(&self, s: usize) -> Result<CnfFormula, CnfError> {
        if s == 0 || s > self.n {
            return Err(CnfError::VarOutOfRange { var: s, n: self.n });
        }
        let clauses = self
            .clauses
            .iter()
            .map(|c| c.map_literals(|l| if l.var == s { l.negated() } else { l }))
            .collect();
        Ok(CnfFormula { n: self.n, clauses })
    }

    /// Adds a clause, growing `n` if needed.
    pub fn with_clause(mut self, clause: Clause) -> CnfFormula {
        self.n = self.n.max(clause.max_var());
        self.clauses.push(clause);
        self
    }

    /// Per-variable occurrence counts `(positive, negative)`, indexed by `var - 1`.
    pub fn occurrences(&self) -> Vec<(usize, usize)> {
        let mut occ = vec![(0, 0); self.n];
        for l in self.clauses.iter().flat_map(|c| c.literals()) {
            let slot = &mut occ[l.var - 1];
            if l.positive {
                slot.0 += 1;
            } else {
                slot.1 += 1;
            }
        }
        occ
    }

    /// Total number of literal occurrences.
    pub fn literal_count(&self) -> usize {
        self.clauses.iter().map(Clause::width).sum()
    }
}

/// A truth assignment as a ±1 vector, `x_s = 2·T(a_s) − 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<i8>,
}

impl Assignment {
    pub fn new(values: Vec<i8>) -> Result<Self, CnfError> {
        if let Some(bad) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(CnfError::InvalidAssignment(bad.to_string()));
        }
        Ok(Assignment { values })
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Assignment { values: bits.iter().map(|&b| if b { 1 } else { -1 }).collect() }
    }

    /// Assignment number `index` of `2^n`: bit `s-1` of `index` is the truth
    /// value of variable `s`.
    pub fn from_index(index: u64, n: usize) -> Self {
        Assignment {
            values: (0..n).map(|s| if index >> s & 1 == 1 { 1 } else { -1 }).collect(),
        }
    }

    /// Inverse of [`Assignment::from_index`] (requires `n <= 64`).
    pub fn to_index(&self) -> u64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .fold(0u64, |acc, (s, _)| acc | 1 << s)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of 1-based variable `var`.
    pub fn value(&self, var: usize) -> i8 {
        self.values[var - 1]
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn check_len(&self, n: usize) -> Result<(), CnfError> {
        if self.values.len() == n {
            Ok(())
        } else {
            Err(CnfError::LengthMismatch { expected: n, got: self.values.len() })
        }
    }
}

/// Bit-string notation: character `s` is the truth value of variable `s`,
/// so `"0100"` sets only `a_2`.
impl FromStr for Assignment {
    type Err = CnfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '1' => Ok(1),
                '0' => Ok(-1),
                other => Err(CnfError::InvalidAssignment(other.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|values| Assignment { values })
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &v in &self.values {
            f.write_str(if v > 0 { "1" } else { "0" })?;
        }
        Ok(())
    }
}
