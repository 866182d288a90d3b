//! DIMACS CNF reading and writing.

use std::fmt::{self, Write as _};

use thiserror::Error;

use super::{Clause, ClauseShape, CnfFormula, Literal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing `p cnf <vars> <clauses>` header")]
    MissingHeader,
    #[error("line {line}: malformed header `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: second header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: invalid token `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: literal {literal} out of range for {n} variables")]
    LiteralOutOfRange { line: usize, literal: i64, n: usize },
    #[error("header declares {expected} clauses, found {found}")]
    ClauseCountMismatch { expected: usize, found: usize },
}

/// Things the parser fixed up or tolerated instead of rejecting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    /// Raw clause index (0-based, in file order) dropped as a tautology.
    TautologyRemoved { clause: usize, var: usize },
    DuplicateLiterals { clause: usize },
    EmptyClause { clause: usize },
    ClauseCountMismatch { expected: usize, found: usize },
    UnterminatedClause,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseWarning::TautologyRemoved { clause, var } => {
                write!(f, "clause {clause} contains both signs of variable {var}; dropped")
            }
            ParseWarning::DuplicateLiterals { clause } => write!(f, "clause {clause} repeats a literal"),
            ParseWarning::EmptyClause { clause } => write!(f, "clause {clause} is empty; the formula is unsatisfiable"),
            ParseWarning::ClauseCountMismatch { expected, found } => {
                write!(f, "header declares {expected} clauses, found {found}")
            }
            ParseWarning::UnterminatedClause => f.write_str("last clause is missing its terminating 0"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountPolicy {
    #[default]
    Error,
    Warn,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    pub count_mismatch: CountPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedCnf {
    pub formula: CnfFormula,
    pub warnings: Vec<ParseWarning>,
    /// Clause count from the header.
    pub declared_clauses: usize,
    /// Clauses read before tautology removal.
    pub raw_clauses: usize,
}

impl ParsedCnf {
    pub fn has_empty_clause(&self) -> bool {
        self.formula.has_empty_clause()
    }
}

pub fn parse_dimacs(text: &str) -> Result<ParsedCnf, ParseError> {
    parse_dimacs_with(text, ParseOptions::default())
}

pub fn parse_dimacs_with(text: &str, options: ParseOptions) -> Result<ParsedCnf, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut warnings = Vec::new();
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut raw_clauses = 0usize;

    let mut finish = |lits: &mut Vec<Literal>, warnings: &mut Vec<ParseWarning>, clauses: &mut Vec<Clause>| {
        let index = raw_clauses;
        raw_clauses += 1;
        match Clause::normalize(lits.drain(..)) {
            ClauseShape::Clean(c) => {
                if c.is_empty() {
                    warnings.push(ParseWarning::EmptyClause { clause: index });
                }
                clauses.push(c);
            }
            ClauseShape::Deduplicated(c) => {
                warnings.push(ParseWarning::DuplicateLiterals { clause: index });
                clauses.push(c);
            }
            ClauseShape::Tautology { var } => {
                warnings.push(ParseWarning::TautologyRemoved { clause: index, var });
            }
        }
    };

    'lines: for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(ParseError::DuplicateHeader { line: line_no });
            }
            header = Some(parse_header(trimmed, line_no)?);
            continue;
        }
        let Some((n, _)) = header else {
            return Err(ParseError::MissingHeader);
        };
        for token in trimmed.split_whitespace() {
            if token.starts_with('c') {
                continue 'lines;
            }
            let value: i64 = token
                .parse()
                .map_err(|_| ParseError::InvalidToken { line: line_no, token: token.to_string() })?;
            if value == 0 {
                finish(&mut current, &mut warnings, &mut clauses);
                continue;
            }
            if value.unsigned_abs() as usize > n {
                return Err(ParseError::LiteralOutOfRange { line: line_no, literal: value, n });
            }
            current.push(Literal::new(value.unsigned_abs() as usize, value > 0));
        }
    }

    let (n, declared) = header.ok_or(ParseError::MissingHeader)?;
    if !current.is_empty() {
        warnings.push(ParseWarning::UnterminatedClause);
        finish(&mut current, &mut warnings, &mut clauses);
    }
    if raw_clauses != declared {
        match options.count_mismatch {
            CountPolicy::Error => {
                return Err(ParseError::ClauseCountMismatch { expected: declared, found: raw_clauses })
            }
            CountPolicy::Warn => warnings
                .push(ParseWarning::ClauseCountMismatch { expected: declared, found: raw_clauses }),
        }
    }

    let formula = CnfFormula::new(n, clauses).expect("literals were range-checked");
    Ok(ParsedCnf { formula, warnings, declared_clauses: declared, raw_clauses })
}

fn parse_header(line: &str, line_no: usize) -> Result<(usize, usize), ParseError> {
    let malformed = || ParseError::MalformedHeader { line: line_no, text: line.trim().to_string() };
    let mut parts = line.split_whitespace();
    if parts.next() != Some("p") || parts.next() != Some("cnf") {
        return Err(malformed());
    }
    let n = parts.next().and_then(|t| t.parse().ok()).ok_or_else(malformed)?;
    let m = parts.next().and_then(|t| t.parse().ok()).ok_or_else(malformed)?;
    if parts.next().is_some() {
        return Err(malformed());
    }
    Ok((n, m))
}

/// Writes the formula as DIMACS CNF, one clause per line.
pub fn emit_dimacs(formula: &CnfFormula) -> String {
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", formula.num_vars(), formula.num_clauses()).unwrap();
    for clause in formula.clauses() {
        for lit in clause.literals() {
            write!(out, "{} ", lit.to_dimacs()).unwrap();
        }
        out.push_str("0\n");
    }
    out
}
