//! JSON formula schema: `{"n": int, "m": int, "clauses": [[signed ints]]}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Clause, CnfError, CnfFormula};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonFormula {
    pub n: usize,
    pub m: usize,
    pub clauses: Vec<Vec<i64>>,
}

#[derive(Debug, Error)]
pub enum JsonFormulaError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("`m` is {declared} but {found} clauses were given")]
    CountMismatch { declared: usize, found: usize },
    #[error("clause {clause}: literal {literal} out of range for {n} variables")]
    LiteralOutOfRange { clause: usize, literal: i64, n: usize },
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

impl From<&CnfFormula> for JsonFormula {
    fn from(f: &CnfFormula) -> Self {
        JsonFormula {
            n: f.num_vars(),
            m: f.num_clauses(),
            clauses: f.clauses().iter().map(Clause::to_dimacs).collect(),
        }
    }
}

impl TryFrom<JsonFormula> for CnfFormula {
    type Error = JsonFormulaError;

    fn try_from(json: JsonFormula) -> Result<Self, Self::Error> {
        if json.m != json.clauses.len() {
            return Err(JsonFormulaError::CountMismatch { declared: json.m, found: json.clauses.len() });
        }
        let mut clauses = Vec::with_capacity(json.m);
        for (j, raw) in json.clauses.iter().enumerate() {
            if let Some(&bad) = raw.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > json.n) {
                return Err(JsonFormulaError::LiteralOutOfRange { clause: j, literal: bad, n: json.n });
            }
            clauses.push(Clause::from_dimacs(raw).map_err(|e| match e {
                CnfError::Tautology { var, .. } => CnfError::Tautology { clause: j, var },
                other => other,
            })?);
        }
        Ok(CnfFormula::new(json.n, clauses)?)
    }
}

impl CnfFormula {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&JsonFormula::from(self)).expect("formula serializes")
    }

    pub fn from_json(text: &str) -> Result<CnfFormula, JsonFormulaError> {
        serde_json::from_str::<JsonFormula>(text)?.try_into()
    }
}
