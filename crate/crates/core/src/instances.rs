//! Small hand-checked formulas used throughout the tests, the CLI and the docs.

use crate::cnf::{Clause, CnfFormula, Literal};

/// `(a1 ∨ ¬a2) ∧ (¬a1 ∨ ¬a2 ∨ ¬a3) ∧ (a2 ∨ a3)`: three solutions, `u ≤ 1`.
pub fn three_clause() -> CnfFormula {
    CnfFormula::from_adjacency(&[&[1, -1, 0], &[-1, -1, -1], &[0, 1, 1]]).expect("valid rows")
}

/// Four variables, eight clauses, unique solution `0100`.
pub fn four_var_unique() -> CnfFormula {
    CnfFormula::from_adjacency(&[
        &[-1, 0, 1, -1],
        &[1, 0, -1, 1],
        &[1, 1, 0, 0],
        &[-1, -1, 0, 0],
        &[0, -1, -1, 0],
        &[0, -1, 1, -1],
        &[-1, 1, 0, -1],
        &[0, 1, 0, 1],
    ])
    .expect("valid rows")
}

/// [`four_var_unique`] plus `(a1 ∨ a3)`, which kills the only solution.
pub fn four_var_unsat() -> CnfFormula {
    four_var_unique().with_clause(Clause::new([Literal::positive(1), Literal::positive(3)]).expect("valid"))
}
