//! Upper bounds on the number of satisfying assignments of a CNF formula,
//! computed from the mean and variance of the number of frustrated clauses
//! under a uniformly random assignment.
//!
//! The crate provides the formula model and DIMACS I/O ([`cnf`]), the
//! frustration polynomial and its exact moments ([`frustration`]), an
//! exhaustive distribution oracle for small instances ([`oracle`]), the
//! bound family ([`bounds`]), slim-SAT normalization ([`slim`]) and a seeded
//! instance generator ([`generate`]).

pub mod bounds;
pub mod cnf;
pub mod frustration;
pub mod generate;
pub mod instances;
pub mod oracle;
pub mod rational;
pub mod slim;

pub use bounds::{BoundEntry, BoundReport, BoundsError, Soundness, Target, Verdict};
pub use cnf::{parse_dimacs, Assignment, Clause, CnfError, CnfFormula, Literal, ParseError};
pub use frustration::{moments, Moments, MomentsF64};
pub use generate::{generate, GenSpec, Width};
pub use oracle::{enumerate, OracleConfig, OracleError, UDistribution};
pub use rational::Rational;
pub use slim::{normalize, slim_stats, Normalized, SlimStats};
