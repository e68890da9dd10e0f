//! A small, deterministic CDCL SAT solver.
//!
//! The solver implements the classic ingredients: two-watched-literal
//! propagation, first-UIP clause learning with self-subsumption
//! minimization, VSIDS-style activity ordering, phase saving, Luby
//! restarts and activity-based learned-clause reduction. It is entirely
//! deterministic: no randomness is used and all ties break on variable
//! index, so repeated runs on the same input produce the same model.
//!
//! Formulas are plain CNF ([`Cnf`]) over variables `1..=n` with signed
//! integer literals, and can be exchanged with external solvers through
//! the DIMACS format ([`dimacs`]).

pub mod cnf;
pub mod dimacs;
pub mod solver;

pub use cnf::{Assignment, Cnf, CnfError};
pub use dimacs::{export_dimacs, parse_dimacs_model, ExternalOutcome, ModelParseError};
pub use solver::{solve, SolveStats, Solver, SolverError, Verdict};
