//! DIMACS CNF export and solver-output import.
//!
//! Export is byte-deterministic: a fixed header, one clause per line,
//! literals separated by single spaces, each line terminated by `0` and a
//! line feed. Import understands the common solver output convention:
//! an optional `s SATISFIABLE` / `s UNSATISFIABLE` status line and `v`
//! lines listing the model as signed literals terminated by `0`.

use crate::cnf::{Assignment, Cnf};
use thiserror::Error;

/// Serializes `cnf` in DIMACS format, with an optional leading comment.
pub fn export_dimacs(cnf: &Cnf, comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        for line in c.lines() {
            out.push_str("c ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out.push_str(&format!("p cnf {} {}\n", cnf.num_vars(), cnf.clauses().len()));
    for clause in cnf.clauses() {
        for &lit in clause {
            out.push_str(&lit.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

/// Result reported by an external solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExternalOutcome {
    /// Model assembled from `v` lines; unmentioned variables are false.
    Model(Assignment),
    Unsat,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelParseError {
    #[error("no model lines and no status line found in solver output")]
    NoModel,
    #[error("malformed literal {token:?} in model line")]
    BadLiteral { token: String },
    #[error("literal {literal} exceeds the formula's {num_vars} variables")]
    LiteralOutOfRange { literal: i32, num_vars: u32 },
    #[error("solver reported unsatisfiable but also printed model lines")]
    ContradictoryOutput,
}

/// Parses SAT-competition style solver output against a formula of
/// `num_vars` variables.
pub fn parse_dimacs_model(text: &str, num_vars: u32) -> Result<ExternalOutcome, ModelParseError> {
    let mut saw_value_line = false;
    let mut saw_sat_status = false;
    let mut saw_unsat_status = false;
    let mut assignment = Assignment::all_false(num_vars);

    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('c') || line.is_empty() {
            continue;
        }
        if let Some(status) = line.strip_prefix('s') {
            match status.trim() {
                "SATISFIABLE" => saw_sat_status = true,
                "UNSATISFIABLE" => saw_unsat_status = true,
                _ => {}
            }
            continue;
        }
        if let Some(values) = line.strip_prefix('v') {
            saw_value_line = true;
            for token in values.split_whitespace() {
                let lit: i32 = token
                    .parse()
                    .map_err(|_| ModelParseError::BadLiteral { token: token.to_string() })?;
                if lit == 0 {
                    continue;
                }
                if lit.unsigned_abs() > num_vars {
                    return Err(ModelParseError::LiteralOutOfRange { literal: lit, num_vars });
                }
                assignment.set(lit.unsigned_abs(), lit > 0);
            }
        }
    }

    if saw_unsat_status {
        if saw_value_line {
            return Err(ModelParseError::ContradictoryOutput);
        }
        return Ok(ExternalOutcome::Unsat);
    }
    if saw_value_line || saw_sat_status {
        return Ok(ExternalOutcome::Model(assignment));
    }
    Err(ModelParseError::NoModel)
}
