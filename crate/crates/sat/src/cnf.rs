//! CNF formulas and total assignments.

use thiserror::Error;

/// Errors raised while building a [`Cnf`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("clause {index} is empty")]
    EmptyClause { index: usize },
    #[error("literal {literal} is out of range for {num_vars} variables")]
    LiteralOutOfRange { literal: i32, num_vars: u32 },
}

/// A propositional formula in conjunctive normal form.
///
/// Variables are numbered `1..=num_vars`; a literal is a non-zero signed
/// integer whose sign selects the polarity, as in the DIMACS convention.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cnf {
    num_vars: u32,
    clauses: Vec<Vec<i32>>,
}

impl Cnf {
    /// Creates an empty formula over `num_vars` variables.
    pub fn new(num_vars: u32) -> Self {
        Cnf { num_vars, clauses: Vec::new() }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// Grows the variable range and returns the new variable's index.
    pub fn fresh_var(&mut self) -> u32 {
        self.num_vars += 1;
        self.num_vars
    }

    /// Appends a clause, rejecting empty clauses and out-of-range literals.
    pub fn add_clause(&mut self, lits: impl Into<Vec<i32>>) -> Result<(), CnfError> {
        let lits = lits.into();
        if lits.is_empty() {
            return Err(CnfError::EmptyClause { index: self.clauses.len() });
        }
        for &l in &lits {
            if l == 0 || l.unsigned_abs() > self.num_vars {
                return Err(CnfError::LiteralOutOfRange { literal: l, num_vars: self.num_vars });
            }
        }
        self.clauses.push(lits);
        Ok(())
    }

    /// Appends a clause that is known to use only valid literals.
    ///
    /// Panics on malformed input; intended for encoders that allocate
    /// variables through [`Cnf::fresh_var`].
    pub fn push_clause(&mut self, lits: impl Into<Vec<i32>>) {
        self.add_clause(lits).expect("well-formed clause");
    }
}

/// A total truth assignment for variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    /// Builds an assignment from per-variable values (`values[0]` is var 1).
    pub fn from_values(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    /// Builds an all-false assignment for `num_vars` variables.
    pub fn all_false(num_vars: u32) -> Self {
        Assignment { values: vec![false; num_vars as usize] }
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len() as u32
    }

    /// Truth value of variable `var` (1-based). Variables beyond the
    /// assignment's range read as false.
    pub fn value(&self, var: u32) -> bool {
        self.values.get(var as usize - 1).copied().unwrap_or(false)
    }

    pub fn set(&mut self, var: u32, value: bool) {
        if self.values.len() < var as usize {
            self.values.resize(var as usize, false);
        }
        self.values[var as usize - 1] = value;
    }

    /// True when the literal evaluates to true under this assignment.
    pub fn satisfies_literal(&self, lit: i32) -> bool {
        self.value(lit.unsigned_abs()) == (lit > 0)
    }

    /// True when every clause of `cnf` contains a satisfied literal.
    pub fn satisfies(&self, cnf: &Cnf) -> bool {
        cnf.clauses().iter().all(|c| c.iter().any(|&l| self.satisfies_literal(l)))
    }
}
