//! Bounded satisfiability checking for LTL with past.
//!
//! `check_sat` searches for a lasso word of bound at most `k` satisfying a
//! formula by reducing to propositional SAT; `check_property` refutes
//! `system → property` by searching for a counterexample word.  Every
//! witness reported here has been replayed through the semantic evaluator
//! of [`crate::ltl`] against the original formula, so a `Sat` answer is
//! self-certifying; `Unsat` means no model of bound `<= k` exists, which
//! leaves larger bounds open.

mod dag;
mod encode;

pub use encode::{encode_bounded, BoundedEncoding};

use crate::ltl::{eval, Formula, LassoWord};
use reflow_sat::{Solver, Verdict};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BscError {
    #[error("bound must be at least 1, got {0}")]
    BoundTooSmall(usize),
    #[error("internal error: satisfying assignment selects no loop position")]
    NoLoopSelected,
    #[error("internal error: decoded witness fails semantic replay: {0}")]
    ReplayFailed(String),
}

/// Sizes of the propositional encoding plus solver effort.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckStats {
    pub variables: usize,
    pub clauses: usize,
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub solve_ms: u128,
}

impl std::fmt::Display for CheckStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "variables={} clauses={} decisions={} conflicts={} propagations={} solve_ms={}",
            self.variables,
            self.clauses,
            self.decisions,
            self.conflicts,
            self.propagations,
            self.solve_ms
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckVerdict {
    /// A replay-verified witness word.
    Sat(LassoWord),
    /// No satisfying word of bound `<= k` exists.
    UnsatWithinBound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub verdict: CheckVerdict,
    pub stats: CheckStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyVerdict {
    /// A replay-verified word satisfying the system but not the property.
    Counterexample(LassoWord),
    NoCounterexampleWithinBound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyResult {
    pub verdict: PropertyVerdict,
    pub stats: CheckStats,
}

/// Searches for a lasso word of bound `<= k` satisfying `phi`.
pub fn check_sat(phi: &Formula, k: usize) -> Result<CheckResult, BscError> {
    let encoding = encode_bounded(phi, k)?;
    let mut solver = Solver::new(encoding.cnf());
    let verdict = solver.solve();
    let s = solver.stats();
    let stats = CheckStats {
        variables: encoding.cnf().num_vars() as usize,
        clauses: encoding.cnf().clauses().len(),
        decisions: s.decisions,
        conflicts: s.conflicts,
        propagations: s.propagations,
        solve_ms: s.solve_ms,
    };
    match verdict {
        Verdict::Unsat => Ok(CheckResult {
            verdict: CheckVerdict::UnsatWithinBound,
            stats,
        }),
        Verdict::Sat(assignment) => {
            let witness = encoding.decode_witness(&assignment)?;
            certify(&witness, phi)?;
            Ok(CheckResult {
                verdict: CheckVerdict::Sat(witness),
                stats,
            })
        }
    }
}

/// Checks `property` against `system` at bound `k`: a counterexample is a
/// word satisfying the system and violating the property.
pub fn check_property(
    system: &Formula,
    property: &Formula,
    k: usize,
) -> Result<PropertyResult, BscError> {
    let query = Formula::and(system.clone(), Formula::not(property.clone()));
    let result = check_sat(&query, k)?;
    let verdict = match result.verdict {
        CheckVerdict::Sat(w) => PropertyVerdict::Counterexample(w),
        CheckVerdict::UnsatWithinBound => PropertyVerdict::NoCounterexampleWithinBound,
    };
    Ok(PropertyResult {
        verdict,
        stats: result.stats,
    })
}

/// Replays a decoded witness against the original (pre-normalization)
/// formula; failure indicates an encoder bug, never a verdict.
pub fn certify(witness: &LassoWord, phi: &Formula) -> Result<(), BscError> {
    match eval(witness, 0, phi) {
        Ok(true) => Ok(()),
        Ok(false) => Err(BscError::ReplayFailed(format!(
            "formula `{phi}` evaluates to false on the decoded word"
        ))),
        Err(e) => Err(BscError::ReplayFailed(e.to_string())),
    }
}

#[derive(Serialize, Deserialize)]
struct WitnessDoc {
    bound: usize,
    #[serde(rename = "loop")]
    loop_start: usize,
    states: Vec<Vec<String>>,
}

/// Serializes a witness as `{"bound": k, "loop": l, "states": [[..], ..]}`.
pub fn witness_to_json(w: &LassoWord) -> String {
    let doc = WitnessDoc {
        bound: w.bound(),
        loop_start: w.loop_start(),
        states: w
            .states()
            .iter()
            .map(|s| s.iter().map(|p| p.to_string()).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("witness serialization cannot fail")
}

/// Parses a witness produced by [`witness_to_json`].  The atom universe is
/// recovered as the union of the stored states.
pub fn witness_from_json(text: &str) -> Result<LassoWord, String> {
    let doc: WitnessDoc = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if doc.states.len() != doc.bound + 1 {
        return Err(format!(
            "bound {} does not match {} states",
            doc.bound,
            doc.states.len()
        ));
    }
    let states: Vec<std::collections::BTreeSet<std::sync::Arc<str>>> = doc
        .states
        .iter()
        .map(|s| s.iter().map(|p| std::sync::Arc::from(p.as_str())).collect())
        .collect();
    let universe = states.iter().flatten().cloned().collect();
    LassoWord::new(universe, states, doc.loop_start).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn sat(s: &str, k: usize) -> LassoWord {
        match check_sat(&f(s), k).unwrap().verdict {
            CheckVerdict::Sat(w) => w,
            CheckVerdict::UnsatWithinBound => panic!("expected sat for `{s}` at k={k}"),
        }
    }

    fn unsat(s: &str, k: usize) {
        match check_sat(&f(s), k).unwrap().verdict {
            CheckVerdict::Sat(w) => panic!("expected unsat for `{s}` at k={k}, got {w:?}"),
            CheckVerdict::UnsatWithinBound => {}
        }
    }

    #[test]
    fn single_atom_is_satisfiable_at_the_smallest_bound() {
        let w = sat("p", 1);
        assert!(w.state_at(0).contains("p"));
        assert_eq!(w.bound(), 1);
    }

    #[test]
    fn conflicting_invariants_are_unsatisfiable() {
        for k in 1..=4 {
            unsat("G p && F !p", k);
            unsat("p && !p", k);
        }
    }

    #[test]
    fn alternation_forces_a_period_two_loop() {
        let w = sat("p && G (p -> X !p) && G (!p -> X p)", 2);
        for i in 0..6 {
            assert_eq!(w.state_at(i).contains("p"), i % 2 == 0, "position {i}");
        }
    }

    #[test]
    fn yesterday_is_false_at_the_origin() {
        unsat("Y true", 3);
        let w = sat("X Y true", 1);
        assert_eq!(w.bound(), 1);
    }

    #[test]
    fn since_reaches_back_to_the_origin() {
        let w = sat("X X (q S p) && G !q", 2);
        // With q never holding, the since can only be discharged by p.
        assert!(w.state_at(0).contains("p") || w.state_at(1).contains("p") || w.state_at(2).contains("p"));
        unsat("(true S p) && G !p", 3);
    }

    #[test]
    fn until_inside_the_loop_needs_its_goal() {
        // F p with p nowhere is the classic spurious-loop trap.
        unsat("F p && G !p", 4);
        let w = sat("F p && !p", 3);
        assert!(!w.state_at(0).contains("p"));
    }

    #[test]
    fn release_holds_when_the_operand_is_loop_wide() {
        let w = sat("q R p", 2);
        assert!(w.state_at(0).contains("p"));
        unsat("(false R p) && F !p", 3);
    }

    #[test]
    fn constant_formulas_need_no_atoms() {
        let w = sat("true", 1);
        assert!(w.universe().is_empty());
        unsat("false", 2);
    }

    #[test]
    fn bound_zero_is_rejected() {
        assert_eq!(check_sat(&f("p"), 0), Err(BscError::BoundTooSmall(0)));
    }

    #[test]
    fn property_check_reports_counterexamples() {
        let r = check_property(&f("true"), &f("G p"), 3).unwrap();
        match r.verdict {
            PropertyVerdict::Counterexample(w) => {
                assert!(eval(&w, 0, &f("!(G p)")).unwrap());
            }
            PropertyVerdict::NoCounterexampleWithinBound => panic!("expected counterexample"),
        }
        let r = check_property(&f("G p"), &f("G p"), 3).unwrap();
        assert_eq!(r.verdict, PropertyVerdict::NoCounterexampleWithinBound);
        assert!(r.stats.variables > 0 && r.stats.clauses > 0);
    }

    #[test]
    fn past_and_future_interact_across_the_loop() {
        // Somewhere in the loop, p happened strictly earlier: needs the
        // yesterday/since copies to line up across the wrap.
        let w = sat("G F (Y (true S p))", 3);
        assert!(eval(&w, 0, &f("G F (Y (true S p))")).unwrap());
        unsat("G F (Y (true S p)) && G !p", 3);
    }

    #[test]
    fn witness_json_round_trips() {
        let w = sat("p && X !p && X X q", 3);
        let text = witness_to_json(&w);
        let back = witness_from_json(&text).unwrap();
        assert_eq!(back.bound(), w.bound());
        assert_eq!(back.loop_start(), w.loop_start());
        for i in 0..=w.bound() {
            assert_eq!(back.state_at(i), w.state_at(i), "state {i}");
        }
        assert!(witness_from_json("{\"bound\": 2, \"loop\": 1, \"states\": [[]]}").is_err());
    }
}
