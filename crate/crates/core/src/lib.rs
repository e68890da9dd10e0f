//! Verifier for reconfigurable workflows.
//!
//! The pipeline has four stages:
//!
//! 1. [`workflow`] — parse and validate workflow graphs (activities,
//!    conditionals, parallel splits, uniquely labeled transitions).
//! 2. [`encoder`] — compile a two-configuration reconfiguration scenario
//!    into a single LTL-with-past formula.
//! 3. [`bsc`] — bounded satisfiability checking: search for an ultimately
//!    periodic model (a lasso word) of size at most `k` via a reduction to
//!    propositional SAT, and decode solver models back into witness traces.
//! 4. [`cli`] — the `reflow` command-line front end.
//!
//! [`ltl`] defines the formula language and an exact reference evaluator
//! over lasso words; every satisfiability verdict produced by [`bsc`] is
//! replayed against that evaluator before it is reported.
//!
//! ```
//! use reflow::bsc::{check_sat, CheckVerdict};
//! use reflow::ltl::parse_formula;
//!
//! let f = parse_formula("G (req -> F ack) && F req").unwrap();
//! match check_sat(&f, 10).unwrap().verdict {
//!     CheckVerdict::Sat(w) => assert!((0..=10).any(|i| w.state_at(i).contains("ack"))),
//!     CheckVerdict::UnsatWithinBound => unreachable!("a request/ack pair fits in bound 10"),
//! }
//! ```

pub mod bsc;
pub mod cli;
pub mod encoder;
pub mod ltl;
pub mod workflow;
