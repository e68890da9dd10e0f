//! LTL with past: abstract syntax, textual syntax, and an exact evaluator
//! over ultimately periodic (lasso) words.
//!
//! The operator set is `X` (next), `Y` (yesterday), `U` (until), `S`
//! (since), plus the derived `R` (release), `G` (globally) and `F`
//! (eventually), over the time domain `(ℕ, <)`.  `Y φ` is false at the
//! origin.  `U` is the strong until (`∃ j ≥ i` with the left operand on
//! `[i, j)`); `S` is its past mirror (`∃ j ≤ i` with the left operand on
//! `(j, i]`).

mod lasso;
mod parse;

pub use lasso::{eval, satisfiable_on, EvalError, LassoError, LassoWord};
pub use parse::{parse_formula, ParseError};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// A formula of LTL with past.
///
/// Atoms carry interned proposition names compared by string equality.
/// `Implies`/`Iff` are surface sugar accepted by the evaluator directly and
/// eliminated by [`Formula::nnf`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Arc<str>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Yesterday(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Since(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Globally(Box<Formula>),
    Eventually(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<Arc<str>>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn yesterday(f: Formula) -> Self {
        Formula::Yesterday(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn since(a: Formula, b: Formula) -> Self {
        Formula::Since(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Formula::Release(Box::new(a), Box::new(b))
    }

    pub fn globally(f: Formula) -> Self {
        Formula::Globally(Box::new(f))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    /// Left-folded conjunction; `True` for an empty sequence.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Left-folded disjunction; `False` for an empty sequence.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::False,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    /// `X^n φ`.
    pub fn next_n(n: usize, f: Formula) -> Self {
        (0..n).fold(f, |acc, _| Formula::next(acc))
    }

    /// The set of proposition names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Not(f)
            | Formula::Next(f)
            | Formula::Yesterday(f)
            | Formula::Globally(f)
            | Formula::Eventually(f) => f.collect_atoms(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Until(a, b)
            | Formula::Since(a, b)
            | Formula::Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Maximum nesting depth of the past operators `Y` and `S`.
    ///
    /// This bounds how many loop traversals a lasso evaluation must unroll
    /// before every subformula value becomes periodic.
    pub fn past_height(&self) -> u32 {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 0,
            Formula::Not(f)
            | Formula::Next(f)
            | Formula::Globally(f)
            | Formula::Eventually(f) => f.past_height(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => a.past_height().max(b.past_height()),
            Formula::Yesterday(f) => f.past_height() + 1,
            Formula::Since(a, b) => a.past_height().max(b.past_height()) + 1,
        }
    }

    /// Negation normal form.
    ///
    /// `Implies`, `Iff`, `G` and `F` are eliminated (`G φ ≡ false R φ`,
    /// `F φ ≡ true U φ`) and negations are pushed inward through the
    /// Boolean and future operators (`¬(φ U ψ) ≡ ¬φ R ¬ψ` and dually).
    /// The language has no dual operators for `Y` and `S`, so a negation
    /// in front of them stays put with the operands normalized; negations
    /// therefore end up only on atoms and on `Y`/`S`-rooted subformulas.
    /// The result is equivalent to `self` at every position of every word.
    pub fn nnf(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => self.clone(),
            Formula::Not(f) => f.nnf_negated(),
            Formula::And(a, b) => Formula::and(a.nnf(), b.nnf()),
            Formula::Or(a, b) => Formula::or(a.nnf(), b.nnf()),
            Formula::Implies(a, b) => Formula::or(a.nnf_negated(), b.nnf()),
            Formula::Iff(a, b) => Formula::or(
                Formula::and(a.nnf(), b.nnf()),
                Formula::and(a.nnf_negated(), b.nnf_negated()),
            ),
            Formula::Next(f) => Formula::next(f.nnf()),
            Formula::Yesterday(f) => Formula::yesterday(f.nnf()),
            Formula::Until(a, b) => Formula::until(a.nnf(), b.nnf()),
            Formula::Since(a, b) => Formula::since(a.nnf(), b.nnf()),
            Formula::Release(a, b) => Formula::release(a.nnf(), b.nnf()),
            Formula::Globally(f) => Formula::release(Formula::False, f.nnf()),
            Formula::Eventually(f) => Formula::until(Formula::True, f.nnf()),
        }
    }

    /// NNF of `¬self`.
    fn nnf_negated(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(_) => Formula::not(self.clone()),
            Formula::Not(f) => f.nnf(),
            Formula::And(a, b) => Formula::or(a.nnf_negated(), b.nnf_negated()),
            Formula::Or(a, b) => Formula::and(a.nnf_negated(), b.nnf_negated()),
            Formula::Implies(a, b) => Formula::and(a.nnf(), b.nnf_negated()),
            Formula::Iff(a, b) => Formula::or(
                Formula::and(a.nnf(), b.nnf_negated()),
                Formula::and(a.nnf_negated(), b.nnf()),
            ),
            // ¬X φ ≡ X ¬φ over (ℕ, <): every position has a successor.
            Formula::Next(f) => Formula::next(f.nnf_negated()),
            Formula::Until(a, b) => Formula::release(a.nnf_negated(), b.nnf_negated()),
            Formula::Release(a, b) => Formula::until(a.nnf_negated(), b.nnf_negated()),
            Formula::Globally(f) => Formula::until(Formula::True, f.nnf_negated()),
            Formula::Eventually(f) => Formula::release(Formula::False, f.nnf_negated()),
            // No duals exist for the past operators; keep the negation.
            Formula::Yesterday(f) => Formula::not(Formula::yesterday(f.nnf())),
            Formula::Since(a, b) => Formula::not(Formula::since(a.nnf(), b.nnf())),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 6,
            Formula::Not(_)
            | Formula::Next(_)
            | Formula::Yesterday(_)
            | Formula::Globally(_)
            | Formula::Eventually(_) => 5,
            Formula::Until(..) | Formula::Since(..) | Formula::Release(..) => 4,
            Formula::And(..) => 3,
            Formula::Or(..) => 2,
            Formula::Implies(..) => 1,
            Formula::Iff(..) => 0,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        let paren = prec < min;
        if paren {
            write!(f, "(")?;
        }
        match self {
            Formula::True => write!(f, "true")?,
            Formula::False => write!(f, "false")?,
            Formula::Atom(p) => write!(f, "{p}")?,
            Formula::Not(x) => {
                write!(f, "!")?;
                x.fmt_prec(f, 5)?;
            }
            Formula::Next(x) => {
                write!(f, "X ")?;
                x.fmt_prec(f, 5)?;
            }
            Formula::Yesterday(x) => {
                write!(f, "Y ")?;
                x.fmt_prec(f, 5)?;
            }
            Formula::Globally(x) => {
                write!(f, "G ")?;
                x.fmt_prec(f, 5)?;
            }
            Formula::Eventually(x) => {
                write!(f, "F ")?;
                x.fmt_prec(f, 5)?;
            }
            // U/S/R are right-associative: print the left operand one
            // level tighter.
            Formula::Until(a, b) => {
                a.fmt_prec(f, 5)?;
                write!(f, " U ")?;
                b.fmt_prec(f, 4)?;
            }
            Formula::Since(a, b) => {
                a.fmt_prec(f, 5)?;
                write!(f, " S ")?;
                b.fmt_prec(f, 4)?;
            }
            Formula::Release(a, b) => {
                a.fmt_prec(f, 5)?;
                write!(f, " R ")?;
                b.fmt_prec(f, 4)?;
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " && ")?;
                b.fmt_prec(f, 4)?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " || ")?;
                b.fmt_prec(f, 3)?;
            }
            Formula::Implies(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 1)?;
            }
            Formula::Iff(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " <-> ")?;
                b.fmt_prec(f, 1)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    /// Renders in the CLI's textual syntax; `parse_formula` inverts it.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_formula(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn past_height_counts_nesting() {
        assert_eq!(p().past_height(), 0);
        assert_eq!(Formula::since(p(), Formula::yesterday(q())).past_height(), 2);
        let g = Formula::globally(Formula::implies(
            Formula::atom("t"),
            Formula::yesterday(Formula::atom("A")),
        ));
        assert_eq!(g.past_height(), 1);
    }

    #[test]
    fn nnf_pushes_through_future_operators() {
        assert_eq!(Formula::not(p()).nnf(), Formula::not(p()));
        assert_eq!(
            Formula::not(Formula::until(p(), q())).nnf(),
            Formula::release(Formula::not(p()), Formula::not(q()))
        );
        assert_eq!(
            Formula::not(Formula::globally(p())).nnf(),
            Formula::until(Formula::True, Formula::not(p()))
        );
        assert_eq!(Formula::not(Formula::not(p())).nnf(), p());
    }

    #[test]
    fn nnf_keeps_negation_on_past_operators() {
        let f = Formula::not(Formula::since(p(), Formula::Not(Box::new(Formula::Not(
            Box::new(q()),
        )))));
        assert_eq!(f.nnf(), Formula::not(Formula::since(p(), q())));
        assert_eq!(
            Formula::not(Formula::yesterday(p())).nnf(),
            Formula::not(Formula::yesterday(p()))
        );
    }

    #[test]
    fn nnf_eliminates_sugar() {
        assert_eq!(
            Formula::implies(p(), q()).nnf(),
            Formula::or(Formula::not(p()), q())
        );
        assert_eq!(
            Formula::eventually(p()).nnf(),
            Formula::until(Formula::True, p())
        );
        assert_eq!(
            Formula::globally(p()).nnf(),
            Formula::release(Formula::False, p())
        );
    }

    #[test]
    fn conj_and_disj_fold_left() {
        assert_eq!(Formula::conj([]), Formula::True);
        assert_eq!(Formula::disj([]), Formula::False);
        assert_eq!(Formula::conj([p()]), p());
        assert_eq!(Formula::conj([p(), q(), p()]),
            Formula::and(Formula::and(p(), q()), p()));
    }

    #[test]
    fn display_respects_precedence() {
        let f = Formula::and(Formula::until(p(), q()), Formula::atom("r"));
        assert_eq!(f.to_string(), "p U q && r");
        let g = Formula::until(Formula::or(p(), q()), Formula::atom("r"));
        assert_eq!(g.to_string(), "(p || q) U r");
        let h = Formula::not(Formula::and(p(), q()));
        assert_eq!(h.to_string(), "!(p && q)");
        let rel = Formula::release(Formula::False, p());
        assert_eq!(rel.to_string(), "false R p");
        let nested = Formula::until(Formula::until(p(), q()), Formula::atom("r"));
        assert_eq!(nested.to_string(), "(p U q) U r");
    }

    #[test]
    fn atoms_are_sorted_and_deduplicated() {
        let f = Formula::and(Formula::or(q(), p()), Formula::next(p()));
        let names: Vec<Arc<str>> = f.atoms().into_iter().collect();
        assert_eq!(names, vec![Arc::from("p"), Arc::from("q")]);
    }
}
