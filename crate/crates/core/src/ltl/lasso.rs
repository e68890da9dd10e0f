//! Ultimately periodic words and the exact evaluator.
//!
//! A [`LassoWord`] denotes the infinite word `αβ^ω`: states `0..l-1` are
//! the prefix `α` and states `l..k` the loop `β`, so position `i > k`
//! reads state `l + ((i - l) mod (k - l + 1))`.
//!
//! Evaluation is exact, including past operators across the loop.  A loop
//! position has different histories on successive traversals, but the
//! value of any subformula at loop offset `o` on traversal `τ` is the same
//! for all `τ ≥ past_height`: past-operator values follow recurrences of
//! the shape `x' = a ∨ (b ∧ x)`, which are idempotent after one
//! application, so each `Y`/`S` layer needs at most one extra traversal.
//! The evaluator therefore unrolls `L = |α| + (past_height + 1)·|β|`
//! positions, identifies position `L` with `L - |β|`, and computes
//! least fixpoints for `U`/`F` and greatest fixpoints for `R`/`G` on the
//! resulting finite position graph.

use super::Formula;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Construction error for [`LassoWord`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LassoError {
    /// Fewer than two states (bound `k ≥ 1` means `k + 1 ≥ 2` states).
    TooShort,
    /// `loop_start` outside `1..=k`.
    LoopOutOfRange { loop_start: usize, bound: usize },
    /// A state mentions a proposition missing from the universe.
    StateOutsideUniverse { position: usize, name: Arc<str> },
}

impl fmt::Display for LassoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LassoError::TooShort => write!(f, "a lasso word needs at least two states"),
            LassoError::LoopOutOfRange { loop_start, bound } => write!(
                f,
                "loop start {loop_start} outside 1..={bound} (bound {bound})"
            ),
            LassoError::StateOutsideUniverse { position, name } => write!(
                f,
                "state {position} contains `{name}` which is not in the universe"
            ),
        }
    }
}

impl std::error::Error for LassoError {}

/// Evaluation error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    /// The formula mentions a proposition outside the word's universe.
    UnknownAtom { name: Arc<str> },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UnknownAtom { name } => {
                write!(f, "unknown proposition `{name}`")
            }
        }
    }
}

impl std::error::Error for EvalError {}

/// A finite representation `αβ^ω` of an infinite word over subsets of a
/// proposition universe: `k + 1` states (positions `0..=k`) and a loop
/// starting at `1 <= loop_start <= k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoWord {
    universe: BTreeSet<Arc<str>>,
    states: Vec<BTreeSet<Arc<str>>>,
    loop_start: usize,
}

impl LassoWord {
    pub fn new(
        universe: BTreeSet<Arc<str>>,
        states: Vec<BTreeSet<Arc<str>>>,
        loop_start: usize,
    ) -> Result<Self, LassoError> {
        if states.len() < 2 {
            return Err(LassoError::TooShort);
        }
        let bound = states.len() - 1;
        if loop_start < 1 || loop_start > bound {
            return Err(LassoError::LoopOutOfRange { loop_start, bound });
        }
        for (position, state) in states.iter().enumerate() {
            if let Some(name) = state.iter().find(|a| !universe.contains(*a)) {
                return Err(LassoError::StateOutsideUniverse {
                    position,
                    name: name.clone(),
                });
            }
        }
        Ok(LassoWord {
            universe,
            states,
            loop_start,
        })
    }

    /// The bound `k`; the word has `k + 1` states.
    pub fn bound(&self) -> usize {
        self.states.len() - 1
    }

    pub fn loop_start(&self) -> usize {
        self.loop_start
    }

    /// Loop length `|β| = k - loop_start + 1`.
    pub fn period(&self) -> usize {
        self.states.len() - self.loop_start
    }

    pub fn universe(&self) -> &BTreeSet<Arc<str>> {
        &self.universe
    }

    pub fn states(&self) -> &[BTreeSet<Arc<str>>] {
        &self.states
    }

    /// State of the denoted infinite word at any position.
    pub fn state_at(&self, i: usize) -> &BTreeSet<Arc<str>> {
        if i < self.states.len() {
            &self.states[i]
        } else {
            let l = self.loop_start;
            &self.states[l + (i - l) % self.period()]
        }
    }

    /// Same infinite word with bound `k + 1`: unrolls one loop step, so
    /// `αβ^ω` with `β = b₀b₁…` becomes `α b₀ (b₁…b₀)^ω`.
    pub fn pad_once(&self) -> LassoWord {
        let mut states = self.states.clone();
        states.push(states[self.loop_start].clone());
        LassoWord {
            universe: self.universe.clone(),
            states,
            loop_start: self.loop_start + 1,
        }
    }
}

/// `eval(word, 0, φ)`.
pub fn satisfiable_on(word: &LassoWord, phi: &Formula) -> Result<bool, EvalError> {
    eval(word, 0, phi)
}

/// Truth value of `φ` at position `i` of the denoted infinite word.
pub fn eval(word: &LassoWord, i: usize, phi: &Formula) -> Result<bool, EvalError> {
    if let Some(name) = phi
        .atoms()
        .into_iter()
        .find(|a| !word.universe().contains(a))
    {
        return Err(EvalError::UnknownAtom { name });
    }
    let period = word.period();
    let len = word.loop_start() + (phi.past_height() as usize + 1) * period;
    let ev = Evaluator { word, len, period };
    let vals = ev.values(phi);
    let pos = if i < len {
        i
    } else {
        // Values are periodic on the final unrolled traversal.
        let tail = len - period;
        tail + (i - tail) % period
    };
    Ok(vals[pos])
}

struct Evaluator<'a> {
    word: &'a LassoWord,
    len: usize,
    period: usize,
}

impl Evaluator<'_> {
    /// Successor in the finite position graph: the last unrolled position
    /// wraps to the start of the final traversal.
    fn succ(&self, v: usize) -> usize {
        if v + 1 < self.len {
            v + 1
        } else {
            self.len - self.period
        }
    }

    /// Least fixpoint of `x(v) = base(v) ∨ (step(v) ∧ x(succ v))`.
    fn lfp(&self, base: &[bool], step: &[bool]) -> Vec<bool> {
        let mut vals = vec![false; self.len];
        loop {
            let mut changed = false;
            for v in (0..self.len).rev() {
                let nv = base[v] || (step[v] && vals[self.succ(v)]);
                if nv != vals[v] {
                    vals[v] = nv;
                    changed = true;
                }
            }
            if !changed {
                return vals;
            }
        }
    }

    /// Greatest fixpoint of `x(v) = base(v) ∧ (step(v) ∨ x(succ v))`.
    fn gfp(&self, base: &[bool], step: &[bool]) -> Vec<bool> {
        let mut vals = vec![true; self.len];
        loop {
            let mut changed = false;
            for v in (0..self.len).rev() {
                let nv = base[v] && (step[v] || vals[self.succ(v)]);
                if nv != vals[v] {
                    vals[v] = nv;
                    changed = true;
                }
            }
            if !changed {
                return vals;
            }
        }
    }

    fn values(&self, f: &Formula) -> Vec<bool> {
        match f {
            Formula::True => vec![true; self.len],
            Formula::False => vec![false; self.len],
            Formula::Atom(p) => (0..self.len)
                .map(|v| self.word.state_at(v).contains(p))
                .collect(),
            Formula::Not(x) => self.values(x).into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => {
                let (va, vb) = (self.values(a), self.values(b));
                va.into_iter().zip(vb).map(|(x, y)| x && y).collect()
            }
            Formula::Or(a, b) => {
                let (va, vb) = (self.values(a), self.values(b));
                va.into_iter().zip(vb).map(|(x, y)| x || y).collect()
            }
            Formula::Implies(a, b) => {
                let (va, vb) = (self.values(a), self.values(b));
                va.into_iter().zip(vb).map(|(x, y)| !x || y).collect()
            }
            Formula::Iff(a, b) => {
                let (va, vb) = (self.values(a), self.values(b));
                va.into_iter().zip(vb).map(|(x, y)| x == y).collect()
            }
            Formula::Next(x) => {
                let vx = self.values(x);
                (0..self.len).map(|v| vx[self.succ(v)]).collect()
            }
            Formula::Yesterday(x) => {
                let vx = self.values(x);
                (0..self.len).map(|v| v > 0 && vx[v - 1]).collect()
            }
            Formula::Since(a, b) => {
                let (va, vb) = (self.values(a), self.values(b));
                let mut vals = vec![false; self.len];
                for v in 0..self.len {
                    vals[v] = vb[v] || (v > 0 && va[v] && vals[v - 1]);
                }
                vals
            }
            Formula::Until(a, b) => {
                let (va, vb) = (self.values(a), self.values(b));
                self.lfp(&vb, &va)
            }
            Formula::Eventually(x) => {
                let vx = self.values(x);
                self.lfp(&vx, &vec![true; self.len])
            }
            Formula::Release(a, b) => {
                let (va, vb) = (self.values(a), self.values(b));
                self.gfp(&vb, &va)
            }
            Formula::Globally(x) => {
                let vx = self.values(x);
                self.gfp(&vx, &vec![false; self.len])
            }
        }
    }
}
