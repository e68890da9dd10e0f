//! Conflict-driven clause learning.
//!
//! The implementation follows the standard architecture: a trail of
//! assignments with decision levels and reasons, two watched literals per
//! clause, first-UIP learning, and activity-driven branching. Determinism
//! is part of the contract: branching ties break on the smallest variable
//! index and saved phases start at `false`, which biases models towards
//! sparse assignments.

use crate::cnf::{Assignment, Cnf};
use std::time::Instant;
use thiserror::Error;

/// Outcome of a solver run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// A satisfying assignment, verified against every input clause.
    Sat(Assignment),
    Unsat,
}

/// Failures distinct from an Unsat verdict.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("conflict budget of {budget} exhausted after {conflicts} conflicts")]
    BudgetExhausted { budget: u64, conflicts: u64 },
}

/// Counters describing a solver run.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learned: u64,
    pub solve_ms: u128,
}

const NO_REASON: u32 = u32::MAX;

const UNDEF: u8 = 0;
const VTRUE: u8 = 1;
const VFALSE: u8 = 2;

/// Literal in solver-internal encoding: variable `v` (0-based) maps to
/// `2v` (positive) and `2v + 1` (negative).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Lit(u32);

impl Lit {
    fn from_dimacs(l: i32) -> Lit {
        let v = l.unsigned_abs() - 1;
        Lit(v * 2 + u32::from(l < 0))
    }

    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

/// Flat clause arena. Each clause is stored as
/// `[len | flags, activity bits, lit 0, .., lit len-1]`.
struct ClauseDb {
    data: Vec<u32>,
}

const FLAG_LEARNED: u32 = 1 << 31;
const FLAG_DELETED: u32 = 1 << 30;
const LEN_MASK: u32 = (1 << 30) - 1;

impl ClauseDb {
    fn new() -> Self {
        ClauseDb { data: Vec::new() }
    }

    fn alloc(&mut self, lits: &[Lit], learned: bool) -> u32 {
        let cref = self.data.len() as u32;
        let mut header = lits.len() as u32;
        if learned {
            header |= FLAG_LEARNED;
        }
        self.data.push(header);
        self.data.push(0f32.to_bits());
        self.data.extend(lits.iter().map(|l| l.0));
        cref
    }

    fn len(&self, cref: u32) -> usize {
        (self.data[cref as usize] & LEN_MASK) as usize
    }

    fn is_learned(&self, cref: u32) -> bool {
        self.data[cref as usize] & FLAG_LEARNED != 0
    }

    fn is_deleted(&self, cref: u32) -> bool {
        self.data[cref as usize] & FLAG_DELETED != 0
    }

    fn delete(&mut self, cref: u32) {
        self.data[cref as usize] |= FLAG_DELETED;
    }

    fn lit(&self, cref: u32, i: usize) -> Lit {
        Lit(self.data[cref as usize + 2 + i])
    }

    fn swap_lits(&mut self, cref: u32, i: usize, j: usize) {
        let base = cref as usize + 2;
        self.data.swap(base + i, base + j);
    }

    fn activity(&self, cref: u32) -> f32 {
        f32::from_bits(self.data[cref as usize + 1])
    }

    fn set_activity(&mut self, cref: u32, a: f32) {
        self.data[cref as usize + 1] = a.to_bits();
    }
}

/// Max-heap over variables ordered by activity, ties broken towards the
/// smaller variable index.
struct VarOrder {
    heap: Vec<u32>,
    pos: Vec<i32>,
}

impl VarOrder {
    fn new(n: usize) -> Self {
        // All activities start equal, so the identity layout is a valid heap.
        VarOrder { heap: (0..n as u32).collect(), pos: (0..n as i32).collect() }
    }

    fn before(act: &[f64], a: u32, b: u32) -> bool {
        act[a as usize] > act[b as usize] || (act[a as usize] == act[b as usize] && a < b)
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] >= 0
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v as usize] = self.heap.len() as i32;
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn pop_max(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: u32, act: &[f64]) {
        let p = self.pos[v as usize];
        if p >= 0 {
            self.sift_up(p as usize, act);
        }
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if Self::before(act, self.heap[i], self.heap[parent]) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        loop {
            let l = 2 * i + 1;
            let r = 2 * i + 2;
            let mut best = i;
            if l < self.heap.len() && Self::before(act, self.heap[l], self.heap[best]) {
                best = l;
            }
            if r < self.heap.len() && Self::before(act, self.heap[r], self.heap[best]) {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i] as usize] = i as i32;
        self.pos[self.heap[j] as usize] = j as i32;
    }
}

/// CDCL solver for a borrowed [`Cnf`].
pub struct Solver<'a> {
    input: &'a Cnf,
    num_vars: usize,
    db: ClauseDb,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<u8>,
    phase: Vec<bool>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    order: VarOrder,
    seen: Vec<bool>,
    learned_refs: Vec<u32>,
    max_learned: usize,
    unsat_at_load: bool,
    stats: SolveStats,
}

impl<'a> Solver<'a> {
    pub fn new(input: &'a Cnf) -> Self {
        let n = input.num_vars() as usize;
        let mut s = Solver {
            input,
            num_vars: n,
            db: ClauseDb::new(),
            watches: vec![Vec::new(); 2 * n],
            assigns: vec![UNDEF; n],
            phase: vec![false; n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            cla_inc: 1.0,
            order: VarOrder::new(n),
            seen: vec![false; n],
            learned_refs: Vec::new(),
            max_learned: 0,
            unsat_at_load: false,
            stats: SolveStats::default(),
        };
        s.load_clauses();
        s.max_learned = (s.input.clauses().len() / 2).max(20_000);
        s
    }

    fn load_clauses(&mut self) {
        'next: for clause in self.input.clauses() {
            let mut lits: Vec<Lit> = clause.iter().map(|&l| Lit::from_dimacs(l)).collect();
            lits.sort_by_key(|l| l.0);
            lits.dedup();
            // A clause containing p and !p is a tautology.
            if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
                continue 'next;
            }
            match lits.len() {
                1 => {
                    if !self.enqueue(lits[0], NO_REASON) {
                        self.unsat_at_load = true;
                        return;
                    }
                }
                _ => {
                    let cref = self.db.alloc(&lits, false);
                    self.attach(cref);
                }
            }
        }
    }

    fn attach(&mut self, cref: u32) {
        let l0 = self.db.lit(cref, 0);
        let l1 = self.db.lit(cref, 1);
        self.watches[l0.index()].push(Watcher { cref, blocker: l1 });
        self.watches[l1.index()].push(Watcher { cref, blocker: l0 });
    }

    fn value_var(&self, v: usize) -> u8 {
        self.assigns[v]
    }

    fn value_lit(&self, l: Lit) -> u8 {
        match self.assigns[l.var()] {
            UNDEF => UNDEF,
            v => {
                if (v == VTRUE) != l.is_neg() {
                    VTRUE
                } else {
                    VFALSE
                }
            }
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Records `l` as true. Returns false when `l` is already false.
    fn enqueue(&mut self, l: Lit, reason: u32) -> bool {
        match self.value_lit(l) {
            VTRUE => true,
            VFALSE => false,
            _ => {
                let v = l.var();
                self.assigns[v] = if l.is_neg() { VFALSE } else { VTRUE };
                self.level[v] = self.decision_level();
                self.reason[v] = reason;
                self.trail.push(l);
                true
            }
        }
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p.negate();
            let mut ws = std::mem::take(&mut self.watches[false_lit.index()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            'watchers: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value_lit(w.blocker) == VTRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                if self.db.is_deleted(w.cref) {
                    continue; // watcher dropped
                }
                if self.db.lit(w.cref, 0) == false_lit {
                    self.db.swap_lits(w.cref, 0, 1);
                }
                debug_assert_eq!(self.db.lit(w.cref, 1), false_lit);
                let first = self.db.lit(w.cref, 0);
                if self.value_lit(first) == VTRUE {
                    ws[j] = Watcher { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let len = self.db.len(w.cref);
                for k in 2..len {
                    if self.value_lit(self.db.lit(w.cref, k)) != VFALSE {
                        self.db.swap_lits(w.cref, 1, k);
                        let new_watch = self.db.lit(w.cref, 1);
                        self.watches[new_watch.index()]
                            .push(Watcher { cref: w.cref, blocker: first });
                        continue 'watchers;
                    }
                }
                // No replacement watch: unit under the current assignment,
                // or conflicting.
                ws[j] = Watcher { cref: w.cref, blocker: first };
                j += 1;
                if !self.enqueue(first, w.cref) {
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                    conflict = Some(w.cref);
                    break;
                }
            }
            ws.truncate(j);
            self.watches[false_lit.index()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        if !self.db.is_learned(cref) {
            return;
        }
        let a = self.db.activity(cref) + self.cla_inc as f32;
        self.db.set_activity(cref, a);
        if a > 1e20 {
            for &c in &self.learned_refs.clone() {
                if !self.db.is_deleted(c) {
                    let scaled = self.db.activity(c) * 1e-20;
                    self.db.set_activity(c, scaled);
                }
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backtrack level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![Lit(0)];
        let mut path = 0u32;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let mut to_clear: Vec<usize> = Vec::new();

        loop {
            self.bump_clause(confl);
            let skip = usize::from(p.is_some());
            for k in skip..self.db.len(confl) {
                let q = self.db.lit(confl, k);
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    to_clear.push(v);
                    self.bump_var(v);
                    if self.level[v] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            path -= 1;
            if path == 0 {
                learnt[0] = lit.negate();
                break;
            }
            confl = self.reason[lit.var()];
            debug_assert_ne!(confl, NO_REASON);
        }

        // Self-subsumption: drop literals whose reason is covered by the
        // clause itself.
        let retain: Vec<Lit> = learnt[1..]
            .iter()
            .copied()
            .filter(|&l| !self.literal_redundant(l))
            .collect();
        learnt.truncate(1);
        learnt.extend(retain);

        let bt_level = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var()] > self.level[learnt[max_i].var()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var()]
        };

        for v in to_clear {
            self.seen[v] = false;
        }
        (learnt, bt_level)
    }

    fn literal_redundant(&self, l: Lit) -> bool {
        let r = self.reason[l.var()];
        if r == NO_REASON {
            return false;
        }
        (1..self.db.len(r)).all(|k| {
            let q = self.db.lit(r, k);
            self.seen[q.var()] || self.level[q.var()] == 0
        })
    }

    fn backtrack(&mut self, target: u32) {
        if self.decision_level() <= target {
            return;
        }
        let lim = self.trail_lim[target as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.phase[v] = !l.is_neg();
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.order.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(target as usize);
        self.qhead = lim;
    }

    fn reduce_learned(&mut self) {
        let act = |db: &ClauseDb, c: u32| db.activity(c);
        let mut live: Vec<u32> = self
            .learned_refs
            .iter()
            .copied()
            .filter(|&c| !self.db.is_deleted(c))
            .collect();
        live.sort_by(|&a, &b| {
            act(&self.db, b).partial_cmp(&act(&self.db, a)).unwrap().then(a.cmp(&b))
        });
        let keep = live.len() / 2;
        for &c in &live[keep..] {
            if self.db.len(c) > 2 && !self.is_locked(c) {
                self.db.delete(c);
            }
        }
        self.learned_refs = live;
        self.max_learned += self.max_learned / 10;
    }

    fn is_locked(&self, cref: u32) -> bool {
        let l0 = self.db.lit(cref, 0);
        self.value_lit(l0) == VTRUE && self.reason[l0.var()] == cref
    }

    fn pick_decision(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop_max(&self.activity) {
            if self.value_var(v as usize) == UNDEF {
                let positive = self.phase[v as usize];
                return Some(Lit(v * 2 + u32::from(!positive)));
            }
        }
        None
    }

    /// Runs the search to completion.
    pub fn solve(&mut self) -> Verdict {
        self.run(None).expect("unbounded run cannot exhaust a budget")
    }

    /// Runs the search, giving up after `max_conflicts` conflicts.
    pub fn solve_with_budget(&mut self, max_conflicts: u64) -> Result<Verdict, SolverError> {
        self.run(Some(max_conflicts))
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    fn run(&mut self, budget: Option<u64>) -> Result<Verdict, SolverError> {
        let start = Instant::now();
        let result = self.search(budget);
        self.stats.solve_ms = start.elapsed().as_millis();
        result
    }

    fn search(&mut self, budget: Option<u64>) -> Result<Verdict, SolverError> {
        if self.unsat_at_load {
            return Ok(Verdict::Unsat);
        }
        let mut restart_conflicts = 0u64;
        let mut restart_number = 0u32;
        let mut restart_limit = 100 * luby(0);

        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                restart_conflicts += 1;
                if let Some(b) = budget {
                    if self.stats.conflicts > b {
                        return Err(SolverError::BudgetExhausted {
                            budget: b,
                            conflicts: self.stats.conflicts,
                        });
                    }
                }
                if self.decision_level() == 0 {
                    return Ok(Verdict::Unsat);
                }
                let (learnt, bt) = self.analyze(confl);
                self.backtrack(bt);
                if learnt.len() == 1 {
                    let ok = self.enqueue(learnt[0], NO_REASON);
                    if !ok {
                        return Ok(Verdict::Unsat);
                    }
                } else {
                    let cref = self.db.alloc(&learnt, true);
                    self.attach(cref);
                    self.learned_refs.push(cref);
                    self.stats.learned += 1;
                    self.bump_clause(cref);
                    let ok = self.enqueue(learnt[0], cref);
                    debug_assert!(ok);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
            } else {
                if restart_conflicts >= restart_limit {
                    restart_conflicts = 0;
                    restart_number += 1;
                    restart_limit = 100 * luby(restart_number);
                    self.stats.restarts += 1;
                    self.backtrack(0);
                    if self.learned_refs.len() > self.max_learned {
                        self.reduce_learned();
                    }
                    continue;
                }
                match self.pick_decision() {
                    None => {
                        let model = self.extract_model();
                        assert!(
                            model.satisfies(self.input),
                            "model verification failed: solver produced a bad assignment"
                        );
                        return Ok(Verdict::Sat(model));
                    }
                    Some(l) => {
                        self.stats.decisions += 1;
                        self.trail_lim.push(self.trail.len());
                        let ok = self.enqueue(l, NO_REASON);
                        debug_assert!(ok);
                    }
                }
            }
        }
    }

    fn extract_model(&self) -> Assignment {
        let values = (0..self.num_vars).map(|v| self.assigns[v] == VTRUE).collect();
        Assignment::from_values(values)
    }
}

/// Luby restart sequence (0-indexed): 1, 1, 2, 1, 1, 2, 4, ...
fn luby(x: u32) -> u64 {
    let mut size: u64 = 1;
    let mut seq: u32 = 0;
    while size < u64::from(x) + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = u64::from(x);
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1 << seq
}

/// Solves `cnf` from scratch with default settings.
pub fn solve(cnf: &Cnf) -> Verdict {
    Solver::new(cnf).solve()
}
