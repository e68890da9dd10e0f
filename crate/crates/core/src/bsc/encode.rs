//! Positional CNF encoding of LTL-with-past over lasso words.
//!
//! For bound `k` the word has positions `0..=k` and a loop start chosen by
//! the solver through selector variables `loop_1..loop_k` (exactly one
//! holds).  `InLoop_i` marks positions at or after the loop start.
//!
//! Every DAG node `n` gets `past_height(n) + 1` copies of one variable per
//! position.  Copy `τ` models the `τ+1`-th traversal of the loop (copy 0
//! additionally covers the prefix); values stabilize after `past_height`
//! traversals, so the final copy wraps onto itself and stands for all
//! later traversals.  A parent at copy `τ` reads child `c` at copy
//! `min(τ, past_height(c))`.
//!
//! Operators unfold as biconditional recurrences: `X`/`U`/`R` step
//! forward, crossing `k → loop_j` under the selector guard; `Y`/`S` step
//! backward, grounded at the origin on copy 0, and on later copies read
//! position `k` of the previous copy when crossing the loop start.  The
//! loop-back rings of `U` (least fixpoint) and `R` (greatest fixpoint)
//! each admit one spurious circular solution on the final copy, ruled out
//! by an eventuality chain over the loop: a pending until must see its
//! right operand inside the loop, and a release holding nowhere while its
//! operand holds loop-wide is forbidden.
//!
//! Copies `τ ≥ 1` are unconstrained at prefix positions; nothing reads
//! them there (backward reads are guarded by `InLoop`, and forward
//! prefix-position values on those copies feed only other unread values).

use super::dag::{Dag, DagNode, NodeId};
use super::BscError;
use crate::ltl::{Formula, LassoWord};
use reflow_sat::{Assignment, Cnf};
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

/// CNF encoding of "some lasso word with bound `k` satisfies the formula
/// at position 0", plus the maps needed to decode a model into a word.
pub struct BoundedEncoding {
    bound: usize,
    cnf: Cnf,
    atoms: Vec<Arc<str>>,
    atom_vars: Vec<Vec<u32>>,
    loop_vars: Vec<u32>,
}

impl BoundedEncoding {
    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn cnf(&self) -> &Cnf {
        &self.cnf
    }

    /// Selector variable for "the loop starts at position `j`", `1 <= j <= k`.
    pub fn loop_var(&self, j: usize) -> u32 {
        self.loop_vars[j - 1]
    }

    /// Variable of `atom` at position `i`, if the atom occurs in the
    /// source formula.
    pub fn atom_var(&self, atom: &str, i: usize) -> Option<u32> {
        let idx = self.atoms.binary_search_by(|a| (**a).cmp(atom)).ok()?;
        Some(self.atom_vars[idx][i])
    }

    /// Reads a satisfying assignment back into the lasso word it encodes.
    pub fn decode_witness(&self, assignment: &Assignment) -> Result<LassoWord, BscError> {
        let loop_start = (1..=self.bound)
            .find(|&j| assignment.value(self.loop_var(j)))
            .ok_or(BscError::NoLoopSelected)?;
        let universe: BTreeSet<Arc<str>> = self.atoms.iter().cloned().collect();
        let states = (0..=self.bound)
            .map(|i| {
                self.atoms
                    .iter()
                    .enumerate()
                    .filter(|(a, _)| assignment.value(self.atom_vars[*a][i]))
                    .map(|(_, name)| name.clone())
                    .collect()
            })
            .collect();
        Ok(LassoWord::new(universe, states, loop_start)
            .expect("encoding guarantees k >= 1, loop in 1..=k, states over the atom universe"))
    }
}

/// Encodes `phi` (normalized internally) over lasso words of bound
/// exactly `k`; since shorter words pad to longer ones, satisfiability of
/// the clause set decides existence of a model of bound `<= k`.
pub fn encode_bounded(phi: &Formula, k: usize) -> Result<BoundedEncoding, BscError> {
    if k < 1 {
        return Err(BscError::BoundTooSmall(k));
    }
    let dag = Dag::build(&phi.nnf());
    let mut b = Builder::new(&dag, k, phi.atoms());
    b.encode();
    Ok(BoundedEncoding {
        bound: k,
        cnf: b.cnf,
        atoms: b.atoms,
        atom_vars: b.atom_vars,
        loop_vars: b.loop_vars,
    })
}

struct Builder<'d> {
    dag: &'d Dag,
    k: usize,
    cnf: Cnf,
    /// Literal that is always true (`-t_lit` is always false).
    t_lit: i32,
    loop_vars: Vec<u32>,
    in_loop: Vec<u32>,
    atoms: Vec<Arc<str>>,
    atom_index: HashMap<Arc<str>, usize>,
    atom_vars: Vec<Vec<u32>>,
    node_vars: Vec<Vec<u32>>,
}

impl<'d> Builder<'d> {
    fn new(dag: &'d Dag, k: usize, atom_set: BTreeSet<Arc<str>>) -> Self {
        let mut cnf = Cnf::new(0);
        let t = cnf.fresh_var();
        cnf.push_clause(vec![t as i32]);

        let loop_vars: Vec<u32> = (0..k).map(|_| cnf.fresh_var()).collect();
        cnf.push_clause(loop_vars.iter().map(|&v| v as i32).collect::<Vec<_>>());
        for a in 0..loop_vars.len() {
            for b in a + 1..loop_vars.len() {
                cnf.push_clause(vec![-(loop_vars[a] as i32), -(loop_vars[b] as i32)]);
            }
        }

        // InLoop_0 is false (the loop starts at 1 or later);
        // InLoop_i <-> InLoop_{i-1} \/ loop_i.
        let in_loop: Vec<u32> = (0..=k).map(|_| cnf.fresh_var()).collect();
        cnf.push_clause(vec![-(in_loop[0] as i32)]);
        for i in 1..=k {
            let (x, prev, l) = (
                in_loop[i] as i32,
                in_loop[i - 1] as i32,
                loop_vars[i - 1] as i32,
            );
            cnf.push_clause(vec![x, -prev]);
            cnf.push_clause(vec![x, -l]);
            cnf.push_clause(vec![-x, prev, l]);
        }

        let atoms: Vec<Arc<str>> = atom_set.into_iter().collect();
        let atom_index = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let atom_vars = atoms
            .iter()
            .map(|_| (0..=k).map(|_| cnf.fresh_var()).collect())
            .collect();

        let mut node_vars = vec![Vec::new(); dag.len()];
        for id in 0..dag.len() as NodeId {
            match dag.node(id) {
                DagNode::True | DagNode::False | DagNode::Atom(_) => {}
                _ => {
                    let copies = dag.past_height(id) as usize + 1;
                    node_vars[id as usize] =
                        (0..copies * (k + 1)).map(|_| cnf.fresh_var()).collect();
                }
            }
        }

        Builder {
            dag,
            k,
            cnf,
            t_lit: t as i32,
            loop_vars,
            in_loop,
            atoms,
            atom_index,
            atom_vars,
            node_vars,
        }
    }

    /// Literal of node `n` on traversal `tau` (clamped to the node's
    /// stabilization height) at position `i`.
    fn lit(&self, n: NodeId, tau: u32, i: usize) -> i32 {
        match self.dag.node(n) {
            DagNode::True => self.t_lit,
            DagNode::False => -self.t_lit,
            DagNode::Atom(p) => self.atom_vars[self.atom_index[p]][i] as i32,
            _ => {
                let tau = tau.min(self.dag.past_height(n)) as usize;
                self.node_vars[n as usize][tau * (self.k + 1) + i] as i32
            }
        }
    }

    fn emit(&mut self, guard: Option<i32>, mut clause: Vec<i32>) {
        if let Some(g) = guard {
            clause.insert(0, -g);
        }
        self.cnf.push_clause(clause);
    }

    /// x <-> y
    fn alias(&mut self, g: Option<i32>, x: i32, y: i32) {
        self.emit(g, vec![-x, y]);
        self.emit(g, vec![x, -y]);
    }

    /// x <-> a /\ b
    fn def_and(&mut self, g: Option<i32>, x: i32, a: i32, b: i32) {
        self.emit(g, vec![-x, a]);
        self.emit(g, vec![-x, b]);
        self.emit(g, vec![x, -a, -b]);
    }

    /// x <-> a \/ b
    fn def_or(&mut self, g: Option<i32>, x: i32, a: i32, b: i32) {
        self.emit(g, vec![x, -a]);
        self.emit(g, vec![x, -b]);
        self.emit(g, vec![-x, a, b]);
    }

    /// x <-> b \/ (a /\ y) — the until/since unfolding step.
    fn def_or_step(&mut self, g: Option<i32>, x: i32, b: i32, a: i32, y: i32) {
        self.emit(g, vec![-x, b, a]);
        self.emit(g, vec![-x, b, y]);
        self.emit(g, vec![x, -b]);
        self.emit(g, vec![x, -a, -y]);
    }

    /// x <-> b /\ (a \/ y) — the release unfolding step.
    fn def_and_step(&mut self, g: Option<i32>, x: i32, b: i32, a: i32, y: i32) {
        self.emit(g, vec![-x, b]);
        self.emit(g, vec![-x, a, y]);
        self.emit(g, vec![x, -b, -a]);
        self.emit(g, vec![x, -b, -y]);
    }

    fn encode(&mut self) {
        for id in 0..self.dag.len() as NodeId {
            let node = self.dag.node(id).clone();
            let ph = self.dag.past_height(id);
            for tau in 0..=ph {
                self.encode_copy(id, &node, tau, ph);
            }
        }
        let root = self.dag.root();
        let r = self.lit(root, 0, 0);
        self.cnf.push_clause(vec![r]);
    }

    fn encode_copy(&mut self, id: NodeId, node: &DagNode, tau: u32, ph: u32) {
        let k = self.k;
        match *node {
            DagNode::True | DagNode::False | DagNode::Atom(_) => {}
            DagNode::Not(c) => {
                for i in 0..=k {
                    let (x, y) = (self.lit(id, tau, i), self.lit(c, tau, i));
                    self.alias(None, x, -y);
                }
            }
            DagNode::And(a, b) => {
                for i in 0..=k {
                    let (x, la, lb) = (
                        self.lit(id, tau, i),
                        self.lit(a, tau, i),
                        self.lit(b, tau, i),
                    );
                    self.def_and(None, x, la, lb);
                }
            }
            DagNode::Or(a, b) => {
                for i in 0..=k {
                    let (x, la, lb) = (
                        self.lit(id, tau, i),
                        self.lit(a, tau, i),
                        self.lit(b, tau, i),
                    );
                    self.def_or(None, x, la, lb);
                }
            }
            DagNode::Next(c) => {
                for i in 0..k {
                    let (x, y) = (self.lit(id, tau, i), self.lit(c, tau, i + 1));
                    self.alias(None, x, y);
                }
                for j in 1..=k {
                    let g = self.loop_vars[j - 1] as i32;
                    let (x, y) = (self.lit(id, tau, k), self.lit(c, tau + 1, j));
                    self.alias(Some(g), x, y);
                }
            }
            DagNode::Yesterday(c) => {
                if tau == 0 {
                    let x0 = self.lit(id, 0, 0);
                    self.cnf.push_clause(vec![-x0]);
                    for i in 1..=k {
                        let (x, y) = (self.lit(id, 0, i), self.lit(c, 0, i - 1));
                        self.alias(None, x, y);
                    }
                } else {
                    for i in 1..=k {
                        let within = self.in_loop[i - 1] as i32;
                        let (x, y) = (self.lit(id, tau, i), self.lit(c, tau, i - 1));
                        self.alias(Some(within), x, y);
                        let cross = self.loop_vars[i - 1] as i32;
                        let yk = self.lit(c, tau - 1, k);
                        self.alias(Some(cross), x, yk);
                    }
                }
            }
            DagNode::Since(a, b) => {
                if tau == 0 {
                    let (x0, b0) = (self.lit(id, 0, 0), self.lit(b, 0, 0));
                    self.alias(None, x0, b0);
                    for i in 1..=k {
                        let (x, lb, la, prev) = (
                            self.lit(id, 0, i),
                            self.lit(b, 0, i),
                            self.lit(a, 0, i),
                            self.lit(id, 0, i - 1),
                        );
                        self.def_or_step(None, x, lb, la, prev);
                    }
                } else {
                    for i in 1..=k {
                        let (x, lb, la) = (
                            self.lit(id, tau, i),
                            self.lit(b, tau, i),
                            self.lit(a, tau, i),
                        );
                        let within = self.in_loop[i - 1] as i32;
                        let prev = self.lit(id, tau, i - 1);
                        self.def_or_step(Some(within), x, lb, la, prev);
                        let cross = self.loop_vars[i - 1] as i32;
                        let prev_copy = self.lit(id, tau - 1, k);
                        self.def_or_step(Some(cross), x, lb, la, prev_copy);
                    }
                }
            }
            DagNode::Until(a, b) => {
                for i in 0..k {
                    let (x, lb, la, next) = (
                        self.lit(id, tau, i),
                        self.lit(b, tau, i),
                        self.lit(a, tau, i),
                        self.lit(id, tau, i + 1),
                    );
                    self.def_or_step(None, x, lb, la, next);
                }
                for j in 1..=k {
                    let g = self.loop_vars[j - 1] as i32;
                    let (x, lb, la, next) = (
                        self.lit(id, tau, k),
                        self.lit(b, tau, k),
                        self.lit(a, tau, k),
                        self.lit(id, tau + 1, j),
                    );
                    self.def_or_step(Some(g), x, lb, la, next);
                }
                if tau == ph {
                    // Least fixpoint: a pending until at the wrap must see
                    // its right operand somewhere inside the loop.
                    let mut prev = -self.t_lit;
                    let mut chain_k = prev;
                    for i in 0..=k {
                        let e = self.cnf.fresh_var() as i32;
                        let (g, lb) = (self.in_loop[i] as i32, self.lit(b, tau, i));
                        self.def_or_step(None, e, prev, g, lb);
                        prev = e;
                        chain_k = e;
                    }
                    let xk = self.lit(id, tau, k);
                    self.cnf.push_clause(vec![-xk, chain_k]);
                }
            }
            DagNode::Release(a, b) => {
                for i in 0..k {
                    let (x, lb, la, next) = (
                        self.lit(id, tau, i),
                        self.lit(b, tau, i),
                        self.lit(a, tau, i),
                        self.lit(id, tau, i + 1),
                    );
                    self.def_and_step(None, x, lb, la, next);
                }
                for j in 1..=k {
                    let g = self.loop_vars[j - 1] as i32;
                    let (x, lb, la, next) = (
                        self.lit(id, tau, k),
                        self.lit(b, tau, k),
                        self.lit(a, tau, k),
                        self.lit(id, tau + 1, j),
                    );
                    self.def_and_step(Some(g), x, lb, la, next);
                }
                if tau == ph {
                    // Greatest fixpoint: if the right operand holds at
                    // every loop position, the release holds at the wrap.
                    let mut prev = self.t_lit;
                    let mut chain_k = prev;
                    for i in 0..=k {
                        let e = self.cnf.fresh_var() as i32;
                        let (g, lb) = (self.in_loop[i] as i32, self.lit(b, tau, i));
                        // e <-> prev /\ (!g \/ lb)
                        self.emit(None, vec![-e, prev]);
                        self.emit(None, vec![-e, -g, lb]);
                        self.emit(None, vec![e, -prev, g]);
                        self.emit(None, vec![e, -prev, -lb]);
                        prev = e;
                        chain_k = e;
                    }
                    let xk = self.lit(id, tau, k);
                    self.cnf.push_clause(vec![-chain_k, xk]);
                }
            }
        }
    }
}
