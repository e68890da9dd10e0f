//! Hash-consed formula DAG with constant folding.
//!
//! Shared subformulas are interned once, so the positional encoding pays
//! for each distinct subformula a single time.  Folding removes constant
//! children where the operator's semantics allows it; `Y true` is *not*
//! folded because it is false at the origin and true elsewhere.

use crate::ltl::Formula;
use std::collections::HashMap;
use std::sync::Arc;

pub(crate) type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum DagNode {
    True,
    False,
    Atom(Arc<str>),
    Not(NodeId),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    Next(NodeId),
    Yesterday(NodeId),
    Until(NodeId, NodeId),
    Since(NodeId, NodeId),
    Release(NodeId, NodeId),
}

pub(crate) struct Dag {
    nodes: Vec<DagNode>,
    past_height: Vec<u32>,
    index: HashMap<DagNode, NodeId>,
    root: NodeId,
}

impl Dag {
    /// Lowers a formula (normally already in NNF) into a folded DAG.
    /// Sugar operators are eliminated structurally.
    pub fn build(f: &Formula) -> Dag {
        let mut dag = Dag {
            nodes: Vec::new(),
            past_height: Vec::new(),
            index: HashMap::new(),
            root: 0,
        };
        dag.root = dag.lower(f);
        dag
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &DagNode {
        &self.nodes[id as usize]
    }

    /// Number of loop traversals after which this node's value has
    /// provably stabilized (0 for past-free nodes).
    pub fn past_height(&self, id: NodeId) -> u32 {
        self.past_height[id as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    fn lower(&mut self, f: &Formula) -> NodeId {
        match f {
            Formula::True => self.intern(DagNode::True),
            Formula::False => self.intern(DagNode::False),
            Formula::Atom(p) => self.intern(DagNode::Atom(p.clone())),
            Formula::Not(x) => {
                let c = self.lower(x);
                self.intern(DagNode::Not(c))
            }
            Formula::And(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                self.intern(DagNode::And(a, b))
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                self.intern(DagNode::Or(a, b))
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                let na = self.intern(DagNode::Not(a));
                self.intern(DagNode::Or(na, b))
            }
            Formula::Iff(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                let (na, nb) = (self.intern(DagNode::Not(a)), self.intern(DagNode::Not(b)));
                let lr = self.intern(DagNode::Or(na, b));
                let rl = self.intern(DagNode::Or(nb, a));
                self.intern(DagNode::And(lr, rl))
            }
            Formula::Next(x) => {
                let c = self.lower(x);
                self.intern(DagNode::Next(c))
            }
            Formula::Yesterday(x) => {
                let c = self.lower(x);
                self.intern(DagNode::Yesterday(c))
            }
            Formula::Until(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                self.intern(DagNode::Until(a, b))
            }
            Formula::Since(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                self.intern(DagNode::Since(a, b))
            }
            Formula::Release(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                self.intern(DagNode::Release(a, b))
            }
            Formula::Globally(x) => {
                let c = self.lower(x);
                let f = self.intern(DagNode::False);
                self.intern(DagNode::Release(f, c))
            }
            Formula::Eventually(x) => {
                let c = self.lower(x);
                let t = self.intern(DagNode::True);
                self.intern(DagNode::Until(t, c))
            }
        }
    }

    fn is(&self, id: NodeId, n: &DagNode) -> bool {
        &self.nodes[id as usize] == n
    }

    fn fold(&self, n: DagNode) -> DagNode {
        use DagNode::*;
        let t = |id: NodeId| self.is(id, &True);
        let f = |id: NodeId| self.is(id, &False);
        match n {
            Not(c) if t(c) => False,
            Not(c) if f(c) => True,
            Not(c) => {
                if let Not(inner) = self.nodes[c as usize] {
                    self.nodes[inner as usize].clone()
                } else {
                    Not(c)
                }
            }
            And(a, b) if a == b => self.nodes[a as usize].clone(),
            And(a, b) if t(a) => self.nodes[b as usize].clone(),
            And(a, b) if t(b) => self.nodes[a as usize].clone(),
            And(a, b) if f(a) || f(b) => False,
            Or(a, b) if a == b => self.nodes[a as usize].clone(),
            Or(a, b) if f(a) => self.nodes[b as usize].clone(),
            Or(a, b) if f(b) => self.nodes[a as usize].clone(),
            Or(a, b) if t(a) || t(b) => True,
            Next(c) if t(c) || f(c) => self.nodes[c as usize].clone(),
            // Y false is false everywhere; Y true is NOT constant (false
            // at the origin), so it stays.
            Yesterday(c) if f(c) => False,
            Until(a, b) if a == b => self.nodes[a as usize].clone(),
            Until(_, b) if t(b) => True,
            Until(_, b) if f(b) => False,
            Until(a, b) if f(a) => self.nodes[b as usize].clone(),
            Release(a, b) if a == b => self.nodes[a as usize].clone(),
            Release(_, b) if t(b) => True,
            Release(_, b) if f(b) => False,
            Release(a, b) if t(a) => self.nodes[b as usize].clone(),
            Since(a, b) if a == b => self.nodes[a as usize].clone(),
            Since(_, b) if t(b) => True,
            Since(_, b) if f(b) => False,
            Since(a, b) if f(a) => self.nodes[b as usize].clone(),
            other => other,
        }
    }

    fn intern(&mut self, n: DagNode) -> NodeId {
        let n = self.fold(n);
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        use DagNode::*;
        let ph = match &n {
            True | False | Atom(_) => 0,
            Not(c) | Next(c) => self.past_height[*c as usize],
            Yesterday(c) => self.past_height[*c as usize] + 1,
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => self.past_height
                [*a as usize]
                .max(self.past_height[*b as usize]),
            Since(a, b) => {
                self.past_height[*a as usize].max(self.past_height[*b as usize]) + 1
            }
        };
        let id = self.nodes.len() as NodeId;
        self.nodes.push(n.clone());
        self.past_height.push(ph);
        self.index.insert(n, id);
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(s: &str) -> Dag {
        Dag::build(&s.parse::<Formula>().unwrap())
    }

    #[test]
    fn shares_repeated_subformulas() {
        let dag = build("(p U q) && (p U q || r)");
        // p, q, r, pUq, or, and — six nodes, pUq interned once.
        assert_eq!(dag.len(), 6);
    }

    #[test]
    fn folds_constants() {
        let dag = build("p U true");
        assert!(matches!(dag.node(dag.root()), DagNode::True));
        let dag = build("p && false");
        assert!(matches!(dag.node(dag.root()), DagNode::False));
        let dag = build("false U q");
        assert!(matches!(dag.node(dag.root()), DagNode::Atom(_)));
        let dag = build("!!p");
        assert!(matches!(dag.node(dag.root()), DagNode::Atom(_)));
        let dag = build("p S p");
        assert!(matches!(dag.node(dag.root()), DagNode::Atom(_)));
    }

    #[test]
    fn yesterday_true_is_not_folded() {
        let dag = build("Y true");
        assert!(matches!(dag.node(dag.root()), DagNode::Yesterday(_)));
        assert_eq!(dag.past_height(dag.root()), 1);
    }

    #[test]
    fn past_height_per_node() {
        let dag = build("(p S Y q) U r");
        assert_eq!(dag.past_height(dag.root()), 2);
        let dag = build("G (t -> Y a)");
        assert_eq!(dag.past_height(dag.root()), 1);
    }

    #[test]
    fn sugar_is_lowered() {
        let dag = build("G p");
        assert!(matches!(dag.node(dag.root()), DagNode::Release(_, _)));
        let dag = build("F p");
        assert!(matches!(dag.node(dag.root()), DagNode::Until(_, _)));
        let dag = build("p -> q");
        assert!(matches!(dag.node(dag.root()), DagNode::Or(_, _)));
    }
}
