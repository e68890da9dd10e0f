//! Workflow graphs: activities and structural nodes connected by labeled
//! transitions.
//!
//! A graph has exactly one `Start` and one `End` node (checked by
//! [`WorkflowGraph::validate`], not construction), node names and
//! transition labels are unique, and every edge references declared
//! nodes.  Graphs are immutable after construction and safe to share
//! across concurrent verification tasks.

mod parse;

pub use parse::{parse_workflow, WorkflowParseError};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// What a node *is*; drives both validation arity rules and the choice of
/// translation rules applied to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Start,
    End,
    Activity,
    Conditional,
    SplitFork,
    SplitJoin,
}

impl NodeKind {
    /// Declaration keyword in the workflow file format.
    pub fn keyword(self) -> &'static str {
        match self {
            NodeKind::Start => "start",
            NodeKind::End => "end",
            NodeKind::Activity => "activity",
            NodeKind::Conditional => "cond",
            NodeKind::SplitFork => "fork",
            NodeKind::SplitJoin => "join",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub name: Arc<str>,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionEdge {
    pub label: Arc<str>,
    pub source: Arc<str>,
    pub target: Arc<str>,
}

/// Construction/lookup errors. Structural problems that a syntactically
/// well-formed graph can still have (missing start, arity, dangling
/// accepts) are reported by [`WorkflowGraph::validate`] instead.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("duplicate node `{0}`")]
    DuplicateNode(Arc<str>),
    #[error("duplicate transition label `{0}`")]
    DuplicateLabel(Arc<str>),
    #[error("transition `{label}` references unknown node `{node}`")]
    DanglingEdge { label: Arc<str>, node: Arc<str> },
    #[error("unknown node `{0}`")]
    UnknownNode(Arc<str>),
}

/// One structural violation; `rule` is a stable machine-readable
/// identifier, `subject` the offending node/edge name (or the graph name
/// for graph-level rules).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub subject: Arc<str>,
    pub rule: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.subject, self.rule, self.message)
    }
}

/// Outcome of [`WorkflowGraph::validate`]; empty ⇔ the graph is valid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    fn push(&mut self, subject: &Arc<str>, rule: &'static str, message: String) {
        self.violations.push(Violation {
            subject: subject.clone(),
            rule,
            message,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A named workflow graph. Nodes are kept sorted by name and edges by
/// label, so every iteration over the graph is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkflowGraph {
    name: String,
    nodes: Vec<Node>,
    edges: Vec<TransitionEdge>,
    accept: BTreeSet<Arc<str>>,
}

impl WorkflowGraph {
    pub fn new(
        name: impl Into<String>,
        mut nodes: Vec<Node>,
        mut edges: Vec<TransitionEdge>,
        accept: BTreeSet<Arc<str>>,
    ) -> Result<Self, GraphError> {
        nodes.sort_by(|a, b| a.name.cmp(&b.name));
        if let Some(w) = nodes.windows(2).find(|w| w[0].name == w[1].name) {
            return Err(GraphError::DuplicateNode(w[0].name.clone()));
        }
        edges.sort_by(|a, b| a.label.cmp(&b.label));
        if let Some(w) = edges.windows(2).find(|w| w[0].label == w[1].label) {
            return Err(GraphError::DuplicateLabel(w[0].label.clone()));
        }
        let graph = WorkflowGraph {
            name: name.into(),
            nodes,
            edges,
            accept,
        };
        for e in &graph.edges {
            for endpoint in [&e.source, &e.target] {
                if graph.node(endpoint).is_none() {
                    return Err(GraphError::DanglingEdge {
                        label: e.label.clone(),
                        node: endpoint.clone(),
                    });
                }
            }
        }
        Ok(graph)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// All nodes, sorted by name.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// All edges, sorted by label.
    pub fn edges(&self) -> &[TransitionEdge] {
        &self.edges
    }

    pub fn accept(&self) -> &BTreeSet<Arc<str>> {
        &self.accept
    }

    pub fn node(&self, name: &str) -> Option<&Node> {
        self.nodes
            .binary_search_by(|n| (*n.name).cmp(name))
            .ok()
            .map(|i| &self.nodes[i])
    }

    /// Edges leaving `node`, in label order.
    pub fn outgoing(&self, node: &str) -> Result<Vec<&TransitionEdge>, GraphError> {
        if self.node(node).is_none() {
            return Err(GraphError::UnknownNode(node.into()));
        }
        Ok(self.edges.iter().filter(|e| &*e.source == node).collect())
    }

    /// Edges entering `node`, in label order.
    pub fn incoming(&self, node: &str) -> Result<Vec<&TransitionEdge>, GraphError> {
        if self.node(node).is_none() {
            return Err(GraphError::UnknownNode(node.into()));
        }
        Ok(self.edges.iter().filter(|e| &*e.target == node).collect())
    }

    /// Checks the structural rules a well-formed workflow must satisfy:
    /// exactly one start and one end, every non-end node has a way out,
    /// every non-start node a way in, conditionals branch exactly twice,
    /// forks/joins have split arities, and accepted activities exist.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let graph_name: Arc<str> = Arc::from(self.name.as_str());

        for (kind, rule_missing, rule_dup) in [
            (NodeKind::Start, "missing-start", "duplicate-start"),
            (NodeKind::End, "missing-end", "duplicate-end"),
        ] {
            let named: Vec<&Arc<str>> = self
                .nodes
                .iter()
                .filter(|n| n.kind == kind)
                .map(|n| &n.name)
                .collect();
            if named.is_empty() {
                report.push(
                    &graph_name,
                    rule_missing,
                    format!("no {} node declared", kind.keyword()),
                );
            } else if named.len() > 1 {
                let list: Vec<&str> = named.iter().map(|n| &***n).collect();
                report.push(
                    &graph_name,
                    rule_dup,
                    format!(
                        "{} {} nodes declared: {}",
                        named.len(),
                        kind.keyword(),
                        list.join(", ")
                    ),
                );
            }
        }

        for node in &self.nodes {
            let out = self.edges.iter().filter(|e| e.source == node.name).count();
            let inc = self.edges.iter().filter(|e| e.target == node.name).count();
            if out == 0 && node.kind != NodeKind::End {
                report.push(
                    &node.name,
                    "dead-end",
                    "out-degree 0 at a node other than the end".into(),
                );
            }
            if inc == 0 && node.kind != NodeKind::Start {
                report.push(
                    &node.name,
                    "no-entry",
                    "in-degree 0 at a node other than the start".into(),
                );
            }
            match node.kind {
                NodeKind::Start => {
                    if inc > 0 {
                        report.push(
                            &node.name,
                            "start-incoming",
                            format!("start node has {inc} incoming transition(s)"),
                        );
                    }
                }
                NodeKind::End => {
                    if out > 0 {
                        report.push(
                            &node.name,
                            "end-outgoing",
                            format!("end node has {out} outgoing transition(s)"),
                        );
                    }
                }
                NodeKind::Conditional => {
                    if out != 2 {
                        report.push(
                            &node.name,
                            "conditional-arity",
                            format!("conditional needs exactly 2 outgoing transitions, has {out}"),
                        );
                    }
                }
                NodeKind::SplitFork => {
                    if out < 2 {
                        report.push(
                            &node.name,
                            "fork-arity",
                            format!("fork needs at least 2 outgoing transitions, has {out}"),
                        );
                    }
                    if inc != 1 {
                        report.push(
                            &node.name,
                            "fork-arity",
                            format!("fork needs exactly 1 incoming transition, has {inc}"),
                        );
                    }
                }
                NodeKind::SplitJoin => {
                    if inc < 2 {
                        report.push(
                            &node.name,
                            "join-arity",
                            format!("join needs at least 2 incoming transitions, has {inc}"),
                        );
                    }
                    if out != 1 {
                        report.push(
                            &node.name,
                            "join-arity",
                            format!("join needs exactly 1 outgoing transition, has {out}"),
                        );
                    }
                }
                NodeKind::Activity => {}
            }
        }

        for name in &self.accept {
            if self.node(name).is_none() {
                report.push(
                    name,
                    "unknown-accept",
                    "accepted activity is not a node of the graph".into(),
                );
            }
        }

        report
    }

    /// Renders the graph in the workflow file format: declarations in kind
    /// order (start, end, activity, cond, fork, join), names sorted within
    /// each kind, then transitions by label, then accepts by name.
    /// [`parse_workflow`] of the result reproduces the graph.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for kind in [
            NodeKind::Start,
            NodeKind::End,
            NodeKind::Activity,
            NodeKind::Conditional,
            NodeKind::SplitFork,
            NodeKind::SplitJoin,
        ] {
            for node in self.nodes.iter().filter(|n| n.kind == kind) {
                out.push_str(&format!("{} {};\n", kind.keyword(), node.name));
            }
        }
        for e in &self.edges {
            out.push_str(&format!("trans {}: {} -> {};\n", e.label, e.source, e.target));
        }
        for a in &self.accept {
            out.push_str(&format!("accept {a};\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_chain() -> WorkflowGraph {
        parse_workflow(
            "chain",
            "start S; activity A; end E; trans t0: S->A; trans t1: A->E;",
        )
        .unwrap()
    }

    #[test]
    fn minimal_chain_is_valid() {
        let g = minimal_chain();
        assert_eq!(g.nodes().len(), 3);
        assert_eq!(g.edges().len(), 2);
        assert!(g.validate().is_valid());
    }

    #[test]
    fn duplicate_definitions_are_rejected() {
        let n = |name: &str, kind| Node {
            name: Arc::from(name),
            kind,
        };
        let err = WorkflowGraph::new(
            "g",
            vec![n("A", NodeKind::Activity), n("A", NodeKind::Start)],
            vec![],
            BTreeSet::new(),
        )
        .unwrap_err();
        assert_eq!(err, GraphError::DuplicateNode("A".into()));
    }

    #[test]
    fn edges_must_reference_declared_nodes() {
        let err = parse_workflow("g", "start S; end E; trans t: S -> X;").unwrap_err();
        assert!(err.to_string().contains("unknown node `X`"), "{err}");
    }

    #[test]
    fn degree_violations_are_reported() {
        let g = parse_workflow(
            "g",
            "start S; end E; activity A; activity B; \
             trans t0: S->A; trans t1: A->E; trans t2: S->B;",
        )
        .unwrap();
        let report = g.validate();
        let rules: Vec<&str> = report.violations().iter().map(|v| v.rule).collect();
        // B has no way out; everything else is fine.
        assert_eq!(rules, vec!["dead-end"]);
        assert_eq!(&*report.violations()[0].subject, "B");
    }

    #[test]
    fn structural_arity_violations_are_reported() {
        let g = parse_workflow(
            "g",
            "start S; end E; cond C; \
             trans t0: S->C; trans ty: C->E; trans tn: C->E; trans tz: C->E;",
        )
        .unwrap();
        let rules: Vec<&str> = g.validate().violations().iter().map(|v| v.rule).collect();
        assert_eq!(rules, vec!["conditional-arity"]);

        let g = parse_workflow(
            "g",
            "start S; end E; fork F; activity A; \
             trans t0: S->F; trans t1: F->A; trans t2: A->E;",
        )
        .unwrap();
        let rules: Vec<&str> = g.validate().violations().iter().map(|v| v.rule).collect();
        assert_eq!(rules, vec!["fork-arity"]);
    }

    #[test]
    fn missing_or_duplicated_terminals_are_reported() {
        let g = parse_workflow("g", "activity A; end E; trans t0: A->E;").unwrap();
        let rules: Vec<&str> = g.validate().violations().iter().map(|v| v.rule).collect();
        assert!(rules.contains(&"missing-start"), "{rules:?}");

        let g = parse_workflow(
            "g",
            "start S; start S2; end E; trans a: S->E; trans b: S2->E;",
        )
        .unwrap();
        let rules: Vec<&str> = g.validate().violations().iter().map(|v| v.rule).collect();
        assert!(rules.contains(&"duplicate-start"), "{rules:?}");
    }

    #[test]
    fn unknown_accept_is_reported() {
        let g = parse_workflow("g", "start S; end E; trans t: S->E; accept Ghost;").unwrap();
        let rules: Vec<&str> = g.validate().violations().iter().map(|v| v.rule).collect();
        assert_eq!(rules, vec!["unknown-accept"]);
    }

    #[test]
    fn adjacency_is_label_sorted() {
        let g = parse_workflow(
            "g",
            "start S; end E; activity A; \
             trans tb: S->A; trans ta: S->A; trans tc: A->E; trans t0: A->E;",
        )
        .unwrap();
        let out: Vec<&str> = g.outgoing("S").unwrap().iter().map(|e| &*e.label).collect();
        assert_eq!(out, vec!["ta", "tb"]);
        let inc: Vec<&str> = g.incoming("E").unwrap().iter().map(|e| &*e.label).collect();
        assert_eq!(inc, vec!["t0", "tc"]);
        assert!(g.outgoing("nope").is_err());
    }

    #[test]
    fn serialization_round_trips() {
        let g = parse_workflow(
            "g",
            "# comment\n\
             trans t_yes: C -> A; trans t_no: C -> E;\n\
             accept A;\n\
             cond C; start S; end E; activity A;\n\
             trans t0: S -> C; trans t1: A -> E;",
        )
        .unwrap();
        let text = g.to_text();
        let back = parse_workflow("g", &text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_text(), text);
    }
}
