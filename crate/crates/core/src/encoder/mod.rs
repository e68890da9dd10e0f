//! Translates workflow graphs and reconfiguration scenarios into LTL with
//! past.
//!
//! Each workflow element becomes an atomic proposition per instance
//! (see [`PropId`]).  Per-node translation rules constrain how activities
//! and transitions may hold over time; scenario-level rules add the active
//! flags `W#j`, the configuration flags `C1#j`/`C2#j`, the reconfiguration
//! event `R`, and the start/reconfiguration schedule.  The result is a
//! list of annotated top-level conjuncts ([`ScenarioEncoding`]) whose
//! conjunction is handed to the bounded checker.

mod scenario;

pub use scenario::{ScenarioParseError, ScenarioSpec};

use crate::ltl::Formula;
use crate::workflow::{NodeKind, ValidationReport, WorkflowGraph};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Namespaced proposition identifier. Rendering is bijective — workflow
/// identifiers cannot contain `:` or `#`, so the rendered forms
/// `A:<name>#<j>`, `T:<label>#<j>`, `W#<j>`, `C<i>#<j>` and `R` are
/// unambiguous, and all of them lex as single atoms in the LTL syntax.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropId {
    Activity { name: Arc<str>, instance: u32 },
    Transition { label: Arc<str>, instance: u32 },
    ActiveFlag { instance: u32 },
    ConfigFlag { config: u8, instance: u32 },
    Reconfig,
}

impl PropId {
    pub fn activity(name: impl Into<Arc<str>>, instance: u32) -> Self {
        PropId::Activity {
            name: name.into(),
            instance,
        }
    }

    pub fn transition(label: impl Into<Arc<str>>, instance: u32) -> Self {
        PropId::Transition {
            label: label.into(),
            instance,
        }
    }

    pub fn active(instance: u32) -> Self {
        PropId::ActiveFlag { instance }
    }

    pub fn config(config: u8, instance: u32) -> Self {
        debug_assert!(config == 1 || config == 2);
        PropId::ConfigFlag { config, instance }
    }

    pub fn render(&self) -> Arc<str> {
        Arc::from(self.to_string().as_str())
    }

    /// Inverse of [`PropId::render`].
    pub fn parse(s: &str) -> Option<PropId> {
        fn ident_ok(s: &str) -> bool {
            let mut bytes = s.bytes();
            match bytes.next() {
                Some(b) if b.is_ascii_alphabetic() || b == b'_' => {}
                _ => return false,
            }
            bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'\'')
        }
        fn split_instance(s: &str) -> Option<(&str, u32)> {
            let (base, j) = s.split_once('#')?;
            if j.is_empty() || !j.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            Some((base, j.parse().ok()?))
        }
        if s == "R" {
            return Some(PropId::Reconfig);
        }
        if let Some(rest) = s.strip_prefix("A:") {
            let (name, instance) = split_instance(rest)?;
            return ident_ok(name).then(|| PropId::activity(name, instance));
        }
        if let Some(rest) = s.strip_prefix("T:") {
            let (label, instance) = split_instance(rest)?;
            return ident_ok(label).then(|| PropId::transition(label, instance));
        }
        if let Some(rest) = s.strip_prefix("W#") {
            if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            return Some(PropId::active(rest.parse().ok()?));
        }
        if let Some(rest) = s.strip_prefix('C') {
            let (cfg, instance) = rest.split_once('#')?;
            let config: u8 = match cfg {
                "1" => 1,
                "2" => 2,
                _ => return None,
            };
            if instance.is_empty() || !instance.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            return Some(PropId::config(config, instance.parse().ok()?));
        }
        None
    }

    pub fn formula(&self) -> Formula {
        Formula::atom(self.render())
    }
}

impl fmt::Display for PropId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropId::Activity { name, instance } => write!(f, "A:{name}#{instance}"),
            PropId::Transition { label, instance } => write!(f, "T:{label}#{instance}"),
            PropId::ActiveFlag { instance } => write!(f, "W#{instance}"),
            PropId::ConfigFlag { config, instance } => write!(f, "C{config}#{instance}"),
            PropId::Reconfig => write!(f, "R"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("unknown node `{0}`")]
    UnknownNode(Arc<str>),
    #[error("node `{0}` has no outgoing transition")]
    NoOutgoing(Arc<str>),
    #[error("node `{0}` has no incoming transition")]
    NoIncoming(Arc<str>),
    #[error("conditional `{node}` has {outgoing} outgoing transitions, needs exactly 2")]
    ConditionalArity { node: Arc<str>, outgoing: usize },
    #[error("split `{node}` has {count} {direction} transitions, needs at least 2")]
    SplitArity {
        node: Arc<str>,
        direction: &'static str,
        count: usize,
    },
    #[error("node `{node}` is not a {expected}")]
    WrongKind {
        node: Arc<str>,
        expected: &'static str,
    },
}

/// One translated rule: the formula plus a stable comment naming what the
/// rule enforces and for which propositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigRule {
    pub comment: String,
    pub formula: Formula,
}

fn rule(comment: String, formula: Formula) -> ConfigRule {
    ConfigRule { comment, formula }
}

fn act(name: &Arc<str>, j: u32) -> Formula {
    PropId::activity(name.clone(), j).formula()
}

fn tr(label: &Arc<str>, j: u32) -> Formula {
    PropId::transition(label.clone(), j).formula()
}

/// Exit rules for a node with outgoing transitions: the node lasts until
/// exactly one outgoing transition fires, and a transition fires only
/// right after its source held.
pub fn encode_out_block(
    g: &WorkflowGraph,
    node: &str,
    j: u32,
) -> Result<Vec<ConfigRule>, EncodeError> {
    let out = g
        .outgoing(node)
        .map_err(|_| EncodeError::UnknownNode(node.into()))?;
    if out.is_empty() {
        return Err(EncodeError::NoOutgoing(node.into()));
    }
    let name = &g.node(node).expect("checked above").name;
    let a = act(name, j);
    let t_out = Formula::disj(out.iter().map(|e| tr(&e.label, j)));
    let mut rules = vec![rule(
        format!("activity-lasts-until-exit: {}", PropId::activity(name.clone(), j)),
        Formula::implies(
            a.clone(),
            Formula::until(Formula::and(a.clone(), Formula::not(t_out.clone())), t_out),
        ),
    )];
    for e in &out {
        rules.push(rule(
            format!(
                "transition-ends-source: {} of {}",
                PropId::transition(e.label.clone(), j),
                PropId::activity(name.clone(), j)
            ),
            Formula::implies(
                tr(&e.label, j),
                Formula::and(Formula::yesterday(a.clone()), Formula::not(a.clone())),
            ),
        ));
    }
    Ok(rules)
}

/// Entry rules for a node with incoming transitions: the node has held
/// since exactly one incoming transition fired, and a transition firing
/// puts its target in the next position.
pub fn encode_in_block(
    g: &WorkflowGraph,
    node: &str,
    j: u32,
) -> Result<Vec<ConfigRule>, EncodeError> {
    let inc = g
        .incoming(node)
        .map_err(|_| EncodeError::UnknownNode(node.into()))?;
    if inc.is_empty() {
        return Err(EncodeError::NoIncoming(node.into()));
    }
    let name = &g.node(node).expect("checked above").name;
    let a = act(name, j);
    let t_in = Formula::disj(inc.iter().map(|e| tr(&e.label, j)));
    let mut rules = vec![rule(
        format!("activity-since-entry: {}", PropId::activity(name.clone(), j)),
        Formula::implies(
            a.clone(),
            Formula::since(Formula::and(a.clone(), Formula::not(t_in.clone())), t_in),
        ),
    )];
    for e in &inc {
        rules.push(rule(
            format!(
                "transition-starts-target: {} of {}",
                PropId::transition(e.label.clone(), j),
                PropId::activity(name.clone(), j)
            ),
            Formula::implies(
                tr(&e.label, j),
                Formula::and(Formula::next(a.clone()), Formula::not(a.clone())),
            ),
        ));
    }
    Ok(rules)
}

fn punctuality(name: &Arc<str>, j: u32, comment: &str) -> ConfigRule {
    let a = act(name, j);
    rule(
        format!("{comment}: {}", PropId::activity(name.clone(), j)),
        Formula::implies(
            a.clone(),
            Formula::and(
                Formula::not(Formula::yesterday(a.clone())),
                Formula::not(Formula::next(a)),
            ),
        ),
    )
}

/// Entry/exit rules plus branch exclusivity and punctuality for a
/// two-way conditional.
pub fn encode_conditional(
    g: &WorkflowGraph,
    node: &str,
    j: u32,
) -> Result<Vec<ConfigRule>, EncodeError> {
    let n = g
        .node(node)
        .ok_or_else(|| EncodeError::UnknownNode(node.into()))?;
    if n.kind != NodeKind::Conditional {
        return Err(EncodeError::WrongKind {
            node: node.into(),
            expected: "conditional",
        });
    }
    let out = g.outgoing(node).expect("node exists");
    if out.len() != 2 {
        return Err(EncodeError::ConditionalArity {
            node: node.into(),
            outgoing: out.len(),
        });
    }
    let mut rules = encode_in_block(g, node, j)?;
    rules.extend(encode_out_block(g, node, j)?);
    rules.push(rule(
        format!(
            "conditional-branches-exclusive: {}",
            PropId::activity(n.name.clone(), j)
        ),
        Formula::implies(tr(&out[0].label, j), Formula::not(tr(&out[1].label, j))),
    ));
    rules.push(punctuality(&n.name, j, "conditional-punctual"));
    Ok(rules)
}

/// Entry/exit rules plus sibling-transition synchrony and punctuality for
/// a fork or join; forks synchronize their outgoing transitions, joins
/// their incoming ones.
pub fn encode_split(
    g: &WorkflowGraph,
    node: &str,
    j: u32,
) -> Result<Vec<ConfigRule>, EncodeError> {
    let n = g
        .node(node)
        .ok_or_else(|| EncodeError::UnknownNode(node.into()))?;
    let (siblings, direction) = match n.kind {
        NodeKind::SplitFork => (g.outgoing(node).expect("node exists"), "outgoing"),
        NodeKind::SplitJoin => (g.incoming(node).expect("node exists"), "incoming"),
        _ => {
            return Err(EncodeError::WrongKind {
                node: node.into(),
                expected: "split",
            })
        }
    };
    if siblings.len() < 2 {
        return Err(EncodeError::SplitArity {
            node: node.into(),
            direction,
            count: siblings.len(),
        });
    }
    let mut rules = encode_in_block(g, node, j)?;
    rules.extend(encode_out_block(g, node, j)?);
    for a in 0..siblings.len() {
        for b in a + 1..siblings.len() {
            rules.push(rule(
                format!(
                    "split-transitions-synchronous: {} and {} at {}",
                    PropId::transition(siblings[a].label.clone(), j),
                    PropId::transition(siblings[b].label.clone(), j),
                    PropId::activity(n.name.clone(), j)
                ),
                Formula::iff(tr(&siblings[a].label, j), tr(&siblings[b].label, j)),
            ));
        }
    }
    rules.push(punctuality(&n.name, j, "split-punctual"));
    Ok(rules)
}

/// All per-node rules of one configuration for instance `j` — the
/// behavioral rule set guarded by that instance's configuration flag.
/// Nodes are handled in name order; within a node, entry rules precede
/// exit rules, then exclusivity/synchrony, then punctuality.
pub fn encode_config(g: &WorkflowGraph, j: u32) -> Result<Vec<ConfigRule>, EncodeError> {
    let mut rules = Vec::new();
    for node in g.nodes() {
        match node.kind {
            NodeKind::Start => rules.extend(encode_out_block(g, &node.name, j)?),
            NodeKind::End => rules.extend(encode_in_block(g, &node.name, j)?),
            NodeKind::Activity => {
                rules.extend(encode_in_block(g, &node.name, j)?);
                rules.extend(encode_out_block(g, &node.name, j)?);
            }
            NodeKind::Conditional => rules.extend(encode_conditional(g, &node.name, j)?),
            NodeKind::SplitFork | NodeKind::SplitJoin => {
                rules.extend(encode_split(g, &node.name, j)?)
            }
        }
    }
    Ok(rules)
}

/// Scenario construction errors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("a scenario needs at least one instance")]
    NoInstances,
    #[error("configuration {index} is structurally invalid:\n{report}")]
    InvalidConfig { index: u8, report: ValidationReport },
    #[error("node `{name}` is a {kind1} in configuration 1 but a {kind2} in configuration 2")]
    SharedNodeKindMismatch {
        name: Arc<str>,
        kind1: &'static str,
        kind2: &'static str,
    },
    #[error(
        "transition `{label}` connects {src1} -> {dst1} in configuration 1 \
         but {src2} -> {dst2} in configuration 2; shared labels must denote the same edge"
    )]
    SharedLabelMismatch {
        label: Arc<str>,
        src1: Arc<str>,
        dst1: Arc<str>,
        src2: Arc<str>,
        dst2: Arc<str>,
    },
    #[error("accepted activity `{0}` exists in neither configuration")]
    UnknownAccept(Arc<str>),
}

/// A reconfiguration scenario: two workflow configurations, `n` instances
/// with optional scheduled start positions, and an optional scheduled
/// reconfiguration position (`None` = unconstrained).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    name: String,
    config1: WorkflowGraph,
    config2: WorkflowGraph,
    starts: Vec<Option<usize>>,
    reconfig_at: Option<usize>,
    accept: BTreeSet<Arc<str>>,
}

impl Scenario {
    /// Builds and cross-validates a scenario.  Both configurations must be
    /// structurally valid; nodes shared by name must agree on kind; labels
    /// shared by name must denote the same edge.  `accept_overrides`, when
    /// non-empty, replaces the union of the configurations' accept sets.
    pub fn new(
        name: impl Into<String>,
        config1: WorkflowGraph,
        config2: WorkflowGraph,
        starts: Vec<Option<usize>>,
        reconfig_at: Option<usize>,
        accept_overrides: BTreeSet<Arc<str>>,
    ) -> Result<Self, ScenarioError> {
        if starts.is_empty() {
            return Err(ScenarioError::NoInstances);
        }
        for (index, g) in [(1u8, &config1), (2u8, &config2)] {
            let report = g.validate();
            if !report.is_valid() {
                return Err(ScenarioError::InvalidConfig { index, report });
            }
        }
        for n1 in config1.nodes() {
            if let Some(n2) = config2.node(&n1.name) {
                if n1.kind != n2.kind {
                    return Err(ScenarioError::SharedNodeKindMismatch {
                        name: n1.name.clone(),
                        kind1: n1.kind.keyword(),
                        kind2: n2.kind.keyword(),
                    });
                }
            }
        }
        for e1 in config1.edges() {
            if let Some(e2) = config2.edges().iter().find(|e2| e2.label == e1.label) {
                if e1.source != e2.source || e1.target != e2.target {
                    return Err(ScenarioError::SharedLabelMismatch {
                        label: e1.label.clone(),
                        src1: e1.source.clone(),
                        dst1: e1.target.clone(),
                        src2: e2.source.clone(),
                        dst2: e2.target.clone(),
                    });
                }
            }
        }
        let accept = if accept_overrides.is_empty() {
            config1.accept().union(config2.accept()).cloned().collect()
        } else {
            accept_overrides
        };
        for a in &accept {
            if config1.node(a).is_none() && config2.node(a).is_none() {
                return Err(ScenarioError::UnknownAccept(a.clone()));
            }
        }
        Ok(Scenario {
            name: name.into(),
            config1,
            config2,
            starts,
            reconfig_at,
            accept,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn config1(&self) -> &WorkflowGraph {
        &self.config1
    }

    pub fn config2(&self) -> &WorkflowGraph {
        &self.config2
    }

    pub fn instances(&self) -> u32 {
        self.starts.len() as u32
    }

    /// Scheduled start position of instance `j` (1-based), if constrained.
    pub fn start(&self, j: u32) -> Option<usize> {
        self.starts[(j - 1) as usize]
    }

    pub fn reconfig_at(&self) -> Option<usize> {
        self.reconfig_at
    }

    /// Reachability targets: the accept-activity override, or the union of
    /// the configurations' accept sets.
    pub fn accept(&self) -> &BTreeSet<Arc<str>> {
        &self.accept
    }

    fn config(&self, i: u8) -> &WorkflowGraph {
        match i {
            1 => &self.config1,
            2 => &self.config2,
            _ => unreachable!("config index is 1 or 2"),
        }
    }

    /// Rendered element propositions (activities + transitions) of
    /// configuration `i` for instance `j`, sorted by rendered name.
    pub fn element_props(&self, j: u32, i: u8) -> BTreeSet<Arc<str>> {
        let g = self.config(i);
        g.nodes()
            .iter()
            .map(|n| PropId::activity(n.name.clone(), j).render())
            .chain(
                g.edges()
                    .iter()
                    .map(|e| PropId::transition(e.label.clone(), j).render()),
            )
            .collect()
    }

    /// Every proposition the scenario encoding can mention.
    pub fn props(&self) -> BTreeSet<Arc<str>> {
        let mut all = BTreeSet::new();
        for j in 1..=self.instances() {
            all.extend(self.element_props(j, 1));
            all.extend(self.element_props(j, 2));
            all.insert(PropId::active(j).render());
            all.insert(PropId::config(1, j).render());
            all.insert(PropId::config(2, j).render());
        }
        all.insert(PropId::Reconfig.render());
        all
    }

    /// Scheduled positions with human-readable subjects, for bound
    /// warnings.
    pub fn scheduled_positions(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        for j in 1..=self.instances() {
            if let Some(p) = self.start(j) {
                out.push((format!("start of instance {j}"), p));
            }
        }
        if let Some(r) = self.reconfig_at {
            out.push(("reconfiguration".into(), r));
        }
        out
    }
}

/// Encoding options; `literal_exclusivity` switches the exclusion part of
/// the configuration-exclusivity rule to the weaker ¬(⋀ e) form.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EncodeOptions {
    pub literal_exclusivity: bool,
}

/// One annotated top-level conjunct of the scenario formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioLine {
    pub comment: String,
    pub formula: Formula,
}

/// The full scenario translation: an ordered list of annotated top-level
/// conjuncts.  Behavioral rules are individually G-wrapped; schedule
/// anchors are origin-anchored and not wrapped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioEncoding {
    lines: Vec<ScenarioLine>,
}

impl ScenarioEncoding {
    pub fn lines(&self) -> &[ScenarioLine] {
        &self.lines
    }

    /// The single closed formula: the conjunction of all lines in order.
    pub fn formula(&self) -> Formula {
        Formula::conj(self.lines.iter().map(|l| l.formula.clone()))
    }
}

fn wflag(j: u32) -> Formula {
    PropId::active(j).formula()
}

fn cflag(i: u8, j: u32) -> Formula {
    PropId::config(i, j).formula()
}

fn rflag() -> Formula {
    PropId::Reconfig.formula()
}

/// Termination rules for instance `j`: one per distinct end-node name
/// across the two configurations — once the end activity holds, it never
/// holds again.
pub fn encode_termination(scn: &Scenario, j: u32) -> Vec<ConfigRule> {
    let mut ends: BTreeSet<Arc<str>> = BTreeSet::new();
    for g in [scn.config1(), scn.config2()] {
        ends.extend(
            g.nodes()
                .iter()
                .filter(|n| n.kind == NodeKind::End)
                .map(|n| n.name.clone()),
        );
    }
    ends.iter()
        .map(|name| {
            let e = act(name, j);
            rule(
                format!("end-never-resumes: {}", PropId::activity(name.clone(), j)),
                Formula::implies(
                    e.clone(),
                    Formula::next(Formula::globally(Formula::not(e))),
                ),
            )
        })
        .collect()
}

/// Active-flag definition: `W#j` holds exactly when some element of
/// either configuration's instance-`j` copy holds.
pub fn encode_active(scn: &Scenario, j: u32) -> ConfigRule {
    let mut elems = scn.element_props(j, 1);
    elems.extend(scn.element_props(j, 2));
    rule(
        format!("active-flag: {}", PropId::active(j)),
        Formula::iff(
            wflag(j),
            Formula::disj(elems.into_iter().map(Formula::atom)),
        ),
    )
}

/// Configuration guard: each behavioral rule of configuration `i` applies
/// wherever `C<i>#j` holds.
pub fn encode_config_guard(scn: &Scenario, j: u32, i: u8) -> Result<Vec<ConfigRule>, EncodeError> {
    Ok(encode_config(scn.config(i), j)?
        .into_iter()
        .map(|r| {
            rule(
                format!("{} (config {i})", r.comment),
                Formula::implies(cflag(i, j), r.formula),
            )
        })
        .collect())
}

/// Configuration exclusivity: under `C<i>#j`, an active instance runs on
/// configuration-`i` elements, and elements exclusive to the other
/// configuration never hold.
pub fn encode_exclusive(scn: &Scenario, j: u32, opts: EncodeOptions) -> Vec<ConfigRule> {
    let e1 = scn.element_props(j, 1);
    let e2 = scn.element_props(j, 2);
    [(1u8, &e1, &e2), (2u8, &e2, &e1)]
        .into_iter()
        .map(|(i, own, other)| {
            let exclusive: Vec<&Arc<str>> = other.difference(own).collect();
            let mut parts = vec![Formula::implies(
                wflag(j),
                Formula::disj(own.iter().cloned().map(Formula::atom)),
            )];
            if opts.literal_exclusivity {
                if !exclusive.is_empty() {
                    parts.push(Formula::not(Formula::conj(
                        exclusive.iter().map(|p| Formula::atom((*p).clone())),
                    )));
                }
            } else {
                parts.extend(
                    exclusive
                        .iter()
                        .map(|p| Formula::not(Formula::atom((*p).clone()))),
                );
            }
            rule(
                format!("config-exclusivity: {}", PropId::config(i, j)),
                Formula::implies(cflag(i, j), Formula::conj(parts)),
            )
        })
        .collect()
}

/// Configuration selection for instance `j`: a run that has been active
/// since a pre-reconfiguration position follows configuration 1, a run
/// contained in the reconfigured suffix follows configuration 2, and an
/// instance never active before the reconfiguration follows
/// configuration 2 at every position.
pub fn encode_reconfiguration(scn: &Scenario, j: u32) -> Vec<ConfigRule> {
    let _ = scn;
    let w = wflag(j);
    let pre = Formula::and(w.clone(), Formula::not(rflag()));
    let started_pre = Formula::since(w.clone(), pre.clone());
    vec![
        rule(
            format!("run-started-before-reconfig-uses-config-1: {}", PropId::active(j)),
            Formula::implies(
                Formula::and(w.clone(), started_pre.clone()),
                cflag(1, j),
            ),
        ),
        rule(
            format!("run-started-after-reconfig-uses-config-2: {}", PropId::active(j)),
            Formula::implies(
                Formula::and(w.clone(), Formula::not(started_pre)),
                cflag(2, j),
            ),
        ),
        rule(
            format!("never-active-before-reconfig: {}", PropId::active(j)),
            Formula::implies(
                Formula::and(
                    Formula::not(Formula::eventually(pre.clone())),
                    Formula::not(Formula::since(Formula::True, pre)),
                ),
                Formula::globally(cflag(2, j)),
            ),
        ),
    ]
}

/// Origin-anchored schedule for instance `j`: the start anchor (when the
/// start position is constrained) and the single-run rule — once the
/// active flag falls, it never rises again.
pub fn encode_schedule(scn: &Scenario, j: u32) -> Vec<ConfigRule> {
    let w = wflag(j);
    let mut rules = Vec::new();
    if let Some(p) = scn.start(j) {
        let mut parts: Vec<Formula> = (0..p)
            .map(|m| Formula::next_n(m, Formula::not(w.clone())))
            .collect();
        parts.push(Formula::next_n(p, w.clone()));
        rules.push(rule(
            format!("start-anchor: {} at {p}", PropId::active(j)),
            Formula::conj(parts),
        ));
    }
    rules.push(rule(
        format!("single-run: {}", PropId::active(j)),
        Formula::globally(Formula::implies(
            Formula::and(w.clone(), Formula::not(Formula::next(w.clone()))),
            Formula::next(Formula::globally(Formula::not(w))),
        )),
    ));
    rules
}

fn reconfig_anchor(r: usize) -> ConfigRule {
    let mut parts: Vec<Formula> = (0..r)
        .map(|m| Formula::next_n(m, Formula::not(rflag())))
        .collect();
    parts.push(Formula::next_n(r, rflag()));
    rule(format!("reconfig-anchor: R at {r}"), Formula::conj(parts))
}

/// Full scenario translation. Behavioral rules (per instance: termination,
/// active flag, both configuration guards, exclusivity, configuration
/// selection; then reconfiguration irreversibility) are G-wrapped one per
/// line; the schedule (start anchors, single-run rules, reconfiguration
/// anchor) follows origin-anchored.
pub fn encode_scenario(
    scn: &Scenario,
    opts: EncodeOptions,
) -> Result<ScenarioEncoding, EncodeError> {
    let mut lines = Vec::new();
    let glob = |r: ConfigRule| ScenarioLine {
        comment: r.comment,
        formula: Formula::globally(r.formula),
    };
    for j in 1..=scn.instances() {
        for r in encode_termination(scn, j) {
            lines.push(glob(r));
        }
        lines.push(glob(encode_active(scn, j)));
        for i in [1, 2] {
            for r in encode_config_guard(scn, j, i)? {
                lines.push(glob(r));
            }
        }
        for r in encode_exclusive(scn, j, opts) {
            lines.push(glob(r));
        }
        for r in encode_reconfiguration(scn, j) {
            lines.push(glob(r));
        }
    }
    lines.push(glob(rule(
        "reconfig-irreversible: R".into(),
        Formula::implies(rflag(), Formula::globally(rflag())),
    )));
    for j in 1..=scn.instances() {
        for r in encode_schedule(scn, j) {
            lines.push(ScenarioLine {
                comment: r.comment,
                formula: r.formula,
            });
        }
    }
    if let Some(r) = scn.reconfig_at() {
        let a = reconfig_anchor(r);
        lines.push(ScenarioLine {
            comment: a.comment,
            formula: a.formula,
        });
    }
    Ok(ScenarioEncoding { lines })
}
