//! Shared test infrastructure: an independent reference evaluator built on
//! literal quantifier scans, seeded random generators for formulas, words,
//! workflows, and scenarios, and the structural witness checker.

#![allow(dead_code)] // each test target uses its own subset

use rand::Rng;
use reflow::encoder::{encode_config, encode_scenario, EncodeOptions, Scenario, ScenarioSpec};
use reflow::ltl::{parse_formula, Formula, LassoWord};
use reflow::workflow::{parse_workflow, NodeKind, WorkflowGraph};
use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

// ---------------------------------------------------------------------
// Reference evaluator.
//
// Evaluates by the textbook definitions: `U`, `R`, and `S` as literal
// exists/forall scans over positions, with future scans cut off once the
// word's suffix has provably become periodic for every subformula (from
// position loop + (past_height + 1) * period on, all subformula values
// repeat with the word's period, so one further period decides any
// remaining quantifier).  Positions beyond that extra period fold back by
// whole periods before evaluation, so nested scans stay exact no matter
// how deep an outer quantifier pushes them.

pub struct NaiveEval<'w> {
    word: &'w LassoWord,
    /// First position from which every subformula value is periodic.
    stable: usize,
    memo: HashMap<(usize, usize), bool>,
    ids: HashMap<*const Formula, usize>,
}

impl<'w> NaiveEval<'w> {
    pub fn new(word: &'w LassoWord, root: &Formula) -> Self {
        let stable =
            word.loop_start() + (root.past_height() as usize + 1) * word.period();
        NaiveEval {
            word,
            stable,
            memo: HashMap::new(),
            ids: HashMap::new(),
        }
    }

    fn id(&mut self, f: &Formula) -> usize {
        let ptr = f as *const Formula;
        let next = self.ids.len();
        *self.ids.entry(ptr).or_insert(next)
    }

    pub fn eval(&mut self, i: usize, f: &Formula) -> bool {
        let period = self.word.period();
        let mut i = i;
        while i >= self.stable + period {
            i -= period;
        }
        let key = (self.id(f), i);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        // A scan starting at i must cover one full period of the region
        // where every subformula value has become periodic; any witness
        // further out reflects back by whole periods.
        let end = self.stable.max(i) + period;
        let value = match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(p) => self.word.state_at(i).contains(p.as_ref()),
            Formula::Not(a) => !self.eval(i, a),
            Formula::And(a, b) => self.eval(i, a) && self.eval(i, b),
            Formula::Or(a, b) => self.eval(i, a) || self.eval(i, b),
            Formula::Implies(a, b) => !self.eval(i, a) || self.eval(i, b),
            Formula::Iff(a, b) => self.eval(i, a) == self.eval(i, b),
            Formula::Next(a) => self.eval(i + 1, a),
            Formula::Yesterday(a) => i > 0 && self.eval(i - 1, a),
            Formula::Until(a, b) => {
                (i..=end).any(|j| {
                    self.eval(j, b) && (i..j).all(|m| self.eval(m, a))
                })
            }
            Formula::Release(a, b) => {
                (i..=end).all(|j| {
                    self.eval(j, b) || (i..j).any(|m| self.eval(m, a))
                })
            }
            Formula::Since(a, b) => (0..=i).rev().any(|j| {
                self.eval(j, b) && (j + 1..=i).all(|m| self.eval(m, a))
            }),
            Formula::Globally(a) => (i..=end).all(|j| self.eval(j, a)),
            Formula::Eventually(a) => (i..=end).any(|j| self.eval(j, a)),
        };
        self.memo.insert(key, value);
        value
    }
}

/// Evaluates `f` at position `i` of `word` by literal unrolling.
pub fn naive_eval(word: &LassoWord, i: usize, f: &Formula) -> bool {
    NaiveEval::new(word, f).eval(i, f)
}

// ---------------------------------------------------------------------
// Random formulas and words.

/// A random formula over `atoms` with the given maximum operator depth.
pub fn random_formula(rng: &mut impl Rng, atoms: &[&str], depth: u32) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 6) {
        return match rng.gen_range(0..8) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(atoms[rng.gen_range(0..atoms.len())]),
        };
    }
    let sub = |rng: &mut _| random_formula(rng, atoms, depth - 1);
    match rng.gen_range(0..12) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        4 => Formula::iff(sub(rng), sub(rng)),
        5 => Formula::next(sub(rng)),
        6 => Formula::yesterday(sub(rng)),
        7 => Formula::until(sub(rng), sub(rng)),
        8 => Formula::since(sub(rng), sub(rng)),
        9 => Formula::release(sub(rng), sub(rng)),
        10 => Formula::globally(sub(rng)),
        _ => Formula::eventually(sub(rng)),
    }
}

/// A random lasso word over `atoms` with bound exactly `k`.
pub fn random_word(rng: &mut impl Rng, atoms: &[&str], k: usize) -> LassoWord {
    let universe: BTreeSet<Arc<str>> = atoms.iter().map(|a| Arc::from(*a)).collect();
    let states = (0..=k)
        .map(|_| {
            universe
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect()
        })
        .collect();
    let loop_start = rng.gen_range(1..=k);
    LassoWord::new(universe, states, loop_start).unwrap()
}

/// All lasso words of bound exactly `k` over `atoms` (4^(k+1) * k words
/// for two atoms), for exhaustive equivalence runs at tiny bounds.
pub fn enumerate_words(atoms: &[&str], k: usize) -> Vec<LassoWord> {
    let universe: BTreeSet<Arc<str>> = atoms.iter().map(|a| Arc::from(*a)).collect();
    let alphabet: Vec<BTreeSet<Arc<str>>> = (0..1usize << atoms.len())
        .map(|mask| {
            universe
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, a)| a.clone())
                .collect()
        })
        .collect();
    let mut words = Vec::new();
    let mut indices = vec![0usize; k + 1];
    loop {
        let states: Vec<_> = indices.iter().map(|&s| alphabet[s].clone()).collect();
        for l in 1..=k {
            words.push(LassoWord::new(universe.clone(), states.clone(), l).unwrap());
        }
        let mut carry = 0;
        loop {
            indices[carry] += 1;
            if indices[carry] < alphabet.len() {
                break;
            }
            indices[carry] = 0;
            carry += 1;
            if carry > k {
                return words;
            }
        }
    }
}

// ---------------------------------------------------------------------
// Random workflows and scenarios.

/// Block-structured process tree: compiles to an acyclic workflow in which
/// every path from Start reaches End.
enum Block {
    Act,
    Seq(Box<Block>, Box<Block>),
    Cond(Box<Block>, Box<Block>),
    Par(Box<Block>, Box<Block>),
}

fn random_block(rng: &mut impl Rng, budget: &mut u32) -> Block {
    // Leaves cost one activity; Cond costs one extra (the merge node).
    if *budget <= 1 || rng.gen_ratio(1, 3) {
        *budget = budget.saturating_sub(1);
        return Block::Act;
    }
    match rng.gen_range(0..3) {
        0 => {
            let a = random_block(rng, budget);
            let b = random_block(rng, budget);
            Block::Seq(Box::new(a), Box::new(b))
        }
        1 => {
            *budget = budget.saturating_sub(1);
            let a = random_block(rng, budget);
            let b = random_block(rng, budget);
            Block::Cond(Box::new(a), Box::new(b))
        }
        _ => {
            let a = random_block(rng, budget);
            let b = random_block(rng, budget);
            Block::Par(Box::new(a), Box::new(b))
        }
    }
}

struct WfBuilder {
    text: String,
    activities: Vec<String>,
    conds: u32,
    forks: u32,
    labels: u32,
}

impl WfBuilder {
    fn activity(&mut self) -> String {
        let name = format!("a{}", self.activities.len());
        self.text.push_str(&format!("activity {name};\n"));
        self.activities.push(name.clone());
        name
    }

    fn label(&mut self) -> String {
        let l = format!("t{}", self.labels);
        self.labels += 1;
        l
    }

    fn edge(&mut self, src: &str, dst: &str) {
        let l = self.label();
        self.text.push_str(&format!("trans {l}: {src} -> {dst};\n"));
    }

    /// Emits a block's nodes and inner edges; returns (entry, exit).
    fn compile(&mut self, b: &Block) -> (String, String) {
        match b {
            Block::Act => {
                let a = self.activity();
                (a.clone(), a)
            }
            Block::Seq(x, y) => {
                let (ex, xx) = self.compile(x);
                let (ey, xy) = self.compile(y);
                self.edge(&xx, &ey);
                (ex, xy)
            }
            Block::Cond(x, y) => {
                let c = format!("c{}", self.conds);
                self.conds += 1;
                self.text.push_str(&format!("cond {c};\n"));
                let (ex, xx) = self.compile(x);
                let (ey, xy) = self.compile(y);
                let merge = self.activity();
                self.edge(&c, &ex);
                self.edge(&c, &ey);
                self.edge(&xx, &merge);
                self.edge(&xy, &merge);
                (c, merge)
            }
            Block::Par(x, y) => {
                let f = format!("f{}", self.forks);
                let g = format!("g{}", self.forks);
                self.forks += 1;
                self.text.push_str(&format!("fork {f};\njoin {g};\n"));
                let (ex, xx) = self.compile(x);
                let (ey, xy) = self.compile(y);
                self.edge(&f, &ex);
                self.edge(&f, &ey);
                self.edge(&xx, &g);
                self.edge(&xy, &g);
                (f, g)
            }
        }
    }
}

/// A random structurally valid workflow with at most `max_activities`
/// activities (including conditional-merge activities).
pub fn random_workflow(rng: &mut impl Rng, name: &str, max_activities: u32) -> WorkflowGraph {
    let mut budget = rng.gen_range(1..=max_activities);
    let block = random_block(rng, &mut budget);
    let mut b = WfBuilder {
        text: String::from("start start;\nend end;\n"),
        activities: Vec::new(),
        conds: 0,
        forks: 0,
        labels: 0,
    };
    let (entry, exit) = b.compile(&block);
    b.edge("start", &entry);
    b.edge(&exit, "end");
    let accept = b.activities[rng.gen_range(0..b.activities.len())].clone();
    b.text.push_str(&format!("accept {accept};\n"));
    let graph = reflow::workflow::parse_workflow(name, &b.text).expect("generated text parses");
    let report = graph.validate();
    assert!(report.is_valid(), "generator must emit valid graphs:\n{report}");
    graph
}

/// A single-workflow scenario: the same random graph serves as both
/// configurations, instance 1 scheduled, reconfiguration position random.
pub fn random_scenario(rng: &mut impl Rng) -> Scenario {
    let graph = random_workflow(rng, "generated", 6);
    let instances = rng.gen_range(1..=2);
    let mut starts = vec![Some(rng.gen_range(0..4))];
    for _ in 1..instances {
        starts.push(rng.gen_bool(0.7).then(|| rng.gen_range(0..6)));
    }
    let reconfig_at = rng.gen_bool(0.5).then(|| rng.gen_range(0..5));
    Scenario::new(
        "generated",
        graph.clone(),
        graph,
        starts,
        reconfig_at,
        BTreeSet::new(),
    )
    .expect("identical configurations always cross-validate")
}

/// Generous bound: every scheduled run fits, plus slack for the loop.
pub fn bound_for(scn: &Scenario) -> usize {
    let nodes = scn.config1().nodes().len();
    let latest_start = scn
        .scheduled_positions()
        .iter()
        .map(|&(_, p)| p)
        .max()
        .unwrap_or(0);
    latest_start + 2 * nodes + 6
}

// ---------------------------------------------------------------------
// Structural witness checks.

/// Asserts the execution-shape properties of a scenario witness for
/// instance `j` of `graph`: transitions sit between their endpoints,
/// conditional branches are mutually exclusive per position, split
/// siblings fire together, and `end` holds at most once and never in the
/// loop.
pub fn check_witness_structure(graph: &WorkflowGraph, j: u32, w: &LassoWord) -> Result<(), String> {
    use reflow::encoder::PropId;
    let holds = |name: &Arc<str>, i: usize| w.state_at(i).contains(name.as_ref());
    let k = w.bound();

    for edge in graph.edges() {
        let t = PropId::transition(edge.label.clone(), j).render();
        let src = PropId::activity(edge.source.clone(), j).render();
        let dst = PropId::activity(edge.target.clone(), j).render();
        for i in 0..=k {
            if holds(&t, i) {
                if i == 0 {
                    return Err(format!("{t} fires at the origin"));
                }
                if !holds(&src, i - 1) {
                    return Err(format!("{t} at {i} without source {src} at {}", i - 1));
                }
                if !holds(&dst, i + 1) {
                    return Err(format!("{t} at {i} without target {dst} at {}", i + 1));
                }
            }
        }
    }

    for node in graph.nodes() {
        match node.kind {
            NodeKind::Conditional => {
                let out = graph.outgoing(&node.name).unwrap();
                let (a, b) = (
                    PropId::transition(out[0].label.clone(), j).render(),
                    PropId::transition(out[1].label.clone(), j).render(),
                );
                for i in 0..=k {
                    if holds(&a, i) && holds(&b, i) {
                        return Err(format!("branches {a} and {b} co-occur at {i}"));
                    }
                }
            }
            NodeKind::SplitFork | NodeKind::SplitJoin => {
                let siblings = if node.kind == NodeKind::SplitFork {
                    graph.outgoing(&node.name).unwrap()
                } else {
                    graph.incoming(&node.name).unwrap()
                };
                let props: Vec<_> = siblings
                    .iter()
                    .map(|e| PropId::transition(e.label.clone(), j).render())
                    .collect();
                for i in 0..=k {
                    let values: Vec<bool> = props.iter().map(|p| holds(p, i)).collect();
                    if values.iter().any(|&v| v) && !values.iter().all(|&v| v) {
                        return Err(format!(
                            "split {} siblings disagree at {i}",
                            node.name
                        ));
                    }
                }
            }
            _ => {}
        }
    }

    let end_prop = PropId::activity("end", j).render();
    let occurrences: Vec<usize> = (0..=k).filter(|&i| holds(&end_prop, i)).collect();
    if occurrences.len() > 1 {
        return Err(format!("{end_prop} recurs at {occurrences:?}"));
    }
    if let Some(&i) = occurrences.first() {
        if i >= w.loop_start() {
            return Err(format!("{end_prop} sits in the loop at {i} and so recurs"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Bundled fixtures.

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn load_fixture_workflow(file: &str) -> WorkflowGraph {
    let path = fixture_dir().join(file);
    let name = path.file_stem().unwrap().to_str().unwrap().to_string();
    parse_workflow(&name, &std::fs::read_to_string(&path).unwrap()).unwrap()
}

/// The bundled two-instance order-processing scenario.
pub fn load_case_study() -> Scenario {
    let text = std::fs::read_to_string(fixture_dir().join("case_study.scn")).unwrap();
    let spec = ScenarioSpec::parse(&text).unwrap();
    Scenario::new(
        "case_study",
        load_fixture_workflow(&spec.config1_path),
        load_fixture_workflow(&spec.config2_path),
        spec.starts,
        spec.reconfig_at,
        spec.accept,
    )
    .unwrap()
}

/// The case study compiled down to one temporal formula.
pub fn case_study_system() -> Formula {
    encode_scenario(&load_case_study(), EncodeOptions::default())
        .unwrap()
        .formula()
}

// ---------------------------------------------------------------------
// Frozen compiler output for the second bundled configuration.  The
// expectations are exact formula texts, so any drift in rule shape,
// operand order, or label sorting shows up as a violation.

pub fn config2_golden_violations() -> Vec<String> {
    let rules: Vec<Formula> = encode_config(&load_fixture_workflow("config2.wf"), 1)
        .unwrap()
        .into_iter()
        .map(|r| r.formula)
        .collect();
    let f = |s: &str| parse_formula(s).unwrap_or_else(|e| panic!("bad expectation `{s}`: {e}"));
    let mut violations = Vec::new();

    // Each activity compiles to one contiguous block: entry rules (past),
    // exit rules (future), in source order.
    let blocks: [(&str, Vec<Formula>); 3] = [
        (
            "Ecc",
            vec![
                f("A:Ecc#1 -> ((A:Ecc#1 && !T:t'_no#1) S T:t'_no#1)"),
                f("T:t'_no#1 -> (X A:Ecc#1 && !A:Ecc#1)"),
                f("A:Ecc#1 -> ((A:Ecc#1 && !T:u_1#1) U T:u_1#1)"),
                f("T:u_1#1 -> (Y A:Ecc#1 && !A:Ecc#1)"),
            ],
        ),
        (
            "Ship",
            vec![
                f("A:Ship#1 -> ((A:Ship#1 && !(T:t''_yes#1 || T:t'_yes#1)) S (T:t''_yes#1 || T:t'_yes#1))"),
                f("T:t''_yes#1 -> (X A:Ship#1 && !A:Ship#1)"),
                f("T:t'_yes#1 -> (X A:Ship#1 && !A:Ship#1)"),
                f("A:Ship#1 -> ((A:Ship#1 && !T:u_3#1) U T:u_3#1)"),
                f("T:u_3#1 -> (Y A:Ship#1 && !A:Ship#1)"),
            ],
        ),
        (
            "Rej",
            vec![
                f("A:Rej#1 -> ((A:Rej#1 && !T:t''_no#1) S T:t''_no#1)"),
                f("T:t''_no#1 -> (X A:Rej#1 && !A:Rej#1)"),
                f("A:Rej#1 -> ((A:Rej#1 && !T:u_2#1) U T:u_2#1)"),
                f("T:u_2#1 -> (Y A:Rej#1 && !A:Rej#1)"),
            ],
        ),
    ];
    for (what, expected) in &blocks {
        if !rules.windows(expected.len()).any(|w| w == expected.as_slice()) {
            violations.push(format!("{what}: expected rule block not found"));
        }
    }

    // Both conditionals carry branch exclusion (labels in sorted order)
    // and punctuality.
    for (c, yes, no) in [("cond'", "t'_yes", "t'_no"), ("cond''", "t''_yes", "t''_no")] {
        if !rules.contains(&f(&format!("T:{no}#1 -> !T:{yes}#1"))) {
            violations.push(format!("missing branch exclusion for {c}"));
        }
        if !rules.contains(&f(&format!("A:{c}#1 -> (!(Y A:{c}#1) && !(X A:{c}#1))"))) {
            violations.push(format!("missing punctuality for {c}"));
        }
    }

    if !violations.is_empty() {
        violations.push(format!(
            "compiled rules were:\n{}",
            rules.iter().map(|x| format!("  {x}")).collect::<Vec<_>>().join("\n")
        ));
    }
    violations
}

// ---------------------------------------------------------------------
// DIMACS reader (the library only exports; tests read back to round-trip).

pub fn parse_dimacs_cnf(text: &str) -> reflow_sat::Cnf {
    let mut num_vars = 0u32;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p cnf ") {
            num_vars = rest
                .split_whitespace()
                .next()
                .expect("variable count")
                .parse()
                .expect("numeric variable count");
            continue;
        }
        for token in line.split_whitespace() {
            let lit: i32 = token.parse().expect("numeric literal");
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    assert!(current.is_empty(), "unterminated clause");
    let mut cnf = reflow_sat::Cnf::new(num_vars);
    for c in clauses {
        cnf.push_clause(c);
    }
    cnf
}
