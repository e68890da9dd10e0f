//! Command-line front end: validate workflow files, compile scenarios to
//! their temporal formula, run bounded checks, and render stored witnesses.
//!
//! Exit codes: 0 — property holds / formula satisfiable as requested;
//! 1 — counterexample found / unsatisfiable as requested (or structural
//! violations for `validate`); 2 — usage or input error; 3 — internal
//! failure.  Verdicts never conflate with internal failures.

use crate::bsc::{
    check_sat, encode_bounded, witness_from_json, witness_to_json, BscError, CheckStats,
    CheckVerdict,
};
use crate::encoder::{
    encode_scenario, EncodeOptions, PropId, Scenario, ScenarioEncoding, ScenarioSpec,
};
use crate::ltl::{parse_formula, Formula, LassoWord};
use crate::workflow::{parse_workflow, WorkflowGraph};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Environment variable naming an external SAT solver binary; used by
/// `check --solver dimacs` when `--model-in` is not given.
pub const SOLVER_ENV: &str = "REFLOW_SAT_SOLVER";

#[derive(Parser)]
#[command(
    name = "reflow",
    version,
    about = "Workflow reconfiguration verifier: compiles workflow scenarios to linear temporal logic with past and checks properties by bounded satisfiability"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit a machine-readable JSON report instead of human text
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverChoice {
    /// Built-in CDCL solver
    Internal,
    /// Export DIMACS CNF for an external solver and import its model
    Dimacs,
}

#[derive(Subcommand)]
enum Command {
    /// Check a workflow file against the structural rules
    Validate {
        /// Workflow file (.wf)
        file: PathBuf,
    },
    /// Translate a scenario into its annotated temporal formula
    Compile {
        /// Scenario file (.scn); workflow paths resolve relative to it
        file: PathBuf,
        /// Write the formula text here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Render cross-configuration exclusions as a single negated
        /// conjunction instead of per-element negations
        #[arg(long)]
        literal_exclusivity: bool,
    },
    /// Run a bounded satisfiability or property check on a scenario
    Check {
        /// Scenario file (.scn)
        file: PathBuf,
        /// Temporal property over the scenario's propositions; the check
        /// searches for a counterexample execution
        #[arg(long, conflicts_with = "reach")]
        property: Option<String>,
        /// Reachability sugar: `Name#j` searches for an execution of the
        /// scenario in which activity `Name` of instance `j` occurs
        #[arg(long)]
        reach: Option<String>,
        /// Maximum prefix length of candidate lasso executions
        #[arg(long, default_value_t = 20)]
        bound: usize,
        /// Solver backend; `dimacs` exports the CNF (see --dimacs-out) and
        /// imports a model from --model-in or from the solver named by the
        /// REFLOW_SAT_SOLVER environment variable
        #[arg(long, value_enum, default_value_t = SolverChoice::Internal)]
        solver: SolverChoice,
        /// Where to write the DIMACS CNF (required with --solver dimacs)
        #[arg(long)]
        dimacs_out: Option<PathBuf>,
        /// SAT-competition style model file produced by an external solver
        #[arg(long)]
        model_in: Option<PathBuf>,
        /// Write the witness (if any) as JSON to this path
        #[arg(long)]
        witness_out: Option<PathBuf>,
        /// Replay the witness against the query once more and report it
        #[arg(long)]
        recheck: bool,
        /// See `compile --literal-exclusivity`
        #[arg(long)]
        literal_exclusivity: bool,
    },
    /// Render a stored witness as a per-instance trace table
    Trace {
        /// Witness JSON file as written by `check --witness-out`
        file: PathBuf,
    },
}

/// A failed run: `Input` covers usage and bad files (exit 2), `Internal`
/// covers broken invariants such as replay failures (exit 3).
enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn report(self) -> u8 {
        match self {
            Failure::Input(msg) => {
                eprintln!("error: {msg}");
                2
            }
            Failure::Internal(msg) => {
                eprintln!("internal error: {msg}");
                3
            }
        }
    }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

pub fn run() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let json = cli.json;
    let result = match cli.command {
        Command::Validate { file } => cmd_validate(&file, json),
        Command::Compile {
            file,
            out,
            literal_exclusivity,
        } => cmd_compile(&file, out.as_deref(), literal_exclusivity, json),
        Command::Check {
            file,
            property,
            reach,
            bound,
            solver,
            dimacs_out,
            model_in,
            witness_out,
            recheck,
            literal_exclusivity,
        } => cmd_check(CheckArgs {
            file,
            property,
            reach,
            bound,
            solver,
            dimacs_out,
            model_in,
            witness_out,
            recheck,
            literal_exclusivity,
            json,
        }),
        Command::Trace { file } => cmd_trace(&file, json),
    };
    match result {
        Ok(code) => code,
        Err(f) => f.report(),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "workflow".to_string())
}

fn load_workflow(path: &Path) -> Result<WorkflowGraph, Failure> {
    let text = read_file(path)?;
    parse_workflow(&file_stem(path), &text)
        .map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    let text = read_file(path)?;
    let spec =
        ScenarioSpec::parse(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let config1 = load_workflow(&dir.join(&spec.config1_path))?;
    let config2 = load_workflow(&dir.join(&spec.config2_path))?;
    Scenario::new(
        file_stem(path),
        config1,
        config2,
        spec.starts,
        spec.reconfig_at,
        spec.accept,
    )
    .map_err(|e| input(format!("{}: {e}", path.display())))
}

fn cmd_validate(file: &Path, json: bool) -> Result<u8, Failure> {
    let graph = load_workflow(file)?;
    let report = graph.validate();
    let exit = u8::from(!report.is_valid());
    if json {
        let violations: Vec<_> = report
            .violations()
            .iter()
            .map(|v| {
                json!({
                    "subject": v.subject.as_ref(),
                    "rule": v.rule,
                    "message": v.message,
                })
            })
            .collect();
        println!(
            "{}",
            json!({
                "command": "validate",
                "workflow": graph.name(),
                "valid": report.is_valid(),
                "violations": violations,
                "exit_code": exit,
            })
        );
    } else if report.is_valid() {
        println!("workflow `{}` is valid", graph.name());
    } else {
        println!(
            "workflow `{}` violates the structural rules:",
            graph.name()
        );
        println!("{report}");
    }
    Ok(exit)
}

fn compile_text(encoding: &ScenarioEncoding) -> String {
    let mut out = String::new();
    for line in encoding.lines() {
        let _ = writeln!(out, "# {}", line.comment);
        let _ = writeln!(out, "{}", line.formula);
        out.push('\n');
    }
    out
}

fn cmd_compile(
    file: &Path,
    out: Option<&Path>,
    literal_exclusivity: bool,
    json: bool,
) -> Result<u8, Failure> {
    let scenario = load_scenario(file)?;
    let opts = EncodeOptions {
        literal_exclusivity,
    };
    let encoding = encode_scenario(&scenario, opts)
        .map_err(|e| Failure::Internal(format!("scenario passed validation but failed to encode: {e}")))?;
    let text = compile_text(&encoding);
    if let Some(out_path) = out {
        std::fs::write(out_path, &text)
            .map_err(|e| input(format!("{}: {e}", out_path.display())))?;
    }
    if json {
        let lines: Vec<_> = encoding
            .lines()
            .iter()
            .map(|l| json!({"comment": l.comment, "formula": l.formula.to_string()}))
            .collect();
        println!(
            "{}",
            json!({
                "command": "compile",
                "scenario": scenario.name(),
                "lines": lines,
                "out": out.map(|p| p.display().to_string()),
                "exit_code": 0,
            })
        );
    } else if out.is_none() {
        print!("{text}");
    } else {
        println!(
            "scenario `{}` compiled: {} top-level conjuncts",
            scenario.name(),
            encoding.lines().len()
        );
    }
    Ok(0)
}

struct CheckArgs {
    file: PathBuf,
    property: Option<String>,
    reach: Option<String>,
    bound: usize,
    solver: SolverChoice,
    dimacs_out: Option<PathBuf>,
    model_in: Option<PathBuf>,
    witness_out: Option<PathBuf>,
    recheck: bool,
    literal_exclusivity: bool,
    json: bool,
}

/// What the query asks for, fixing how verdicts map to exit codes.
enum QueryMode {
    /// `--reach`: Sat is the requested outcome (exit 0).
    Reach(String),
    /// `--property`: Sat is a counterexample (exit 1).
    Property(String),
}

fn parse_reach_target(s: &str, scenario: &Scenario) -> Result<PropId, Failure> {
    let prop = PropId::parse(s)
        .or_else(|| PropId::parse(&format!("A:{s}")))
        .ok_or_else(|| {
            input(format!(
                "`{s}` is not an activity reference; expected `Name#instance`, e.g. `Conf#1`"
            ))
        })?;
    if !matches!(prop, PropId::Activity { .. }) {
        return Err(input(format!(
            "`{s}` does not name an activity; --reach takes `Name#instance`"
        )));
    }
    if !scenario.props().contains(&prop.render()) {
        return Err(input(format!(
            "activity `{}` is not part of scenario `{}` (instances 1..={})",
            prop.render(),
            scenario.name(),
            scenario.instances()
        )));
    }
    Ok(prop)
}

fn parse_property(text: &str, scenario: &Scenario) -> Result<Formula, Failure> {
    let property = parse_formula(text).map_err(|e| input(format!("property: {e}")))?;
    let known = scenario.props();
    for atom in property.atoms() {
        if !known.contains(&atom) {
            return Err(input(format!(
                "property references `{atom}`, which is not a proposition of scenario `{}`",
                scenario.name()
            )));
        }
    }
    Ok(property)
}

fn cmd_check(args: CheckArgs) -> Result<u8, Failure> {
    if args.bound < 1 {
        return Err(input("--bound must be at least 1"));
    }
    let scenario = load_scenario(&args.file)?;
    for (what, p) in scenario.scheduled_positions() {
        if p >= args.bound {
            eprintln!(
                "warning: {what} is scheduled at position {p}, outside the analyzed window of bound {}",
                args.bound
            );
        }
    }
    let opts = EncodeOptions {
        literal_exclusivity: args.literal_exclusivity,
    };
    let system = encode_scenario(&scenario, opts)
        .map_err(|e| Failure::Internal(format!("scenario passed validation but failed to encode: {e}")))?
        .formula();

    let (query, mode) = match (&args.property, &args.reach) {
        (Some(p), None) => {
            let property = parse_property(p, &scenario)?;
            (
                Formula::and(system, Formula::not(property)),
                QueryMode::Property(p.clone()),
            )
        }
        (None, Some(r)) => {
            let target = parse_reach_target(r, &scenario)?;
            (
                Formula::and(system, Formula::eventually(target.formula())),
                QueryMode::Reach(target.render().to_string()),
            )
        }
        (None, None) => {
            return Err(input("one of --property or --reach is required"));
        }
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };

    let outcome = match args.solver {
        SolverChoice::Internal => check_sat(&query, args.bound).map_err(map_bsc_error)?,
        SolverChoice::Dimacs => match run_external(&args, &query)? {
            Some(result) => result,
            None => return Ok(0), // export-only run
        },
    };

    report_check(&args, &mode, &query, outcome)
}

fn map_bsc_error(e: BscError) -> Failure {
    match e {
        BscError::BoundTooSmall(_) => input(e.to_string()),
        BscError::NoLoopSelected | BscError::ReplayFailed(_) => Failure::Internal(e.to_string()),
    }
}

/// DIMACS round trip: export the CNF, obtain a model (file or spawned
/// solver), verify it against the CNF, and decode it like an internal
/// result.  Returns `None` when the run only exported the CNF.
fn run_external(
    args: &CheckArgs,
    query: &Formula,
) -> Result<Option<crate::bsc::CheckResult>, Failure> {
    use reflow_sat::{export_dimacs, parse_dimacs_model, ExternalOutcome};

    let dimacs_path = args.dimacs_out.as_deref().ok_or_else(|| {
        input("--solver dimacs requires --dimacs-out to name the CNF file")
    })?;
    let encoding = encode_bounded(query, args.bound).map_err(map_bsc_error)?;
    let header = format!("reflow query, bound {}", args.bound);
    let text = export_dimacs(encoding.cnf(), Some(&header));
    std::fs::write(dimacs_path, text)
        .map_err(|e| input(format!("{}: {e}", dimacs_path.display())))?;

    let model_text = if let Some(model_path) = args.model_in.as_deref() {
        read_file(model_path)?
    } else if let Ok(solver_bin) = std::env::var(SOLVER_ENV) {
        let output = std::process::Command::new(&solver_bin)
            .arg(dimacs_path)
            .output()
            .map_err(|e| input(format!("cannot run external solver `{solver_bin}`: {e}")))?;
        // SAT-competition solvers exit 10/20 for sat/unsat; only an
        // unparseable stdout is treated as failure, below.
        String::from_utf8_lossy(&output.stdout).into_owned()
    } else {
        println!(
            "DIMACS CNF written to {}; run a solver and import its output with --model-in (or set {SOLVER_ENV})",
            dimacs_path.display()
        );
        return Ok(None);
    };

    let num_vars = encoding.cnf().num_vars();
    let outcome = parse_dimacs_model(&model_text, num_vars)
        .map_err(|e| input(format!("external solver output: {e}")))?;
    let stats = CheckStats {
        variables: num_vars as usize,
        clauses: encoding.cnf().clauses().len(),
        decisions: 0,
        conflicts: 0,
        propagations: 0,
        solve_ms: 0,
    };
    let verdict = match outcome {
        ExternalOutcome::Unsat => CheckVerdict::UnsatWithinBound,
        ExternalOutcome::Model(assignment) => {
            if !assignment.satisfies(encoding.cnf()) {
                return Err(input(
                    "external model does not satisfy the exported formula",
                ));
            }
            let witness = encoding.decode_witness(&assignment).map_err(map_bsc_error)?;
            crate::bsc::certify(&witness, query).map_err(map_bsc_error)?;
            CheckVerdict::Sat(witness)
        }
    };
    Ok(Some(crate::bsc::CheckResult { verdict, stats }))
}

fn report_check(
    args: &CheckArgs,
    mode: &QueryMode,
    query: &Formula,
    outcome: crate::bsc::CheckResult,
) -> Result<u8, Failure> {
    let k = args.bound;
    let stats = outcome.stats;
    let (witness, exit, verdict_name, human) = match (&outcome.verdict, mode) {
        (CheckVerdict::Sat(w), QueryMode::Reach(target)) => (
            Some(w),
            0u8,
            "sat",
            format!(
                "satisfiable: `{target}` is reachable (bound {k}, loop at {})",
                w.loop_start()
            ),
        ),
        (CheckVerdict::UnsatWithinBound, QueryMode::Reach(target)) => (
            None,
            1,
            "unsat_within_bound",
            format!("unsatisfiable within bound {k}: `{target}` is not reachable in the analyzed window"),
        ),
        (CheckVerdict::Sat(w), QueryMode::Property(p)) => (
            Some(w),
            1,
            "counterexample",
            format!(
                "counterexample to `{p}` found (bound {k}, loop at {})",
                w.loop_start()
            ),
        ),
        (CheckVerdict::UnsatWithinBound, QueryMode::Property(p)) => (
            None,
            0,
            "no_counterexample_within_bound",
            format!("no counterexample within bound {k}: `{p}` holds on every execution of bound <= {k}"),
        ),
    };

    if args.recheck {
        if let Some(w) = witness {
            crate::bsc::certify(w, query).map_err(map_bsc_error)?;
        }
    }
    if let Some(out_path) = args.witness_out.as_deref() {
        if let Some(w) = witness {
            std::fs::write(out_path, witness_to_json(w))
                .map_err(|e| input(format!("{}: {e}", out_path.display())))?;
        }
    }

    if args.json {
        let witness_json: serde_json::Value = match witness {
            Some(w) => serde_json::from_str(&witness_to_json(w)).expect("witness JSON is valid"),
            None => serde_json::Value::Null,
        };
        println!(
            "{}",
            json!({
                "command": "check",
                "scenario": args.file.display().to_string(),
                "query": match mode {
                    QueryMode::Reach(t) => json!({"reach": t}),
                    QueryMode::Property(p) => json!({"property": p}),
                },
                "bound": k,
                "verdict": verdict_name,
                "stats": {
                    "variables": stats.variables,
                    "clauses": stats.clauses,
                    "decisions": stats.decisions,
                    "conflicts": stats.conflicts,
                    "propagations": stats.propagations,
                    "solve_ms": stats.solve_ms,
                },
                "witness": witness_json,
                "exit_code": exit,
            })
        );
    } else {
        println!("{human}");
        println!("stats: {stats}");
        if let Some(w) = witness {
            print!("{}", render_trace(w));
        }
        if let Some(out_path) = args.witness_out.as_deref() {
            if witness.is_some() {
                println!("witness written to {}", out_path.display());
            }
        }
        if args.recheck && witness.is_some() {
            println!("recheck: witness replay agrees with the verdict");
        }
    }
    Ok(exit)
}

fn cmd_trace(file: &Path, json: bool) -> Result<u8, Failure> {
    let text = read_file(file)?;
    let witness =
        witness_from_json(&text).map_err(|e| input(format!("{}: {e}", file.display())))?;
    if json {
        let doc: serde_json::Value =
            serde_json::from_str(&witness_to_json(&witness)).expect("witness JSON is valid");
        println!(
            "{}",
            json!({
                "command": "trace",
                "witness": doc,
                "exit_code": 0,
            })
        );
    } else {
        print!("{}", render_trace(&witness));
    }
    Ok(0)
}

/// Lays the witness out as a table: one row per position, one column per
/// scenario instance (plus a shared column for instance-less
/// propositions), `>` marking the loop start.
pub fn render_trace(w: &LassoWord) -> String {
    let mut instances: Vec<u32> = Vec::new();
    for name in w.universe() {
        if let Some(p) = PropId::parse(name) {
            let j = match p {
                PropId::Activity { instance, .. }
                | PropId::Transition { instance, .. }
                | PropId::ActiveFlag { instance }
                | PropId::ConfigFlag { instance, .. } => Some(instance),
                PropId::Reconfig => None,
            };
            if let Some(j) = j {
                if !instances.contains(&j) {
                    instances.push(j);
                }
            }
        }
    }
    instances.sort_unstable();

    let column_of = |name: &str| -> usize {
        // Column 0 is shared; instance columns follow in order.
        match PropId::parse(name) {
            Some(PropId::Activity { instance, .. })
            | Some(PropId::Transition { instance, .. })
            | Some(PropId::ActiveFlag { instance })
            | Some(PropId::ConfigFlag { instance, .. }) => {
                1 + instances.binary_search(&instance).expect("instance was collected")
            }
            _ => 0,
        }
    };

    let mut headers = vec!["shared".to_string()];
    headers.extend(instances.iter().map(|j| format!("instance {j}")));

    let mut rows: Vec<Vec<String>> = Vec::new();
    for i in 0..=w.bound() {
        let mut cells = vec![String::new(); headers.len()];
        for name in w.state_at(i) {
            let cell = &mut cells[column_of(name)];
            if !cell.is_empty() {
                cell.push(' ');
            }
            cell.push_str(name);
        }
        rows.push(cells);
    }

    // Drop a shared column that never holds anything (pure scenario runs).
    let used: Vec<usize> = (0..headers.len())
        .filter(|&c| c > 0 || rows.iter().any(|r| !r[c].is_empty()) || headers.len() == 1)
        .collect();

    let pos_width = w.bound().to_string().len().max(3);
    let mut widths: Vec<usize> = used.iter().map(|&c| headers[c].len()).collect();
    for row in &rows {
        for (slot, &c) in used.iter().enumerate() {
            widths[slot] = widths[slot].max(row[c].len());
        }
    }

    let mut out = String::new();
    let _ = write!(out, "  {:>pos_width$}", "pos");
    for (slot, &c) in used.iter().enumerate() {
        let _ = write!(out, "  {:<width$}", headers[c], width = widths[slot]);
    }
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        let marker = if i == w.loop_start() { '>' } else { ' ' };
        let _ = write!(out, "{marker} {i:>pos_width$}");
        for (slot, &c) in used.iter().enumerate() {
            let _ = write!(out, "  {:<width$}", row[c], width = widths[slot]);
        }
        while out.ends_with(' ') {
            out.pop();
        }
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "loop: positions {}..{} repeat forever",
        w.loop_start(),
        w.bound()
    );
    out
}
