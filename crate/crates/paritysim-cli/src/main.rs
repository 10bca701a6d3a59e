//! Command-line front end for the parity-measurement toolkit. `run` plays
//! a protocol branch by branch, `verify-identities` checks the built-in
//! rewrite identities, `count-resources` prints GHZ preparation costs, and
//! `exec` executes a circuit file. All numbers are printed with at most 12
//! significant digits so identical invocations give byte-identical output.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use paritysim::circuit::{Circuit, Gate};
use paritysim::exec::{apply_gate, execute_all_branches, execute_sample};
use paritysim::graphstate::{parity_fuse, stabilizer_deviation, Graph};
use paritysim::hybrid::{hybrid_ghz, new_cz};
use paritysim::identities::builtin_identity_suite;
use paritysim::identities::channels_equal;
use paritysim::protocols::{
    bell_analyzer, cz_via_parity, ghz_chain, ghz_fusion, prepare_bell, teleport, AnalyzerVariant,
};
use paritysim::resources::{count_ghz_resources, Scheme};
use paritysim::seeded_rng;
use paritysim::state::{bell_state, bell_state_on, fidelity, PureState, QubitRegister};
use rand::Rng;
use serde_json::{json, Value};

type CliError = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(
    name = "paritysim",
    version,
    about = "Quantum-network simulator built on two-qubit parity measurements"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// RNG seed for branch sampling and randomized identity checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Enumerate every measurement branch or sample a single one
    #[arg(long, global = true, value_enum, default_value_t = BranchMode::All)]
    branches: BranchMode,

    /// Print machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Pass threshold for fidelity and deviation checks
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BranchMode {
    All,
    Sample,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol and report each measurement branch
    Run {
        #[command(subcommand)]
        protocol: Protocol,
    },
    /// Check the six built-in parity-gate rewrite identities
    VerifyIdentities,
    /// Closed-form GHZ preparation costs under both schemes
    CountResources {
        /// Number of GHZ qubits
        #[arg(long)]
        n: usize,
    },
    /// Execute a circuit file on an input state
    Exec {
        /// Path to a circuit JSON file
        circuit: PathBuf,
        /// Input state as inline JSON or a file path; all zeros if omitted
        #[arg(long)]
        input_state: Option<String>,
    },
}

#[derive(Subcommand)]
enum Protocol {
    /// Prepare a Bell state from the basis state |x,y>
    Bell {
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        x: u8,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        y: u8,
    },
    /// Read the Bell-basis label of a two-qubit state without destroying it
    Analyzer {
        /// Two-qubit input state; defaults to the parity-0 sign-0 Bell state
        #[arg(long)]
        input_state: Option<String>,
        /// `two` reads the labels; `four` also restores Bell inputs
        #[arg(long, value_enum, default_value_t = Hadamards::Two)]
        variant: Hadamards,
    },
    /// Teleport a single-qubit state through a parity-built Bell pair
    Teleport {
        /// Single-qubit payload; defaults to |+>
        #[arg(long)]
        input_state: Option<String>,
    },
    /// Chain parity measurements into an n-qubit GHZ state
    Ghz {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Fuse two GHZ states (--n/--m) or two graph-state vertices (--graph)
    Fuse {
        /// Graph JSON file for graph-state fusion
        #[arg(long)]
        graph: Option<PathBuf>,
        /// First fused vertex (graph mode)
        #[arg(long)]
        q1: Option<usize>,
        /// Second fused vertex (graph mode)
        #[arg(long)]
        q2: Option<usize>,
        /// Size of the first GHZ state (GHZ mode)
        #[arg(long)]
        n: Option<usize>,
        /// Size of the second GHZ state (GHZ mode)
        #[arg(long)]
        m: Option<usize>,
    },
    /// Grow GHZ states on the spins and modes of an electron array
    HybridGhz {
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// Controlled-Z from three parity measurements on one ancilla
    Cz {
        /// Two-qubit payload; defaults to |++>
        #[arg(long)]
        input_state: Option<String>,
    },
    /// Controlled-Z between two spins using their mode pair as the ancilla
    NewCz {
        /// Two-qubit spin payload; defaults to |++>
        #[arg(long)]
        input_state: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Hadamards {
    Two,
    Four,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    match dispatch(cli, &mut out) {
        Ok(code) => {
            // A reader that hangs up early (| head) is not an error.
            use std::io::Write;
            match std::io::stdout().write_all(out.as_bytes()) {
                Ok(()) => code,
                Err(err) if err.kind() == std::io::ErrorKind::BrokenPipe => code,
                Err(err) => {
                    eprintln!("error: {err}");
                    ExitCode::from(2)
                }
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli, out: &mut String) -> Result<ExitCode, CliError> {
    let g = &cli.global;
    match cli.command {
        Command::Run { protocol } => run_protocol(protocol, g, out),
        Command::VerifyIdentities => verify_identities(g, out),
        Command::CountResources { n } => count_resources(n, g, out),
        Command::Exec {
            circuit,
            input_state,
        } => exec_circuit(&circuit, input_state.as_deref(), g, out),
    }
}

/// Rounds to 12 significant digits, the precision every printed number is
/// clamped to.
fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return 0.0;
    }
    format!("{x:.11e}").parse().expect("formatted float")
}

fn fmt12(x: f64) -> String {
    format!("{}", sig12(x))
}

fn plural(count: usize, one: &str, many: &str) -> String {
    if count == 1 {
        format!("{count} {one}")
    } else {
        format!("{count} {many}")
    }
}

fn say(out: &mut String, line: impl AsRef<str>) {
    out.push_str(line.as_ref());
    out.push('\n');
}

/// One measurement branch as reported to the user: named outcome bits, the
/// branch probability, named check values, and optionally a state to embed
/// in JSON output.
struct Record {
    outcomes: Vec<(String, u8)>,
    probability: f64,
    metrics: Vec<(&'static str, f64)>,
    state: Option<PureState>,
    pass: Option<bool>,
}

impl Record {
    fn to_json(&self) -> Value {
        let mut outcomes = serde_json::Map::new();
        for (name, bit) in &self.outcomes {
            outcomes.insert(name.clone(), json!(bit));
        }
        let mut object = serde_json::Map::new();
        object.insert("outcomes".into(), Value::Object(outcomes));
        object.insert("probability".into(), json!(sig12(self.probability)));
        for (name, value) in &self.metrics {
            object.insert((*name).into(), json!(sig12(*value)));
        }
        if let Some(state) = &self.state {
            object.insert("state".into(), state.to_json_value());
        }
        Value::Object(object)
    }

    fn to_line(&self) -> String {
        let mut parts: Vec<String> = self
            .outcomes
            .iter()
            .map(|(name, bit)| format!("{name}={bit}"))
            .collect();
        parts.push(format!("probability {}", fmt12(self.probability)));
        for (name, value) in &self.metrics {
            parts.push(format!("{name} {}", fmt12(*value)));
        }
        if self.pass == Some(false) {
            parts.push("FAIL".into());
        }
        parts.join("  ")
    }
}

/// Draws a branch index with probability proportional to each record's
/// probability, deterministically in the seed.
fn sample_index(records: &[Record], seed: u64) -> usize {
    let mut rng = seeded_rng(seed);
    let total: f64 = records.iter().map(|r| r.probability).sum();
    let mut remaining = rng.gen::<f64>() * total;
    for (i, record) in records.iter().enumerate() {
        remaining -= record.probability;
        if remaining <= 0.0 {
            return i;
        }
    }
    records.len() - 1
}

/// Prints the records and returns the process exit code: 1 if any verified
/// branch failed its check, 0 otherwise.
fn emit(
    name: &str,
    preamble: Option<&str>,
    mut records: Vec<Record>,
    g: &Global,
    out: &mut String,
) -> Result<ExitCode, CliError> {
    let total = records.len();
    if g.branches == BranchMode::Sample && total > 1 {
        let index = sample_index(&records, g.seed);
        records = vec![records.swap_remove(index)];
    }
    let all_pass = records.iter().all(|r| r.pass != Some(false));
    if g.json {
        let array: Vec<Value> = records.iter().map(Record::to_json).collect();
        say(out, serde_json::to_string_pretty(&Value::Array(array))?);
    } else {
        match g.branches {
            BranchMode::All => say(out, format!("{name}: {}", plural(total, "branch", "branches"))),
            BranchMode::Sample => say(
                out,
                format!("{name}: sampled 1 of {total} branches (seed {})", g.seed),
            ),
        }
        if let Some(line) = preamble {
            say(out, line);
        }
        for record in &records {
            say(out, record.to_line());
        }
        if records.iter().any(|r| r.pass.is_some()) {
            if all_pass {
                say(out, format!("ok: every branch within tolerance {}", fmt12(g.tolerance)));
            } else {
                say(
                    out,
                    format!("FAIL: a branch missed its target at tolerance {}", fmt12(g.tolerance)),
                );
            }
        }
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Reads a state from inline JSON (first non-space byte `{`) or a file.
fn load_state(arg: &str) -> Result<PureState, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| format!("cannot read state file {arg}: {e}"))?
    };
    Ok(PureState::from_json_str(&text)?)
}

/// |+...+> on fresh labels, built by Hadamards on the all-zeros state.
fn plus_state(labels: &[&str]) -> PureState {
    let register = QubitRegister::from_labels(labels).expect("distinct labels");
    let mut state = PureState::zero(register);
    let bits = BTreeMap::new();
    for label in labels {
        state = apply_gate(&state, &Gate::h(*label), &bits).expect("label in register");
    }
    state
}

fn run_protocol(protocol: Protocol, g: &Global, out: &mut String) -> Result<ExitCode, CliError> {
    let tol = g.tolerance;
    match protocol {
        Protocol::Bell { x, y } => {
            let prep = prepare_bell(x, y);
            let target = prep.target();
            let mut records = Vec::new();
            for branch in &prep.branches {
                let f = fidelity(&branch.corrected, &target)?;
                records.push(Record {
                    outcomes: vec![("p".into(), branch.parity)],
                    probability: branch.probability,
                    metrics: vec![("corrected_fidelity", f)],
                    state: Some(branch.corrected.clone()),
                    pass: Some(f >= 1.0 - tol),
                });
            }
            emit(&format!("bell x={x} y={y}"), None, records, g, out)
        }
        Protocol::Analyzer {
            input_state,
            variant,
        } => {
            let input = match input_state {
                Some(arg) => load_state(&arg)?,
                None => bell_state(0, 0),
            };
            let variant = match variant {
                Hadamards::Two => AnalyzerVariant::TwoHadamard,
                Hadamards::Four => AnalyzerVariant::FourHadamard,
            };
            let analysis = bell_analyzer(&input, variant)?;
            let mut records = Vec::new();
            for branch in &analysis.branches {
                let mut metrics = Vec::new();
                if variant == AnalyzerVariant::FourHadamard {
                    // Informational: 1 exactly when the input was a Bell
                    // state, less when the readout had to collapse it.
                    metrics.push(("input_fidelity", fidelity(&branch.state, &analysis.input)?));
                }
                records.push(Record {
                    outcomes: vec![("i".into(), branch.parity), ("j".into(), branch.sign)],
                    probability: branch.probability,
                    metrics,
                    state: Some(branch.state.clone()),
                    pass: None,
                });
            }
            emit("analyzer", None, records, g, out)
        }
        Protocol::Teleport { input_state } => {
            let payload = match input_state {
                Some(arg) => load_state(&arg)?,
                None => plus_state(&["q1"]),
            };
            let run = teleport(&payload)?;
            let mut records = Vec::new();
            for branch in &run.branches {
                let f = fidelity(&branch.bob_corrected, &run.payload_on_b)?;
                records.push(Record {
                    outcomes: vec![("p1".into(), branch.p1), ("p2".into(), branch.p2)],
                    probability: branch.probability,
                    metrics: vec![("corrected_fidelity", f)],
                    state: Some(branch.bob_corrected.clone()),
                    pass: Some(f >= 1.0 - tol),
                });
            }
            emit("teleport", None, records, g, out)
        }
        Protocol::Ghz { n } => {
            let run = ghz_chain(n)?;
            let target = run.target();
            let mut records = Vec::new();
            for branch in &run.branches {
                let f = fidelity(&branch.corrected, &target)?;
                records.push(Record {
                    outcomes: name_bits("p", 2, &branch.parities),
                    probability: branch.probability,
                    metrics: vec![("corrected_fidelity", f)],
                    state: Some(branch.corrected.clone()),
                    pass: Some(f >= 1.0 - tol),
                });
            }
            emit(&format!("ghz n={n}"), None, records, g, out)
        }
        Protocol::Fuse { graph, q1, q2, n, m } => run_fuse(graph, q1, q2, n, m, g, out),
        Protocol::HybridGhz { n } => {
            let run = hybrid_ghz(n)?;
            let target = run.target();
            let mut records = Vec::new();
            for branch in &run.branches {
                let f = fidelity(&branch.corrected, &target)?;
                let mut outcomes = name_bits("p", 2, &branch.first_chain);
                outcomes.extend(name_bits("pp", 2, &branch.second_chain));
                records.push(Record {
                    outcomes,
                    probability: branch.probability,
                    metrics: vec![("corrected_fidelity", f)],
                    // 2n-qubit states across up to 4^(n-1) branches are too
                    // bulky to embed.
                    state: None,
                    pass: Some(f >= 1.0 - tol),
                });
            }
            emit(&format!("hybrid-ghz n={n}"), None, records, g, out)
        }
        Protocol::Cz { input_state } => {
            let payload = match input_state {
                Some(arg) => load_state(&arg)?,
                None => plus_state(&["q1", "q2"]),
            };
            let run = cz_via_parity(&payload)?;
            let mut records = Vec::new();
            for branch in &run.branches {
                let f = fidelity(&branch.corrected, &run.target)?;
                records.push(Record {
                    outcomes: vec![
                        ("p1".into(), branch.p1),
                        ("p2".into(), branch.p2),
                        ("a".into(), branch.a),
                    ],
                    probability: branch.probability,
                    metrics: vec![("corrected_fidelity", f)],
                    state: Some(branch.corrected.clone()),
                    pass: Some(f >= 1.0 - tol),
                });
            }
            emit("cz", None, records, g, out)
        }
        Protocol::NewCz { input_state } => {
            let payload = match input_state {
                Some(arg) => load_state(&arg)?,
                None => plus_state(&["q1", "q2"]),
            };
            let run = new_cz(&payload)?;
            let mut records = Vec::new();
            for branch in &run.branches {
                let spin_f = fidelity(&branch.spins, &run.target_spins)?;
                let bell = bell_state_on(branch.modes.register().clone(), branch.p3, branch.p2)?;
                let mode_f = fidelity(&branch.modes, &bell)?;
                records.push(Record {
                    outcomes: vec![
                        ("p1".into(), branch.p1),
                        ("p2".into(), branch.p2),
                        ("p3".into(), branch.p3),
                    ],
                    probability: branch.probability,
                    metrics: vec![("corrected_fidelity", spin_f), ("mode_fidelity", mode_f)],
                    state: Some(branch.spins.clone()),
                    pass: Some(spin_f >= 1.0 - tol && mode_f >= 1.0 - tol),
                });
            }
            emit("new-cz", None, records, g, out)
        }
    }
}

fn name_bits(prefix: &str, first: usize, bits: &[u8]) -> Vec<(String, u8)> {
    bits.iter()
        .enumerate()
        .map(|(i, bit)| (format!("{prefix}{}", first + i), *bit))
        .collect()
}

fn run_fuse(
    graph: Option<PathBuf>,
    q1: Option<usize>,
    q2: Option<usize>,
    n: Option<usize>,
    m: Option<usize>,
    g: &Global,
    out: &mut String,
) -> Result<ExitCode, CliError> {
    let tol = g.tolerance;
    match (graph, n, m) {
        (Some(path), None, None) => {
            let q1 = q1.ok_or("--q1 is required with --graph")?;
            let q2 = q2.ok_or("--q2 is required with --graph")?;
            let text = fs::read_to_string(&path)
                .map_err(|e| format!("cannot read graph file {}: {e}", path.display()))?;
            let input = Graph::from_json_str(&text)?;
            let fusion = parity_fuse(&input, q1, q2)?;
            let preamble = format!("fused graph: {}", fusion.fused.to_json_string());
            let mut records = Vec::new();
            for branch in &fusion.branches {
                let deviation = stabilizer_deviation(&branch.corrected, &fusion.fused)?;
                records.push(Record {
                    outcomes: vec![("p".into(), branch.parity)],
                    probability: branch.probability,
                    metrics: vec![("stabilizer_deviation", deviation)],
                    state: Some(branch.corrected.clone()),
                    pass: Some(deviation <= tol),
                });
            }
            emit(
                &format!("fuse q1={q1} q2={q2}"),
                Some(&preamble),
                records,
                g,
                out,
            )
        }
        (None, Some(n), Some(m)) if q1.is_none() && q2.is_none() => {
            let run = ghz_fusion(n, m)?;
            let target = run.target();
            let mut records = Vec::new();
            for branch in &run.branches {
                let f = fidelity(&branch.corrected, &target)?;
                records.push(Record {
                    outcomes: vec![("p".into(), branch.parity)],
                    probability: branch.probability,
                    metrics: vec![("corrected_fidelity", f)],
                    state: Some(branch.corrected.clone()),
                    pass: Some(f >= 1.0 - tol),
                });
            }
            emit(&format!("fuse n={n} m={m}"), None, records, g, out)
        }
        _ => Err("fuse needs either --graph with --q1/--q2 or --n with --m".into()),
    }
}

fn verify_identities(g: &Global, out: &mut String) -> Result<ExitCode, CliError> {
    const TRIALS: usize = 50;
    let suite = builtin_identity_suite();
    let mut rows = Vec::new();
    let mut all_pass = true;
    for pair in &suite {
        let cmp = channels_equal(&pair.left, &pair.right, TRIALS, g.seed, g.tolerance)?;
        all_pass &= cmp.equal;
        rows.push((pair.name, cmp));
    }
    if g.json {
        let array: Vec<Value> = rows
            .iter()
            .map(|(name, cmp)| {
                json!({
                    "identity": name,
                    "trials": TRIALS,
                    "pass": cmp.equal,
                    "max_deviation": sig12(cmp.max_deviation),
                })
            })
            .collect();
        say(out, serde_json::to_string_pretty(&Value::Array(array))?);
    } else {
        say(
            out,
            format!("{:<30} {:>6}  {:<6} {}", "identity", "trials", "result", "max_deviation"),
        );
        for (name, cmp) in &rows {
            let result = if cmp.equal { "PASS" } else { "FAIL" };
            let mut line = format!(
                "{name:<30} {TRIALS:>6}  {result:<6} {:.3e}",
                cmp.max_deviation
            );
            if let Some(witness) = &cmp.counterexample {
                line.push_str(&format!("  ({witness})"));
            }
            say(out, line);
        }
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn count_resources(n: usize, g: &Global, out: &mut String) -> Result<ExitCode, CliError> {
    let native = count_ghz_resources(n, Scheme::Native)?;
    let cnot_based = count_ghz_resources(n, Scheme::CnotBased)?;
    if g.json {
        let doc = json!({ "n": n, "native": native, "cnot_based": cnot_based });
        say(out, serde_json::to_string_pretty(&doc)?);
    } else {
        say(out, format!("GHZ_{n} preparation cost"));
        say(out, format!("{:<22} {:>8} {:>12}", "resource", "native", "cnot_based"));
        let rows = [
            ("ancillae", native.ancillae, cnot_based.ancillae),
            (
                "ancilla_measurements",
                native.ancilla_measurements,
                cnot_based.ancilla_measurements,
            ),
            ("p_gates", native.p_gates, cnot_based.p_gates),
            ("hadamards", native.hadamards, cnot_based.hadamards),
            (
                "post_processing_ops",
                native.post_processing_ops,
                cnot_based.post_processing_ops,
            ),
        ];
        for (label, a, b) in rows {
            say(out, format!("{label:<22} {a:>8} {b:>12}"));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exec_circuit(
    path: &PathBuf,
    input_state: Option<&str>,
    g: &Global,
    out: &mut String,
) -> Result<ExitCode, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read circuit file {}: {e}", path.display()))?;
    let circuit = Circuit::from_json_str(&text)?;
    let input = match input_state {
        Some(arg) => {
            let state = load_state(arg)?;
            let want: Vec<&str> = circuit.register().labels().collect();
            let got: Vec<&str> = state.register().labels().collect();
            if want != got {
                return Err(format!(
                    "input state qubits [{}] do not match the circuit register [{}]",
                    got.join(", "),
                    want.join(", ")
                )
                .into());
            }
            state.relabeled(circuit.register().clone())?
        }
        None => PureState::zero(circuit.register().clone()),
    };
    let results = match g.branches {
        BranchMode::All => execute_all_branches(&circuit, &input)?,
        BranchMode::Sample => vec![execute_sample(&circuit, &input, g.seed)?],
    };
    let records: Vec<Record> = results
        .into_iter()
        .map(|branch| Record {
            outcomes: branch
                .outcomes
                .iter()
                .map(|(name, bit)| (name.clone(), *bit))
                .collect(),
            probability: branch.probability,
            metrics: Vec::new(),
            state: Some(branch.state),
            pass: None,
        })
        .collect();
    // Sampling already happened inside execute_sample, so emit sees the
    // final record list either way.
    let shown = ExitCode::SUCCESS;
    let name = format!("{}", path.display());
    if g.json {
        let array: Vec<Value> = records.iter().map(Record::to_json).collect();
        say(out, serde_json::to_string_pretty(&Value::Array(array))?);
    } else {
        match g.branches {
            BranchMode::All => {
                say(out, format!("{name}: {}", plural(records.len(), "branch", "branches")))
            }
            BranchMode::Sample => say(out, format!("{name}: sampled branch (seed {})", g.seed)),
        }
        for record in &records {
            say(out, record.to_line());
        }
    }
    Ok(shown)
}
