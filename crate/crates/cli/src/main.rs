use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{ArgGroup, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use stoqdyn::fixtures::{self, FixtureReport};
use stoqdyn::implementation::{markov_family, non_markov_family, transition_constant_family, ProcessFamily};
use stoqdyn::io::{self, AncillaFile, DynamicsFile, FamilyFile, MeasureFile};
use stoqdyn::quantum::{quantum_decomposition_check, random_state, random_unitary_family, TOLERANCE};
use stoqdyn::statistical::{
    realize_family_as_ancilla, realize_linear_as_stochastic, realize_stochastic_as_ancilla, reproduces_stochastic,
};
use stoqdyn::{report, Error, ProbVector, Scalar, TimeGrid};

const DEMOS: [&str; 4] = ["interference", "rotation", "tomography", "random"];

#[derive(Parser)]
#[command(name = "stoqdyn", version, about = "Finite probability dynamics and the stochastic processes implementing them")]
struct Cli {
    /// Render the report as indented `key: value` lines instead of JSON.
    #[arg(long, global = true)]
    table: bool,
    /// Add wall-clock timing to the report.
    #[arg(long, global = true)]
    timing: bool,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide linearity, decomposability, divisibility and time-homogeneity of a dynamics file.
    Analyze { file: PathBuf },
    /// Analyze a measure file, or a family file (detected by its `members` key).
    Check { file: PathBuf },
    /// Build a process family implementing a dynamics file.
    #[command(group(ArgGroup::new("kind").required(true).args(["markov", "non_markov", "transition_constant"])))]
    Implement {
        file: PathBuf,
        #[arg(long)]
        markov: bool,
        #[arg(long)]
        non_markov: bool,
        #[arg(long)]
        transition_constant: bool,
        /// Emit only the member at this initial distribution, e.g. `1/3,2/3`.
        #[arg(long)]
        p0: Option<String>,
    },
    /// Realize a family file as system plus ancilla, or a matrix dynamics file as a stochastic system.
    #[command(group(ArgGroup::new("kind").required(true).args(["ancilla", "stochastic"])))]
    Realize {
        file: PathBuf,
        #[arg(long)]
        ancilla: bool,
        #[arg(long)]
        stochastic: bool,
    },
    /// Run a quantum demonstration: interference, rotation, tomography or random.
    Quantum {
        #[arg(long)]
        demo: String,
    },
    /// Rerun a named reference scenario and compare against its expected outcomes.
    Reproduce {
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        id: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Print the JSON schema of an input format.
    Schema { name: String },
}

/// A report and whether every verdict matched its expectation.
struct Outcome {
    report: Value,
    mismatch: bool,
}

impl From<Value> for Outcome {
    fn from(report: Value) -> Self {
        Outcome { report, mismatch: false }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let mut report = outcome.report;
    if cli.timing {
        if let Value::Object(map) = &mut report {
            map.insert("timing_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
        }
    }
    let text = if cli.table { table(&report) } else { io::to_pretty(&report) };
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, text + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => {
            let mut out = std::io::stdout().lock();
            if let Err(e) = writeln!(out, "{text}") {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
        }
    }
    if outcome.mismatch {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(command: &Command) -> stoqdyn::Result<Outcome> {
    match command {
        Command::Analyze { file } => {
            let dynamics = read::<DynamicsFile>(file)?.to_dynamics()?;
            Ok(report::dynamics_report(&dynamics)?.into())
        }
        Command::Check { file } => {
            let value: Value = read(file)?;
            if value.get("members").is_some() {
                let fam = from_value::<FamilyFile>(value)?.to_family()?;
                Ok(report::family_report(&fam)?.into())
            } else {
                let mu = from_value::<MeasureFile>(value)?.to_measure()?;
                Ok(report::measure_report(&mu)?.into())
            }
        }
        Command::Implement { file, markov, non_markov, p0, .. } => {
            let dynamics = read::<DynamicsFile>(file)?.to_dynamics()?;
            let fam = if *markov {
                markov_family(&dynamics)?
            } else if *non_markov {
                non_markov_family(&dynamics)?
            } else {
                let matrices = dynamics.matrix_family().ok_or_else(|| {
                    Error::PreconditionFailed("--transition-constant needs a matrix-family dynamics file".into())
                })?;
                transition_constant_family(matrices)?
            };
            match p0 {
                Some(text) => {
                    let mu = fam.member(&parse_vector(text)?)?;
                    Ok(serde_json::to_value(MeasureFile::from_measure(&mu)).expect("serializable").into())
                }
                None => Ok(serde_json::to_value(FamilyFile::from_family(&fam)).expect("serializable").into()),
            }
        }
        Command::Realize { file, ancilla, .. } => {
            if *ancilla {
                realize_ancilla(&read::<FamilyFile>(file)?.to_family()?)
            } else {
                realize_stochastic(&read::<DynamicsFile>(file)?)
            }
        }
        Command::Quantum { demo } => quantum_demo(demo),
        Command::Reproduce { id, .. } => {
            let reports = match id {
                Some(id) => vec![fixtures::reproduce(id)?],
                None => fixtures::reproduce_all()?,
            };
            let mismatch = reports.iter().any(|r| !r.passed);
            let report = match reports.as_slice() {
                [single] if id.is_some() => fixture_json(single),
                _ => json!({"fixtures": reports.iter().map(fixture_json).collect::<Vec<_>>()}),
            };
            Ok(Outcome { report, mismatch })
        }
        Command::Schema { name } => Ok(io::emit_schema(name)?.into()),
    }
}

fn fixture_json(r: &FixtureReport) -> Value {
    serde_json::to_value(r).expect("serializable")
}

fn realize_ancilla(fam: &ProcessFamily) -> stoqdyn::Result<Outcome> {
    let realization = realize_family_as_ancilla(fam)?;
    let reproduces = realization.reproduces(fam)?;
    let initials: Vec<Value> =
        realization.initials.iter().map(|(p0, joint)| json!({"p0": p0, "joint": joint.entries()})).collect();
    let report = json!({
        "system": AncillaFile::from_system(&realization.system, None),
        "initials": initials,
        "reproduces": reproduces,
    });
    Ok(Outcome { report, mismatch: !reproduces })
}

fn realize_stochastic(file: &DynamicsFile) -> stoqdyn::Result<Outcome> {
    let dynamics = file.to_dynamics()?;
    let matrices = dynamics
        .matrix_family()
        .ok_or_else(|| Error::PreconditionFailed("--stochastic needs a matrix-family dynamics file".into()))?;
    let s = realize_linear_as_stochastic(matrices)?;
    let same = s.matrices() == *matrices;
    let (sa, lambda0) = realize_stochastic_as_ancilla(&s)?;
    let round_trip = reproduces_stochastic(&sa, &lambda0, &s)?;
    let report = json!({
        "processes": s.processes().iter().map(MeasureFile::from_measure).collect::<Vec<_>>(),
        "reproduces_matrices": same,
        "ancilla": AncillaFile::from_system(&sa, Some(&lambda0)),
        "ancilla_reproduces": round_trip,
    });
    Ok(Outcome { report, mismatch: !(same && round_trip) })
}

fn quantum_demo(name: &str) -> stoqdyn::Result<Outcome> {
    let details = |id: &str, keys: &[&str]| -> stoqdyn::Result<Outcome> {
        let r = fixtures::reproduce(id)?;
        let mut out = Map::new();
        out.insert("summary".into(), json!(r.summary));
        for k in keys {
            out.insert((*k).into(), r.details[*k].clone());
        }
        out.insert("checks".into(), serde_json::to_value(&r.checks).expect("serializable"));
        Ok(Outcome { report: Value::Object(out), mismatch: !r.passed })
    };
    match name {
        "interference" => details("qubit-interference", &["born_trajectory_psi", "difference_t1", "cross_terms_t1"]),
        "rotation" => details("appendix-c-rotation", &["discrepancy", "cross_terms", "d11"]),
        "tomography" => details("qubit-interference", &["tomographic"]),
        "random" => {
            let seed = seed()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut failures = Vec::new();
            for k in 0..100 {
                let d = 2 + k % 2;
                let u = random_unitary_family(TimeGrid::contiguous(3), d, &mut rng);
                let psi = random_state(d, &mut rng);
                for t in 0..=3 {
                    for tp in 0..=t {
                        if !quantum_decomposition_check(&u, &psi, t, tp)? {
                            failures.push(json!({"family": k, "t": t, "t_prime": tp}));
                        }
                    }
                }
            }
            let mismatch = !failures.is_empty();
            Ok(Outcome { report: json!({"seed": seed, "families": 100, "tolerance": TOLERANCE, "failures": failures}), mismatch })
        }
        other => Err(Error::PreconditionFailed(format!("unknown demo {other:?}; expected one of {}", DEMOS.join(", ")))),
    }
}

fn seed() -> stoqdyn::Result<u64> {
    match std::env::var("STOQDYN_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Error::Parse(format!("STOQDYN_SEED must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(0),
    }
}

fn parse_vector(text: &str) -> stoqdyn::Result<ProbVector> {
    let entries = text.split(',').map(|s| Scalar::from_str(s.trim())).collect::<stoqdyn::Result<Vec<_>>>()?;
    ProbVector::new(entries)
}

fn read<T: serde::de::DeserializeOwned>(path: &Path) -> stoqdyn::Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    io::parse_json(&text)
}

fn from_value<T: serde::de::DeserializeOwned>(value: Value) -> stoqdyn::Result<T> {
    serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))
}

fn table(value: &Value) -> String {
    let mut lines = Vec::new();
    render(value, 0, &mut lines);
    lines.join("\n")
}

fn scalar_text(value: &Value) -> Option<String> {
    match value {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => {
            Some(format!("[{}]", items.iter().filter_map(scalar_text).collect::<Vec<_>>().join(", ")))
        }
        Value::Array(items) if items.iter().all(|v| v.is_array() && scalar_text(v).is_some()) => {
            Some(format!("[{}]", items.iter().filter_map(scalar_text).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn render(value: &Value, depth: usize, lines: &mut Vec<String>) {
    let pad = "  ".repeat(depth);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match scalar_text(v) {
                    Some(s) => lines.push(format!("{pad}{k}: {s}")),
                    None => {
                        lines.push(format!("{pad}{k}:"));
                        render(v, depth + 1, lines);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                match scalar_text(v) {
                    Some(s) => lines.push(format!("{pad}- {s}")),
                    None => {
                        lines.push(format!("{pad}[{}]", i + 1));
                        render(v, depth + 1, lines);
                    }
                }
            }
        }
        other => lines.push(format!("{pad}{}", scalar_text(other).unwrap_or_default())),
    }
}
