use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ftsynth::fit;
use ftsynth::io::{
    indicator, indices, read_json, CircuitFile, CircuitsFile, CounterexampleFile, DecodeInput, DecodeOutput,
    FormatError, SpecFile,
};
use ftsynth::noise::{self, Convention, McConfig};
use ftsynth::smt::{SmtError, SolverConfig, Status};
use ftsynth::synth::{check_effect, solve_full, synthesize, violations, Outcome, Solution, SynthConfig, SynthError};
use ftsynth_core::codes::{build_color_code, build_merged_code, build_surface_code, StabilizerCode, SyndromeGraph};
use ftsynth_core::constraints::{ProblemSpec, RoleMode};
use ftsynth_core::f2::PauliType;

const NEGATIVE: u8 = 1;
const USAGE: u8 = 2;
const ENVIRONMENT: u8 = 3;

#[derive(Parser)]
#[command(name = "ftsynth", version, about = "Fault-tolerant circuit synthesis and merged-code decoding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize circuits for every problem of a spec file.
    Synth(SynthArgs),
    /// Check circuits against a spec: effect, validity and fault tolerance.
    Verify(VerifyArgs),
    /// Decode a syndrome of the merged code.
    Decode(DecodeArgs),
    /// Monte Carlo sweep under depolarizing noise, written as CSV.
    Simulate(SimulateArgs),
    /// Fit the logical error rate ansatz and estimate thresholds from a CSV.
    Fit(FitArgs),
    /// Dump a code or one of its syndrome graphs.
    Codes(CodesArgs),
}

#[derive(clap::Args)]
struct SolverArgs {
    /// Solver binary; defaults to FTSYNTH_SOLVER, then z3 on PATH.
    #[arg(long)]
    solver: Option<PathBuf>,
    /// Extra argument passed to the solver (repeatable).
    #[arg(long = "solver-arg", allow_hyphen_values = true)]
    solver_args: Vec<String>,
}

impl SolverArgs {
    fn resolve(&self) -> Result<SolverConfig, SmtError> {
        let mut cfg = match &self.solver {
            Some(p) => SolverConfig::z3(p),
            None => SolverConfig::from_env()?,
        };
        cfg.args.extend(self.solver_args.iter().cloned());
        Ok(cfg)
    }
}

#[derive(clap::Args)]
struct SynthArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Circuit JSON output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run log as JSON lines; stderr when absent.
    #[arg(long)]
    log: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Number of faults to tolerate; overrides the spec.
    #[arg(long)]
    v: Option<usize>,
    /// Joint degree bound; overrides the spec.
    #[arg(long)]
    degree: Option<usize>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    /// Counterexamples added per problem and iteration.
    #[arg(long, default_value_t = 1)]
    cex_batch: usize,
    /// Restart the solver every iteration instead of adding clauses.
    #[arg(long)]
    no_incremental: bool,
    /// Also decide whether one timestep fewer is possible.
    #[arg(long)]
    prove_min: bool,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    circuits: PathBuf,
    /// Number of faults to tolerate; overrides the spec.
    #[arg(long)]
    v: Option<usize>,
}

#[derive(clap::Args)]
struct DecodeArgs {
    /// Syndrome or error JSON.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    w1: f64,
    #[arg(long, default_value_t = 1.0)]
    w2: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Total,
    PerPauli,
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// Code distances, comma separated.
    #[arg(long = "L", value_delimiter = ',', required = true)]
    ls: Vec<usize>,
    /// Physical error rates, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ConventionArg::Total)]
    convention: ConventionArg,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    w1: f64,
    #[arg(long, default_value_t = 1.0)]
    w2: f64,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config and progress as JSON lines; stderr when absent.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(clap::Args)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    /// Bootstrap resamples for the threshold spread.
    #[arg(long, default_value_t = 200)]
    resamples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CodeKindArg {
    Merged,
    Surface,
    Color,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphArg {
    X,
    Z,
}

#[derive(clap::Args)]
struct CodesArgs {
    #[arg(long = "L")]
    l: usize,
    #[arg(long, value_enum, default_value_t = CodeKindArg::Merged)]
    kind: CodeKindArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Syndrome graph to render as DOT.
    #[arg(long, value_enum, default_value_t = GraphArg::X)]
    graph: GraphArg,
}

/// An error together with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let error = e.into();
        let missing = |c: &(dyn std::error::Error + 'static)| {
            matches!(c.downcast_ref::<SmtError>(), Some(SmtError::NotFound(_)))
                || matches!(c.downcast_ref::<SynthError>(), Some(SynthError::Smt(SmtError::NotFound(_))))
        };
        let code = if error.chain().any(missing) {
            ENVIRONMENT
        } else if error.chain().any(|c| c.is::<FormatError>() || c.is::<serde_json::Error>()) {
            USAGE
        } else {
            NEGATIVE
        };
        Failure { code, error }
    }
}

fn usage(msg: String) -> Failure {
    Failure { code: USAGE, error: anyhow::anyhow!(msg) }
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write + Send>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(io::stdout()),
    })
}

fn log_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write + Send>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(io::stderr()),
    })
}

fn write_json(mut w: impl Write, v: &Value) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn json_line(w: &mut dyn Write, v: &Value) -> anyhow::Result<()> {
    serde_json::to_writer(&mut *w, v)?;
    writeln!(w)?;
    Ok(())
}

fn load_spec(path: &Path) -> Result<(SpecFile, Vec<ProblemSpec>), Failure> {
    let file = SpecFile::load(path)?;
    let problems = file.problems()?;
    Ok((file, problems))
}

fn circuits_json(specs: &[ProblemSpec], sols: &[Solution]) -> Value {
    let circuits: Vec<CircuitFile> = specs.iter().zip(sols).map(|(s, sol)| CircuitFile::from_solution(s, sol)).collect();
    json!({ "circuits": circuits })
}

fn run_synth(args: &SynthArgs) -> Result<u8, Failure> {
    let (file, specs) = load_spec(&args.spec)?;
    let solver = args.solver.resolve()?;
    let cfg = SynthConfig {
        v: args.v.unwrap_or(file.v),
        max_iters: args.max_iters,
        timeout: args.timeout.map(Duration::from_secs_f64),
        degree: args.degree.or(file.degree),
        cex_batch: args.cex_batch,
        incremental: !args.no_incremental,
    };
    let mut log = log_output(args.log.as_deref())?;
    json_line(
        &mut log,
        &json!({ "config": {
            "spec": args.spec, "problems": file.problems, "graph": file.graph,
            "single_qubit_gates": file.single_qubit_gates,
            "v": cfg.v, "degree": cfg.degree, "max_iters": cfg.max_iters, "timeout": args.timeout,
            "cex_batch": cfg.cex_batch, "incremental": cfg.incremental, "prove_min": args.prove_min,
            "solver": { "path": solver.path, "args": solver.args },
        }}),
    )?;
    let report = synthesize(&specs, &cfg, &solver)?;
    for it in &report.iterations {
        json_line(&mut log, &json!({ "iteration": it }))?;
    }
    let code = match report.outcome {
        Outcome::Found(sols) => {
            json_line(&mut log, &json!({ "outcome": "found", "iterations": report.iterations.len() }))?;
            if args.prove_min {
                for (spec, sol) in specs.iter().zip(&sols) {
                    let verdict = if spec.steps == 0 {
                        json!("minimal")
                    } else {
                        let shorter = ProblemSpec { steps: spec.steps - 1, ..spec.clone() };
                        match solve_full(&shorter, cfg.v, cfg.degree, &solver, cfg.timeout)? {
                            (Status::Unsat, _) => json!("minimal"),
                            (Status::Sat, Some(s)) => json!({ "shorter": CircuitFile::from_solution(&shorter, &s) }),
                            (status, _) => json!({ "inconclusive": status }),
                        }
                    };
                    json_line(&mut log, &json!({ "minimality": { "problem": sol.name, "steps": spec.steps, "verdict": verdict } }))?;
                }
            }
            write_json(output(args.out.as_deref())?, &circuits_json(&specs, &sols))?;
            0
        }
        Outcome::Unsat => {
            json_line(&mut log, &json!({ "outcome": "unsat" }))?;
            NEGATIVE
        }
        Outcome::Unknown => {
            json_line(&mut log, &json!({ "outcome": "unknown" }))?;
            NEGATIVE
        }
        Outcome::Exhausted { last, pending } => {
            let pending: Vec<Value> = pending
                .iter()
                .map(|(name, c)| {
                    let ops = specs.iter().find(|s| &s.name == name).map(|s| s.operators.as_slice()).unwrap_or(&[]);
                    json!({ "problem": name, "counterexample": CounterexampleFile::new(c, ops) })
                })
                .collect();
            let last = last.map(|sols| circuits_json(&specs, &sols));
            json_line(&mut log, &json!({ "outcome": "exhausted", "last": last, "pending": pending }))?;
            NEGATIVE
        }
    };
    log.flush()?;
    Ok(code)
}

fn run_verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let (file, specs) = load_spec(&args.spec)?;
    let v = args.v.unwrap_or(file.v);
    let circuits = read_json::<CircuitsFile>(&args.circuits)?.into_vec();
    let mut results = Vec::new();
    let mut ok = true;
    for (i, c) in circuits.iter().enumerate() {
        let spec = if c.name.is_empty() { specs.get(i) } else { specs.iter().find(|s| s.name == c.name) }
            .ok_or_else(|| usage(format!("no problem matches circuit {}", if c.name.is_empty() { (i + 1).to_string() } else { c.name.clone() })))?;
        let circuit = c.to_assignment(&spec.gates)?;
        if circuit.steps() != spec.steps {
            return Err(usage(format!("circuit has N = {}, problem expects {}", circuit.steps(), spec.steps)));
        }
        let roles = match (c.roles_for(&spec.a_qubits)?, &spec.roles) {
            (Some(r), _) => r,
            (None, RoleMode::Fixed(r)) => r.clone(),
            (None, RoleMode::Symbolic) => return Err(usage(format!("circuit {:?} needs roles", c.name))),
        };
        let sol = Solution { name: spec.name.clone(), circuit, roles };
        let effect = check_effect(spec, &sol)?;
        let cex = violations(spec, &sol, v, 1)?.pop();
        ok &= effect && cex.is_none();
        results.push(json!({
            "name": spec.name,
            "effect": effect,
            "fault_tolerant": cex.is_none(),
            "counterexample": cex.map(|c| CounterexampleFile::new(&c, &spec.operators)),
        }));
    }
    write_json(io::stdout().lock(), &json!({ "ok": ok, "v": v, "circuits": results }))?;
    Ok(if ok { 0 } else { NEGATIVE })
}

fn run_decode(args: &DecodeArgs) -> Result<u8, Failure> {
    let input: DecodeInput = read_json(&args.input)?;
    let dec = noise::decoder_for(input.l, args.w1, args.w2).map_err(|e| usage(e.to_string()))?;
    let code = &dec.code().code;
    let n = code.n();
    let x_error = input.x_error.as_deref().map(|e| indicator(e, n)).transpose()?;
    let z_error = input.z_error.as_deref().map(|e| indicator(e, n)).transpose()?;
    let sx = match &z_error {
        Some(e) => code.syndrome(PauliType::X, e),
        None => indicator(&input.x_syndrome, code.x_stabilizers.len())?,
    };
    let sz = match &x_error {
        Some(e) => code.syndrome(PauliType::Z, e),
        None => indicator(&input.z_syndrome, code.z_stabilizers.len())?,
    };
    let corr = dec.decode(&sx, &sz)?;
    let residual = |e: &[bool], c: &[bool]| -> Vec<bool> { e.iter().zip(c).map(|(a, b)| a ^ b).collect() };
    let out = DecodeOutput {
        l: input.l,
        z_correction: indices(&corr.z),
        x_correction: indices(&corr.x),
        x_logical_failure: x_error.as_ref().map(|e| code.is_logical(PauliType::X, &residual(e, &corr.x))),
        z_logical_failure: z_error.as_ref().map(|e| code.is_logical(PauliType::Z, &residual(e, &corr.z))),
    };
    write_json(io::stdout().lock(), &serde_json::to_value(out)?)?;
    Ok(0)
}

fn run_simulate(args: &SimulateArgs) -> Result<u8, Failure> {
    let cfg = McConfig {
        ls: args.ls.clone(),
        ps: args.p.clone(),
        shots: args.shots,
        seed: args.seed,
        convention: match args.convention {
            ConventionArg::Total => Convention::Total,
            ConventionArg::PerPauli => Convention::PerPauli,
        },
        w1: args.w1,
        w2: args.w2,
    };
    for &p in &cfg.ps {
        cfg.convention.total(p).map_err(|e| usage(e.to_string()))?;
    }
    if let Some(&l) = cfg.ls.iter().find(|&&l| l < 3 || l % 2 == 0) {
        return Err(usage(format!("distance {l} must be odd and at least 3")));
    }
    let mut log = log_output(args.log.as_deref())?;
    json_line(&mut log, &json!({ "config": cfg, "threads": args.threads }))?;
    let points = noise::run_monte_carlo(&cfg, args.threads, |pt| {
        let _ = json_line(&mut log, &json!({ "point": pt }));
    })?;
    log.flush()?;
    let mut out = output(args.out.as_deref())?;
    noise::write_csv(&mut out, &points)?;
    out.flush()?;
    Ok(0)
}

fn run_fit(args: &FitArgs) -> Result<u8, Failure> {
    let f = File::open(&args.input).map_err(|e| usage(format!("cannot read {}: {e}", args.input.display())))?;
    let points = noise::read_csv(f).map_err(|e| usage(e.to_string()))?;
    let report = fit::report(&points, args.resamples, args.seed);
    let ok = report.errors.is_empty();
    let v = json!({ "input": args.input, "resamples": args.resamples, "seed": args.seed, "report": report });
    write_json(output(args.out.as_deref())?, &v)?;
    Ok(if ok { 0 } else { NEGATIVE })
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|q| q + 1).collect()
}

fn code_json(code: &StabilizerCode) -> Value {
    let stabs = |t: PauliType| -> Vec<Value> {
        code.stabilizers(t)
            .iter()
            .map(|s| json!({ "support": one_based(&s.support), "color": s.color.letter().to_string(), "label": format!("{:?}", s.label) }))
            .collect()
    };
    json!({
        "kind": format!("{:?}", code.kind),
        "L": code.distance,
        "n": code.n(),
        "coords": code.coords,
        "logical_x": one_based(&code.logical_x),
        "logical_z": one_based(&code.logical_z),
        "x_stabilizers": stabs(PauliType::X),
        "z_stabilizers": stabs(PauliType::Z),
    })
}

fn run_codes(args: &CodesArgs) -> Result<u8, Failure> {
    let code = match args.kind {
        CodeKindArg::Merged => build_merged_code(args.l).map(|m| m.code),
        CodeKindArg::Surface => build_surface_code(args.l),
        CodeKindArg::Color => build_color_code(args.l),
    }
    .map_err(|e| usage(e.to_string()))?;
    match args.format {
        FormatArg::Json => write_json(io::stdout().lock(), &code_json(&code))?,
        FormatArg::Dot => {
            let t = match args.graph {
                GraphArg::X => PauliType::X,
                GraphArg::Z => PauliType::Z,
            };
            let mut out = io::stdout().lock();
            out.write_all(SyndromeGraph::build(&code, t, 1.0, 1.0).to_dot().as_bytes())?;
        }
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Synth(a) => run_synth(a),
        Command::Verify(a) => run_verify(a),
        Command::Decode(a) => run_decode(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Fit(a) => run_fit(a),
        Command::Codes(a) => run_codes(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

