use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mcmr::compiler::{compile, MCMRProgram, Method};
use mcmr::composite::{evaluate, optimize_with, BandKind, CompositePulse, OptimizeOptions, RobustnessSpec};
use mcmr::config::{RunConfig, SweepInput};
use mcmr::dressing::Branch;
use mcmr::experiments::{run_scan, Scenario};
use mcmr::ion::LevelScheme;

macro_rules! out {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

const EXIT_CONFIG: u8 = 2;
const EXIT_SIMULATION: u8 = 3;
const EXIT_THRESHOLD: u8 = 4;
const EXIT_OUTPUT: u8 = 1;

#[derive(Parser)]
#[command(name = "mcmr", version, about = "Mid-circuit measurement and reset simulator for trapped-ion qubits")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment sweep and write CSV and JSON results.
    Scan(ScanArgs),
    /// Search for a robust three-pulse dressing sequence.
    Optimize(OptimizeArgs),
    /// Report the band errors of a composite sequence.
    Evaluate(EvaluateArgs),
    /// Compile a measure/reset program into a pulse schedule.
    Compile(CompileArgs),
}

#[derive(Args)]
struct ScanArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// dstate_spectrum, measure_fidelity, ramsey_phase, pump_convergence or dress_rotate_error.
    #[arg(long, value_parser = parse_scenario)]
    scenario: Option<Scenario>,
    /// Sweep expression: `a..b`, `a..b:n` or a comma list (`pi` suffix allowed).
    #[arg(long, allow_hyphen_values = true)]
    sweep: Option<String>,
    /// Cycle counts for pump_convergence (same syntax as --sweep).
    #[arg(long, conflicts_with = "sweep")]
    cycles: Option<String>,
    /// Composite sequence JSON.
    #[arg(long)]
    sequence: Option<PathBuf>,
    /// Level scheme JSON.
    #[arg(long)]
    scheme: Option<PathBuf>,
    /// Noise model JSON.
    #[arg(long)]
    noise: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output file label.
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Shots per point; 0 reports exact probabilities.
    #[arg(long)]
    shots: Option<u64>,
    /// Disable decoherence.
    #[arg(long)]
    noiseless: bool,
    /// Auxiliary starting level for ramsey_phase.
    #[arg(long)]
    aux_level: Option<String>,
    /// Shelving variant: shelving_qubit_rotation or shelving_dressing.
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    /// Drop the detection echo.
    #[arg(long)]
    no_echo: bool,
    /// Dressed branch probed by dstate_spectrum: plus or minus.
    #[arg(long, value_parser = parse_branch)]
    branch: Option<Branch>,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Dressing detuning as a multiple of the dressing Rabi frequency.
    #[arg(long, allow_hyphen_values = true)]
    delta_ratio: f64,
    /// Random restarts.
    #[arg(long, default_value_t = 200)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop once the combined band error is at or below this.
    #[arg(long)]
    threshold: Option<f64>,
    /// Robustness spec JSON.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Sequence output; the error report goes next to it.
    #[arg(long, default_value = "optimized.json")]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Composite sequence JSON.
    sequence: PathBuf,
    /// Robustness spec JSON.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CompileArgs {
    /// Program JSON.
    program: PathBuf,
    /// Level scheme JSON.
    #[arg(long)]
    scheme: Option<PathBuf>,
    /// Schedule output (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    Scenario::parse(s).map_err(|e| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown method `{s}`"))
}

fn parse_branch(s: &str) -> Result<Branch, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown branch `{s}`"))
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8) -> impl Fn(mcmr::Error) -> Failure {
    move |e| Failure { code, message: e.to_string() }
}

fn default_threshold(ratio: f64) -> f64 {
    if ratio.abs() >= 0.3 {
        1e-5
    } else {
        2.5e-3
    }
}

fn load_spec(path: Option<&Path>) -> Result<RobustnessSpec, Failure> {
    let Some(p) = path else {
        return Ok(RobustnessSpec::default());
    };
    let text = std::fs::read_to_string(p).map_err(|e| Failure {
        code: EXIT_CONFIG,
        message: format!("cannot read {}: {e}", p.display()),
    })?;
    let spec: RobustnessSpec = serde_json::from_str(&text).map_err(|e| Failure {
        code: EXIT_CONFIG,
        message: format!("{}: {e}", p.display()),
    })?;
    spec.validate().map_err(fail(EXIT_CONFIG))?;
    Ok(spec)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure {
        code: EXIT_OUTPUT,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn scan(args: ScanArgs) -> Result<(), Failure> {
    let base = match &args.config {
        Some(p) => RunConfig::load(p).map_err(fail(EXIT_CONFIG))?,
        None => RunConfig::default(),
    };
    let mut flags = RunConfig {
        scheme: args.scheme,
        noise: args.noise,
        scenario: args.scenario,
        sweep: args.sweep.or(args.cycles).map(SweepInput::Expr),
        sequence: args.sequence,
        output_dir: args.out,
        label: args.label,
        seed: args.seed,
        shots: args.shots,
        ..Default::default()
    };
    flags.options.noiseless = args.noiseless;
    flags.options.aux_level = args.aux_level;
    flags.options.method = args.method;
    flags.options.branch = args.branch;
    if args.no_echo {
        flags.options.echo = Some(false);
    }
    let config = base.merge(flags);
    let spec = config.to_scan_spec().map_err(fail(EXIT_CONFIG))?;
    let result = run_scan(&spec).map_err(fail(EXIT_SIMULATION))?;
    let (csv, json) = result.write(&config.output_dir(), &config.label()).map_err(fail(EXIT_OUTPUT))?;
    for (k, v) in &result.summary {
        out!("{k} = {v}");
    }
    out!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

fn optimize(args: OptimizeArgs) -> Result<(), Failure> {
    if !args.delta_ratio.is_finite() {
        return Err(Failure {
            code: EXIT_CONFIG,
            message: "--delta-ratio must be finite".into(),
        });
    }
    if args.budget == 0 {
        return Err(Failure {
            code: EXIT_CONFIG,
            message: "--budget must be at least 1".into(),
        });
    }
    let spec = load_spec(args.spec.as_deref())?;
    let threshold = args.threshold.unwrap_or_else(|| default_threshold(args.delta_ratio));
    let mut opts = OptimizeOptions::new(args.budget, args.seed);
    opts.threshold = Some(threshold);
    let outcome = optimize_with(args.delta_ratio, &spec, &opts).map_err(fail(EXIT_SIMULATION))?;
    write_file(&args.out, &outcome.sequence.to_json().map_err(fail(EXIT_OUTPUT))?)?;
    let report_path = args.out.with_extension("report.json");
    let report = serde_json::to_string_pretty(&outcome).expect("outcome serializes");
    write_file(&report_path, &report)?;
    out!("e0 = {:.3e}", outcome.report.e0);
    out!("e1 = {:.3e}", outcome.report.e1);
    out!("combined = {:.3e} (threshold {threshold:.1e}, {} restarts)", outcome.report.combined, outcome.restarts_run);
    out!("wrote {} and {}", args.out.display(), report_path.display());
    if !outcome.reached {
        return Err(Failure {
            code: EXIT_THRESHOLD,
            message: format!("threshold {threshold:.1e} not reached within {} restarts", args.budget),
        });
    }
    Ok(())
}

fn evaluate_cmd(args: EvaluateArgs) -> Result<(), Failure> {
    let seq = CompositePulse::load(&args.sequence).map_err(|e| Failure {
        code: EXIT_CONFIG,
        message: format!("{}: {e}", args.sequence.display()),
    })?;
    let spec = load_spec(args.spec.as_deref())?;
    let report = evaluate(&seq, &spec, 1.0).map_err(fail(EXIT_SIMULATION))?;
    if args.json {
        out!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        return Ok(());
    }
    out!("e0 = {:.4e}", report.e0);
    out!("e1 = {:.4e}", report.e1);
    out!("combined = {:.4e}", report.combined);
    out!("{:<12} {:>10} {:>12}", "band", "fraction", "xy_error");
    for s in &report.per_sample {
        let band = match s.band {
            BandKind::Crosstalk => "crosstalk",
            BandKind::Fluctuation => "fluctuation",
        };
        out!("{band:<12} {:>10.4} {:>12.4e}", s.fraction, s.xy_error);
    }
    Ok(())
}

fn compile_cmd(args: CompileArgs) -> Result<(), Failure> {
    let program = MCMRProgram::load(&args.program).map_err(|e| Failure {
        code: EXIT_CONFIG,
        message: format!("{}: {e}", args.program.display()),
    })?;
    let scheme = match &args.scheme {
        Some(p) => LevelScheme::load(p).map_err(|e| Failure {
            code: EXIT_CONFIG,
            message: format!("{}: {e}", p.display()),
        })?,
        None => LevelScheme::yb171(),
    };
    let schedule = compile(&program, &scheme).map_err(fail(EXIT_SIMULATION))?;
    let json = schedule.to_json().map_err(fail(EXIT_OUTPUT))?;
    match &args.out {
        Some(p) => write_file(p, &json),
        None => {
            out!("{json}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: cannot start a pool of {n} threads");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let result = match cli.command {
        Command::Scan(a) => scan(a),
        Command::Optimize(a) => optimize(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Compile(a) => compile_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
