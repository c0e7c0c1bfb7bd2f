//! `unkloc` command-line front end.
//!
//! Exit codes: 0 success, 2 usage or config error, 3 detection cap reached,
//! 4 internal fault.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use unkloc::bandwidth::{detect_bandwidth, BandwidthConfig, DetectionStatus};
use unkloc::estimator::{coefficient_report, estimate_field};
use unkloc::experiments::{self, ExperimentConfig, Mode, RunOptions};
use unkloc::noise::NoiseSpec;
use unkloc::rng::{derive_seed, TrialStreams};
use unkloc::sampling::{acquire, generate_trace, RenewalSpec, SampleTrace};
use unkloc::{BandlimitedField, Error};

const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_FAULT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "unkloc",
    version,
    about = "Field estimation from samples at unknown locations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a field file (JSON).
    FieldGen(FieldGenArgs),
    /// Sample a field once and report the coefficient estimates.
    Estimate(EstimateArgs),
    /// Run bandwidth detection on one sampled trace.
    Detect(DetectArgs),
    /// Run a Monte Carlo sweep and write rows.csv, summary.csv, slope.json.
    Sweep(SweepArgs),
    /// Recompute the rows of a single (n, trial) cell of a sweep.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Benchmark {
    #[value(name = "paper1")]
    B3,
    #[value(name = "paper2")]
    Sparse,
}

#[derive(Args)]
struct FieldGenArgs {
    /// Built-in coefficient set.
    #[arg(value_enum, conflicts_with_all = ["b", "seed"])]
    source: Option<Benchmark>,
    /// Bandwidth of a random field.
    #[arg(long, requires = "seed")]
    b: Option<usize>,
    /// Seed of a random field.
    #[arg(long, requires = "b")]
    seed: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    /// Field file, or `paper1` / `paper2`.
    #[arg(long)]
    field: String,
    /// Sampling rate.
    #[arg(long)]
    n: u64,
    /// Spacing law: uniform, triangular, beta:ALPHA[:BETA], degenerate.
    #[arg(long, default_value = "uniform")]
    renewal: String,
    /// Spacing bound lambda (largest normalized spacing).
    #[arg(long)]
    lambda: Option<f64>,
    /// Noise: zero, uniform:A, gaussian:SIGMA[:CUT], rademacher:S.
    #[arg(long, default_value = "uniform:1")]
    noise: String,
    /// Master seed; the trace uses the stream of trial 0 at this `n`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the sampled trace as CSV (i,S_i,y_i).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    trace: TraceArgs,
    /// Estimation bandwidth; defaults to the field's.
    #[arg(long)]
    b: Option<usize>,
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    trace: TraceArgs,
    /// Minimum magnitude of a nonzero coefficient.
    #[arg(long)]
    delta: f64,
    /// Largest bandwidth examined.
    #[arg(long, default_value_t = unkloc::bandwidth::DEFAULT_B_MAX)]
    b_max: usize,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// distortion_sweep, bandwidth_curve, grid_deviation, energy_mse or riemann_error.
    #[arg(long)]
    mode: Option<String>,
    /// paper1, paper2, random:B:SEED or a field file.
    #[arg(long)]
    field: Option<String>,
    /// Comma-separated sampling rates.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u64>>,
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    b_max: Option<usize>,
    #[arg(long)]
    shrink_exponent: Option<f64>,
    #[arg(long)]
    stop_band: Option<f64>,
    #[arg(long)]
    estimate_b: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    renewal: Option<String>,
    #[arg(long)]
    noise: Option<String>,
    /// Any config key, e.g. `--set bandwidth.delta=0.05`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory.
    #[arg(long, default_value = "unkloc-out")]
    out: PathBuf,
}

#[derive(Args)]
struct ReplayArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Sampling rate of the cell to replay.
    #[arg(long = "at-n")]
    at_n: u64,
    #[arg(long)]
    trial: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_user_error() {
            EXIT_USAGE
        } else {
            EXIT_FAULT
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T = u8> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::FieldGen(a) => field_gen(a),
        Command::Estimate(a) => estimate(a),
        Command::Detect(a) => detect(a),
        Command::Sweep(a) => sweep(a),
        Command::Replay(a) => replay(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn field_gen(args: FieldGenArgs) -> CliResult {
    let field = match (args.source, args.b, args.seed) {
        (Some(Benchmark::B3), ..) => BandlimitedField::benchmark_b3(),
        (Some(Benchmark::Sparse), ..) => BandlimitedField::benchmark_sparse(),
        (None, Some(b), Some(seed)) => BandlimitedField::random(b, seed),
        _ => return Err(Failure::usage("give paper1, paper2, or --b and --seed")),
    };
    let mut text = field.to_json()?;
    text.push('\n');
    emit(args.out.as_deref(), &text)?;
    Ok(0)
}

fn load_field(selector: &str) -> CliResult<BandlimitedField> {
    match selector {
        "paper1" => Ok(BandlimitedField::benchmark_b3()),
        "paper2" => Ok(BandlimitedField::benchmark_sparse()),
        path => BandlimitedField::load(path)
            .map_err(|e| Failure::usage(format!("cannot load field {path}: {e}"))),
    }
}

/// Samples the field with the same streams a sweep uses for `(seed, n, 0)`.
fn sample(args: &TraceArgs) -> CliResult<(BandlimitedField, NoiseSpec, SampleTrace, u64)> {
    let field = load_field(&args.field)?;
    let noise = NoiseSpec::parse(&args.noise)?;
    let spec = RenewalSpec::parse(args.n, &args.renewal, args.lambda)?;
    let seed = derive_seed(args.seed, args.n, 0);
    let mut streams = TrialStreams::new(seed);
    let trace = generate_trace(&spec, &mut streams.spacing)?;
    let trace = acquire(trace, &field, &noise, &mut streams.noise)?;
    if let Some(path) = &args.trace {
        let file = fs::File::create(path)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
        trace.write_csv(file)?;
    }
    Ok((field, noise, trace, seed))
}

fn to_json(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json value serializes");
    text.push('\n');
    text
}

fn estimate(args: EstimateArgs) -> CliResult {
    let (field, _, trace, seed) = sample(&args.trace)?;
    let b = args.b.unwrap_or(field.b());
    let report = coefficient_report(trace.readings(), b)?;
    let distortion = field.distortion(&estimate_field(trace.readings(), b)?);
    let out = serde_json::json!({
        "n": args.trace.n,
        "seed": seed,
        "m": trace.m(),
        "b": b,
        "coefficients": report,
        "distortion": distortion,
    });
    emit(args.trace.out.as_deref(), &to_json(&out))?;
    Ok(0)
}

fn detect(args: DetectArgs) -> CliResult {
    // Reject a non-positive threshold before sampling.
    let noise = NoiseSpec::parse(&args.trace.noise)?;
    let config =
        BandwidthConfig::new(args.delta, noise.variance(), args.trace.n)?.with_b_max(args.b_max);
    let (_, _, trace, seed) = sample(&args.trace)?;
    let outcome = detect_bandwidth(trace.readings(), &config)?;
    let mut out = serde_json::to_value(&outcome).map_err(Error::from)?;
    out["n"] = args.trace.n.into();
    out["seed"] = seed.into();
    out["m"] = trace.m().into();
    out["threshold"] = config.threshold().into();
    emit(args.trace.out.as_deref(), &to_json(&out))?;
    Ok(match outcome.status {
        DetectionStatus::Stopped => 0,
        DetectionStatus::CapReached => {
            eprintln!(
                "detection reached b_max = {} without meeting the stopping rule",
                args.b_max
            );
            EXIT_CAP
        }
    })
}

fn parse_params(text: &str, what: &str) -> CliResult<(String, Vec<f64>)> {
    let mut parts = text.split(':');
    let family = parts.next().unwrap_or_default().to_string();
    let params = parts
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Failure::usage(format!("bad {what} parameter {p:?} in {text:?}")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok((family, params))
}

fn float_array(values: &[f64]) -> toml::Value {
    toml::Value::Array(values.iter().map(|&v| toml::Value::Float(v)).collect())
}

fn integer(v: u64) -> CliResult<toml::Value> {
    i64::try_from(v)
        .map(toml::Value::Integer)
        .map_err(|_| Failure::usage(format!("{v} is too large")))
}

fn field_source(selector: &str) -> CliResult<toml::Value> {
    let mut table = toml::Table::new();
    match selector.split(':').collect::<Vec<_>>().as_slice() {
        ["paper1"] | ["paper2"] => {
            table.insert("source".into(), selector.into());
        }
        ["random", b, seed] => {
            let parse = |s: &str| {
                s.parse::<u64>()
                    .map_err(|_| Failure::usage(format!("bad random field selector {selector:?}")))
            };
            table.insert("source".into(), "random".into());
            table.insert("b".into(), integer(parse(b)?)?);
            table.insert("seed".into(), integer(parse(seed)?)?);
        }
        _ => {
            table.insert("source".into(), "file".into());
            table.insert("path".into(), selector.into());
        }
    }
    Ok(toml::Value::Table(table))
}

fn load_config(args: &ConfigArgs) -> CliResult<ExperimentConfig> {
    let text = match &args.config {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?,
        None => String::new(),
    };
    let mut values: Vec<(String, toml::Value)> = Vec::new();
    let mut put = |key: &str, value: toml::Value| values.push((key.to_string(), value));
    if let Some(mode) = &args.mode {
        put("mode", mode.as_str().into());
    }
    if let Some(field) = &args.field {
        put("field", field_source(field)?);
    }
    if let Some(n) = &args.n {
        let grid = n
            .iter()
            .map(|&v| integer(v))
            .collect::<CliResult<Vec<_>>>()?;
        put("n_grid", toml::Value::Array(grid));
    }
    if let Some(trials) = args.trials {
        put("trials", integer(trials)?);
    }
    if let Some(seed) = args.seed {
        put("master_seed", integer(seed)?);
    }
    if let Some(b) = args.estimate_b {
        put("estimate_b", integer(b as u64)?);
    }
    if let Some(delta) = args.delta {
        put("bandwidth.delta", delta.into());
    }
    if let Some(b_max) = args.b_max {
        put("bandwidth.b_max", integer(b_max as u64)?);
    }
    if let Some(e) = args.shrink_exponent {
        put("bandwidth.shrink_exponent", e.into());
    }
    if let Some(band) = args.stop_band {
        put("bandwidth.stop_band", band.into());
    }
    if let Some(renewal) = &args.renewal {
        let (family, params) = parse_params(renewal, "renewal")?;
        put("renewal.family", family.into());
        put("renewal.params", float_array(&params));
    }
    if let Some(lambda) = args.lambda {
        put("renewal.lambda", lambda.into());
    }
    if let Some(noise) = &args.noise {
        let (family, params) = parse_params(noise, "noise")?;
        put("noise.family", family.into());
        put("noise.params", float_array(&params));
    }
    for item in &args.set {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("--set expects KEY=VALUE, got {item:?}")))?;
        values.push((
            key.trim().to_string(),
            experiments::parse_override(value.trim()),
        ));
    }
    let config = ExperimentConfig::from_toml_with_values(&text, &values).map_err(|e| {
        let origin = args
            .config
            .as_ref()
            .map_or("config".to_string(), |p| p.display().to_string());
        Failure::usage(format!("{origin}: {e}"))
    })?;
    config.validate()?;
    Ok(config)
}

fn run_options() -> CliResult<RunOptions> {
    match std::env::var("UNKLOC_THREADS") {
        Ok(v) => {
            let threads = v
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&t| t > 0)
                .ok_or_else(|| {
                    Failure::usage(format!(
                        "UNKLOC_THREADS must be a positive integer, got {v:?}"
                    ))
                })?;
            Ok(RunOptions {
                threads: Some(threads),
            })
        }
        Err(_) => Ok(RunOptions::default()),
    }
}

fn sweep(args: SweepArgs) -> CliResult {
    let config = load_config(&args.config)?;
    let result = experiments::run_with(&config, run_options()?)?;
    result.save(&args.out).map_err(|e| {
        Failure::usage(format!(
            "cannot write results to {}: {e}",
            args.out.display()
        ))
    })?;
    fs::write(args.out.join("config.toml"), config.to_toml())
        .map_err(|e| Failure::usage(format!("cannot write config copy: {e}")))?;

    println!(
        "{}: {} rows over n = {:?}, {} trials each, {} faulted rows",
        config.mode.name(),
        result.rows.len(),
        config.n_grid,
        config.trials(),
        result.faults()
    );
    for s in &result.summary {
        println!(
            "  n = {:>8}  {:<20} mean {:.6e}  stderr {:.2e}",
            s.n, s.metric, s.mean, s.stderr
        );
    }
    if config.mode != Mode::BandwidthCurve {
        println!("slope: {}", result.slope_json());
    }
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn replay(args: ReplayArgs) -> CliResult {
    let config = load_config(&args.config)?;
    let rows = experiments::replay(&config, args.at_n, args.trial)?;
    let mut text = String::from("mode,n,trial,seed,metric,value\n");
    for r in rows {
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.mode.name(),
            r.n,
            r.trial,
            r.seed,
            r.metric,
            r.value
        ));
    }
    emit(args.out.as_deref(), &text)?;
    Ok(0)
}
