//! Command-line front end: `relaypower sweep|single|validate`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::experiments::config::{canonical_json, parse_override, ConfigError, ScenarioConfig};
use crate::experiments::sweep::{base_layout, run_sweep, trial_problem, SweepOutput};
use crate::relay::posterior_mse;
use crate::sca;
use crate::strategy::StrategyRegistry;
use crate::validation::{Scale, Suite};

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "relaypower", version, about = "MMSE fusion over a two-hop relay network with optimized power allocation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo sweep over the sensor budget grid; writes CSV and a manifest.
    Sweep(SweepArgs),
    /// One channel realization at one budget, with the optimizer trace.
    Single(SingleArgs),
    /// Oracle-backed self checks.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// JSON config; defaults apply to every missing key.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated method names.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Override any config key, e.g. `--set snr=1e9 --set optimizer.epsilon=1e-6`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Results CSV; the manifest goes next to it as `<stem>.manifest.json`.
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Print the curve as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SingleArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Sensor budget; defaults to the first grid value.
    #[arg(long = "p-t")]
    p_t: Option<f64>,
    /// Which realization of the sweep to reproduce.
    #[arg(long, default_value_t = 0)]
    trial: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, conflicts_with = "full")]
    quick: bool,
    #[arg(long)]
    full: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

/// Parses `args` (program name first) and runs; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Single(a) => cmd_single(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            EXIT_CONFIG
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            EXIT_RUNTIME
        }
    }
}

fn resolve_config(a: &ConfigArgs) -> Result<ScenarioConfig, Failure> {
    let mut overrides = a.set.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>, _>>()?;
    if let Some(seed) = a.seed {
        overrides.push(("seed".into(), json!(seed)));
    }
    if let Some(trials) = a.trials {
        overrides.push(("trials".into(), json!(trials)));
    }
    if let Some(m) = &a.methods {
        overrides.push(("methods".into(), json!(m)));
    }
    let cfg = match &a.config {
        Some(path) => ScenarioConfig::load(path, &overrides)?,
        None => ScenarioConfig::from_value(Value::Null, &overrides)?,
    };
    // unknown method names are a config problem, not a runtime one
    StrategyRegistry::builtin()
        .select(&cfg.methods)
        .map_err(|e| ConfigError::field("methods", e.to_string()))?;
    Ok(cfg)
}

pub fn config_hash(cfg: &ScenarioConfig) -> String {
    let value = serde_json::to_value(cfg).expect("config serializes");
    hex::encode(Sha256::digest(canonical_json(&value).as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub seed: u64,
    pub code_version: String,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub workers: usize,
    pub csv_path: String,
    pub manifest_path: String,
    pub excluded_trials: Vec<crate::experiments::sweep::ExcludedTrial>,
    /// Fully resolved config; rerunning it reproduces the CSV exactly.
    pub config: ScenarioConfig,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

pub fn manifest_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "results".into());
    csv.with_file_name(format!("{stem}.manifest.json"))
}

/// Writes one row per (budget, method) with locale-independent numbers.
pub fn write_curve_csv<W: std::io::Write>(sink: W, out: &SweepOutput) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["p_t", "method", "mean_mse", "std_err", "trials", "converged_fraction"])?;
    for p in &out.curve.points {
        w.write_record([
            p.p_t.to_string(),
            p.method.clone(),
            p.mean_mse.to_string(),
            p.std_err.to_string(),
            p.trials.to_string(),
            p.converged_fraction.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<i32, Failure> {
    let cfg = resolve_config(&a.config)?;
    let workers = a
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let methods = StrategyRegistry::builtin().select(&cfg.methods)?;
    let started = now_ms();
    let out = run_sweep(&cfg, &methods, workers)?;
    let finished = now_ms();

    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let file = fs::File::create(&a.out).map_err(|e| io_err(&a.out, e))?;
    write_curve_csv(file, &out).map_err(|e| io_err(&a.out, e))?;
    let mpath = manifest_path(&a.out);
    let manifest = RunManifest {
        config_hash: config_hash(&cfg),
        seed: cfg.seed,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix_ms: started,
        finished_unix_ms: finished,
        workers,
        csv_path: a.out.display().to_string(),
        manifest_path: mpath.display().to_string(),
        excluded_trials: out.curve.excluded.clone(),
        config: cfg.clone(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&mpath, text + "\n").map_err(|e| io_err(&mpath, e))?;

    if a.json {
        println!("{}", serde_json::to_string_pretty(&out.curve).expect("curve serializes"));
    } else {
        println!("{:>8}  {:<16} {:>14} {:>11} {:>7} {:>6}", "P_T", "method", "mean MSE", "std err", "trials", "conv");
        for p in &out.curve.points {
            println!(
                "{:>8}  {:<16} {:>14.6e} {:>11.3e} {:>7} {:>6.3}",
                p.p_t, p.method, p.mean_mse, p.std_err, p.trials, p.converged_fraction
            );
        }
        if !out.curve.excluded.is_empty() {
            eprintln!("{} trial(s) excluded; see {}", out.curve.excluded.len(), mpath.display());
        }
        println!("wrote {} and {}", a.out.display(), mpath.display());
    }
    Ok(0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct IterationRecord {
    iteration: usize,
    objective: f64,
    mse: f64,
    lambda_t: Option<f64>,
    lambda_r: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MethodRecord {
    method: String,
    mse: f64,
    iterations: usize,
    converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SingleRecord {
    trial: usize,
    p_t: f64,
    p_r: f64,
    channel_powers: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    phi: Vec<f64>,
    trace: Vec<IterationRecord>,
    stop_reason: String,
    converged: bool,
    final_mse: f64,
    methods: Vec<MethodRecord>,
}

fn cmd_single(a: SingleArgs) -> Result<i32, Failure> {
    let cfg = resolve_config(&a.config)?;
    let p_t = a.p_t.unwrap_or(cfg.p_t_grid[0]);
    let budgets = cfg.budgets(p_t).map_err(|e| Failure::Config(format!("--p-t: {e}")))?;
    let base = base_layout(&cfg);
    let (_, problem) = trial_problem(&cfg, base.as_ref(), a.trial).map_err(|e| Failure::Runtime(format!("trial {}: {e}", a.trial)))?;
    let out = sca::optimize(&problem.objective, &problem.relay, &budgets, &cfg.optimizer)?;
    let residual = problem.objective.residual_trace();
    let trace = out
        .trace
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| IterationRecord {
            iteration: s.iteration,
            objective: s.objective,
            mse: residual + s.objective,
            lambda_t: i.checked_sub(1).map(|k| out.trace.duals[k].0),
            lambda_r: i.checked_sub(1).map(|k| out.trace.duals[k].1),
        })
        .collect();
    let methods = StrategyRegistry::builtin()
        .select(&cfg.methods)?
        .iter()
        .map(|m| {
            m.allocate(&problem, &budgets, &cfg.optimizer).map(|r| MethodRecord {
                method: m.name().to_string(),
                mse: r.mse,
                iterations: r.iterations,
                converged: r.converged,
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let (final_mse, _) = posterior_mse(&problem.moments, &problem.relay, &out.alloc)?;
    let record = SingleRecord {
        trial: a.trial,
        p_t,
        p_r: cfg.p_r,
        channel_powers: problem.channel_powers().to_vec(),
        phi: problem.relay.phis(&out.alloc),
        alpha: out.alloc.alpha.clone(),
        beta: out.alloc.beta.clone(),
        trace,
        stop_reason: out.trace.stop_reason.to_string(),
        converged: out.trace.converged,
        final_mse,
        methods,
    };

    if a.json {
        println!("{}", serde_json::to_string_pretty(&record).expect("record serializes"));
        return Ok(0);
    }
    println!("trial {}  P_T = {}  P_R = {}  channels = {}", record.trial, record.p_t, record.p_r, record.alpha.len());
    println!();
    println!("{:>4} {:>12} {:>14} {:>12} {:>12}", "j", "|y_j|^2", "alpha_j", "beta_j", "phi_j");
    for j in 0..record.alpha.len() {
        println!(
            "{:>4} {:>12.5e} {:>14.6e} {:>12.6e} {:>12.5e}",
            j + 1,
            record.channel_powers[j],
            record.alpha[j],
            record.beta[j],
            record.phi[j]
        );
    }
    println!();
    println!("{:>5} {:>16} {:>16} {:>13} {:>13}", "iter", "objective", "mse", "lambda_T", "lambda_R");
    let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "-".into());
    for r in &record.trace {
        println!(
            "{:>5} {:>16.10e} {:>16.10e} {:>13} {:>13}",
            r.iteration,
            r.objective,
            r.mse,
            fmt_opt(r.lambda_t),
            fmt_opt(r.lambda_r)
        );
    }
    println!();
    println!("stop: {}  final MSE: {:.10e}", record.stop_reason, record.final_mse);
    println!();
    for m in &record.methods {
        println!("{:<16} mse {:.6e}  iterations {:>3}  converged {}", m.method, m.mse, m.iterations, m.converged);
    }
    Ok(0)
}

fn cmd_validate(a: ValidateArgs) -> Result<i32, Failure> {
    let scale = if a.full { Scale::Full } else { Scale::Quick };
    let results = Suite::new(scale, a.seed).run();
    let ok = results.iter().all(|r| r.passed);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&results).expect("results serialize"));
    } else {
        for r in &results {
            println!("{r}");
            if let Some(f) = &r.failure {
                println!("      replay: {f}");
            }
        }
        println!("{}", if ok { "all checks passed" } else { "some checks FAILED" });
    }
    Ok(if ok { 0 } else { EXIT_RUNTIME })
}
