//! `wickrot`: verification, trace, index and Clifford runs from the command
//! line or a JSON config.

mod config;
mod output;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wickrot::analysis::{default_s_grid, s_grid};
use wickrot::verifier::{Tolerances, REPORT_VERSION};
use wickrot::Exec;

use config::{
    check_levels, default_signatures, default_threads, load_models, named, parse_s_grid, parse_signature,
    parse_tolerance, RunConfig, Settings, Task, CLIFFORD_SAMPLES, DEFAULT_T_LIST, DEFAULT_WINDINGS,
    INDEX_S_GRID,
};

/// A bad flag, config or input file: exit code 1.
#[derive(Debug)]
pub struct UsageError(pub String);

#[derive(Parser, Debug)]
#[command(name = "wickrot", version, about = "Wick-rotation diagnostics for truncated Dirac-type operators")]
struct Cli {
    /// JSON run configuration; command-line flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// worker threads (else WICKROT_THREADS, else available parallelism)
    #[arg(long, global = true, value_name = "INT")]
    threads: Option<usize>,
    /// directory for report.json and zeta.csv; stdout when absent
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// tolerance override, repeatable
    #[arg(long = "tol", global = true, value_name = "KEY=VAL")]
    tol: Vec<String>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Axiom and lemma checks across truncation levels
    Verify(TaskArgs),
    /// Zeta tables and spectral-dimension estimates
    Zeta(TaskArgs),
    /// Heat traces
    Heat(TaskArgs),
    /// Index pairings with their oracles
    Index(TaskArgs),
    /// Clifford identity suite
    Clifford(TaskArgs),
    /// Everything above
    All(TaskArgs),
}

#[derive(clap::Args, Debug, Default)]
struct TaskArgs {
    /// model descriptor or directory of descriptors, repeatable
    #[arg(long, value_name = "PATH")]
    model: Vec<PathBuf>,
    /// truncation levels, strictly increasing
    #[arg(long, value_delimiter = ',', value_name = "CSV")]
    levels: Option<Vec<usize>>,
    /// zeta grid, default 0.1:4.0:0.05
    #[arg(long = "s-grid", value_name = "START:STOP:STEP")]
    s_grid: Option<String>,
    /// heat times, default 0.1,0.5,1,2
    #[arg(long = "t", value_delimiter = ',', value_name = "CSV")]
    t: Option<Vec<f64>>,
    /// winding numbers, default -2..2
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "INT")]
    winding: Option<Vec<i64>>,
    /// `t,s`, repeatable
    #[arg(long, value_name = "T,S")]
    signature: Vec<String>,
}

impl Command {
    fn split(self) -> (Task, TaskArgs) {
        match self {
            Command::Verify(a) => (Task::Verify, a),
            Command::Zeta(a) => (Task::Zeta, a),
            Command::Heat(a) => (Task::Heat, a),
            Command::Index(a) => (Task::Index, a),
            Command::Clifford(a) => (Task::Clifford, a),
            Command::All(a) => (Task::All, a),
        }
    }
}

struct Plan {
    settings: Settings,
    models: Vec<config::NamedModel>,
    out: Option<PathBuf>,
    threads: usize,
}

fn resolve(cli: Cli) -> Result<Plan, UsageError> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let (task, args) = match cli.command {
        Some(c) => c.split(),
        None => match cfg.task {
            Some(t) => (t, TaskArgs::default()),
            None => return Err(UsageError("no task: give a subcommand or \"task\" in --config".into())),
        },
    };

    let mut models = Vec::new();
    if args.model.is_empty() {
        if let Some(d) = cfg.model.clone() {
            models.push(named(d, "model").map_err(|e| UsageError(format!("invalid inline model: {}", e.0)))?);
        }
        models = load_models(&cfg.models, models)?;
    } else {
        models = load_models(&args.model, models)?;
    }
    if task != Task::Clifford && models.is_empty() {
        return Err(UsageError(format!("{} needs at least one --model", task.as_str())));
    }

    let levels = args.levels.or(cfg.levels);
    if let Some(l) = &levels {
        check_levels(l)?;
    }
    let grid = match args.s_grid.or(cfg.s_grid) {
        Some(t) => parse_s_grid(&t)?,
        None => default_s_grid(),
    };
    let t_list = args.t.or(cfg.t_list).unwrap_or_else(|| DEFAULT_T_LIST.to_vec());
    if t_list.is_empty() || t_list.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(UsageError("--t values must be positive".into()));
    }
    let windings = args.winding.or(cfg.winding).unwrap_or_else(|| DEFAULT_WINDINGS.to_vec());
    let sig_text = if args.signature.is_empty() {
        cfg.signatures.unwrap_or_default()
    } else {
        args.signature
    };
    let signatures = if sig_text.is_empty() {
        default_signatures()
    } else {
        sig_text.iter().map(|s| parse_signature(s)).collect::<Result<_, _>>()?
    };

    let mut tolerances = Tolerances::default();
    for (k, v) in &cfg.tolerances {
        tolerances.set(k, *v).map_err(|e| UsageError(e.to_string()))?;
    }
    for t in &cli.tol {
        let (k, v) = parse_tolerance(t)?;
        tolerances.set(&k, v).map_err(|e| UsageError(e.to_string()))?;
    }
    let (a, b, c) = INDEX_S_GRID;
    let index_s_grid = s_grid(a, b, c).expect("fixed grid is valid");

    let threads = cli.threads.or(cfg.threads).unwrap_or_else(default_threads);
    if threads == 0 {
        return Err(UsageError("--threads must be at least 1".into()));
    }
    Ok(Plan {
        settings: Settings {
            task,
            levels,
            s_grid: grid,
            index_s_grid,
            t_list,
            windings,
            signatures,
            clifford_samples: CLIFFORD_SAMPLES,
            tolerances,
        },
        models,
        out: cli.out.or(cfg.out),
        threads,
    })
}

#[cfg(feature = "parallel")]
fn executor(threads: usize) -> Exec {
    // a second initialization (tests in one process) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Exec::Parallel
}

#[cfg(not(feature = "parallel"))]
fn executor(_threads: usize) -> Exec {
    Exec::Sequential
}

fn run(plan: Plan) -> Result<bool, String> {
    let exec = executor(plan.threads);
    let settings = &plan.settings;
    let mut runner = tasks::Runner::new(settings, exec);
    let mut failures = Vec::new();
    let mut models = Vec::new();
    if settings.task != Task::Clifford {
        for m in &plan.models {
            let r = runner.run_model(m);
            failures.extend(r.failures.iter().map(|f| format!("{}: {f}", r.name)));
            models.push(r);
        }
    }
    let clifford = if matches!(settings.task, Task::Clifford | Task::All) {
        let (suites, fails) = tasks::run_clifford(settings, exec);
        failures.extend(fails);
        Some(suites)
    } else {
        None
    };
    let pass = failures.is_empty();
    let report = output::Report {
        schema: output::SCHEMA,
        version: REPORT_VERSION,
        generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        task: settings.task.as_str(),
        config: settings,
        models,
        clifford,
        summary: output::Summary {
            pass,
            failures: failures.clone(),
        },
    };
    let json = output::report_json(&report);
    match &plan.out {
        Some(dir) => output::write_outputs(dir, &json, &mut runner.zeta_rows)?,
        None => print!("{json}"),
    }
    for f in &failures {
        eprintln!("FAIL {f}");
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let plan = match resolve(cli) {
        Ok(p) => p,
        Err(UsageError(msg)) => {
            eprintln!("wickrot: {msg}");
            return ExitCode::from(1);
        }
    };
    match run(plan) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("wickrot: {msg}");
            ExitCode::from(1)
        }
    }
}
