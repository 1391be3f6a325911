//! Command-line front end: train policies, evaluate them against the myopic
//! and random baselines, sweep discount factors, and inspect artifacts.
//!
//! Exit codes: 0 success, 2 usage error, 3 config/validation error,
//! 4 runtime error.

mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{load_config, resolve_config, Resolved, DEFAULT_GAMMA_SWEEP};
use cutstock::baselines::{MyopicPolicy, RandomPolicy};
use cutstock::harness::{self, CemGreedyPolicy, EvalReport};
use cutstock::instance::load_instance;
use cutstock::trainer::{self, TrainRun};
use output::RunDir;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Config(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

impl From<cutstock::Error> for CliError {
    fn from(e: cutstock::Error) -> Self {
        match &e {
            cutstock::Error::Instance(_)
            | cutstock::Error::Basis(_)
            | cutstock::Error::Config(_)
            | cutstock::Error::Artifact(_) => CliError::Config(e.to_string()),
            cutstock::Error::RejectionBudget { .. }
            | cutstock::Error::EmptySample
            | cutstock::Error::Solve(_)
            | cutstock::Error::Io(_) => CliError::Runtime(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cutstock",
    version,
    about = "Train and evaluate cutting policies for stochastic cutting stock",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Run configuration file (TOML). Defaults apply when omitted.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override a config value by dotted path, e.g. `train.l2=5000`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Shortcut for `--override train.seed=N`.
    #[arg(long)]
    seed: Option<u64>,
    /// Shortcut for `--override eval.replications=N`.
    #[arg(long)]
    replications: Option<u32>,
    /// Worker threads (overrides the config; 0 = machine parallelism).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Train a policy and write the run artifact.
    Train {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Run directory name under the output root (default: run-<unix time>).
        #[arg(long)]
        name: Option<String>,
        /// Also render SVG charts.
        #[arg(long)]
        svg: bool,
    },
    /// Evaluate a trained artifact or a baseline (`myopic` / `random`).
    Evaluate {
        /// Artifact path, `myopic`, or `random`.
        target: String,
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Which trained parameters to evaluate: `best`, `all`, or an index.
        #[arg(long, default_value = "best")]
        select: String,
        /// Output directory name under the output root.
        #[arg(long)]
        name: Option<String>,
        /// Record and emit the inventory trace of replication 0.
        #[arg(long)]
        traces: bool,
        /// Also render SVG charts.
        #[arg(long)]
        svg: bool,
    },
    /// Train and evaluate once per discount factor.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Comma-separated discount factors (default: the six-value sweep).
        #[arg(long, value_name = "G1,G2,...")]
        gammas: Option<String>,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        svg: bool,
    },
    /// Print an artifact's configuration and per-iteration diagnostics.
    Inspect {
        /// Artifact path.
        artifact: PathBuf,
    },
    /// Check an instance file and print its summary.
    Validate {
        /// Instance file path.
        instance: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train { cfg, name, svg } => cmd_train(cfg, name, svg),
        Command::Evaluate {
            target,
            cfg,
            select,
            name,
            traces,
            svg,
        } => cmd_evaluate(&target, cfg, &select, name, traces, svg),
        Command::Sweep {
            cfg,
            gammas,
            name,
            svg,
        } => cmd_sweep(cfg, gammas.as_deref(), name, svg),
        Command::Inspect { artifact } => cmd_inspect(&artifact),
        Command::Validate { instance } => cmd_validate(&instance),
    }
}

fn resolve(cfg: &ConfigArgs) -> Result<Resolved, CliError> {
    let mut overrides = cfg.overrides.clone();
    if let Some(seed) = cfg.seed {
        overrides.push(format!("train.seed={seed}"));
    }
    if let Some(reps) = cfg.replications {
        overrides.push(format!("eval.replications={reps}"));
    }
    let resolved = match &cfg.config {
        Some(path) => load_config(path, &overrides)?,
        None => resolve_config("", &overrides)?,
    };
    let threads = cfg.threads.unwrap_or(resolved.threads);
    if threads > 0 {
        // Ignore the error when a pool already exists (tests call run() twice).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(resolved)
}

fn cmd_train(cfg_args: ConfigArgs, name: Option<String>, svg: bool) -> Result<(), CliError> {
    let resolved = resolve(&cfg_args)?;
    let dir = RunDir::create(&resolved.output_root, name)?;
    let mut log = dir.log()?;
    log.line(&format!(
        "train: instance={} seed={} gamma={} l1={} l2={} basis={:?} K={}",
        resolved.file.instance,
        resolved.train.seed,
        resolved.train.gamma,
        resolved.train.l1,
        resolved.train.l2,
        resolved.train.basis.kind,
        resolved.train.basis.num_features()
    ))?;
    if !cfg_args.overrides.is_empty() {
        log.line(&format!("overrides: {:?}", cfg_args.overrides))?;
    }
    dir.echo_config(&resolved.source_text)?;

    match trainer::train(&resolved.instance, &resolved.train) {
        Ok(run) => {
            let artifact = dir.path().join("artifact.json");
            trainer::save_run(&run, &artifact)?;
            for (d, w) in run.diagnostics.iter().zip(&run.wall_times) {
                log.line(&format!(
                    "iteration {}: mean_sampled_cost={:.4} theta_norm={:.4} solver={:?} cond={} wall={:.2}s",
                    d.iteration,
                    d.mean_sampled_cost,
                    d.theta_norm,
                    d.solver_path,
                    d.condition.map_or("inf".into(), |c| format!("{c:.3e}")),
                    w.as_secs_f64()
                ))?;
            }
            if svg {
                let series = vec![(
                    "mean sampled cost".to_string(),
                    run.diagnostics.iter().map(|d| d.mean_sampled_cost).collect(),
                )];
                harness::render_line_chart(
                    "Mean sampled cost per policy iteration",
                    &series,
                    dir.path().join("csv").join("training.svg"),
                )?;
            }
            log.line(&format!("artifact written to {}", artifact.display()))?;
            println!("artifact: {}", artifact.display());
            Ok(())
        }
        Err(aborted) => {
            let partial = dir.path().join("artifact.partial.json");
            trainer::save_run(&aborted.partial, &partial)?;
            log.line(&format!(
                "ABORTED at iteration {}: {} (partial results in {})",
                aborted.iteration,
                aborted.reason,
                partial.display()
            ))?;
            Err(CliError::Runtime(format!(
                "trainer aborted at iteration {}: {} (partial artifact: {})",
                aborted.iteration,
                aborted.reason,
                partial.display()
            )))
        }
    }
}

fn print_summary(reports: &[&EvalReport]) {
    println!("{:<14} {:>12} {:>12} {:>12}", "policy", "mean", "ci_lo", "ci_hi");
    for r in reports {
        println!(
            "{:<14} {:>12.2} {:>12.2} {:>12.2}",
            r.policy, r.mean, r.ci_lo, r.ci_hi
        );
    }
}

fn cmd_evaluate(
    target: &str,
    cfg_args: ConfigArgs,
    select: &str,
    name: Option<String>,
    traces: bool,
    svg: bool,
) -> Result<(), CliError> {
    let resolved = resolve(&cfg_args)?;
    let mut eval_cfg = resolved.eval;
    eval_cfg.record_traces = eval_cfg.record_traces || traces;
    let inst = &resolved.instance;

    let reports: Vec<EvalReport> = match target {
        "myopic" => {
            let policy = MyopicPolicy::for_instance(inst);
            let report = harness::simulate(inst, &policy, &eval_cfg)?;
            if policy.clip_events() > 0 {
                eprintln!(
                    "note: {} period(s) required clipping the myopic program to the caps",
                    policy.clip_events()
                );
            }
            vec![report]
        }
        "random" => {
            let policy = RandomPolicy::new();
            vec![harness::simulate(inst, &policy, &eval_cfg)?]
        }
        path => {
            let run = trainer::load_run(std::path::Path::new(path))?;
            evaluate_artifact(inst, &run, &eval_cfg, select)?
        }
    };

    let dir = RunDir::create(&resolved.output_root, name)?;
    dir.echo_config(&resolved.source_text)?;
    let refs: Vec<&EvalReport> = reports.iter().collect();
    harness::write_summary_csv(&refs, dir.csv_path("summary.csv"))?;
    harness::write_costs_csv(&reports[0], dir.csv_path("costs.csv"))?;
    if let Some(report) = reports.iter().find(|r| r.traces.is_some()) {
        harness::write_inventory_csv(report, dir.csv_path("inventory.csv"))?;
    }
    if svg {
        let series: Vec<(String, Vec<f64>)> = reports
            .iter()
            .map(|r| (r.policy.clone(), r.rolling.clone()))
            .collect();
        harness::render_line_chart(
            "Rolling average cost",
            &series,
            dir.csv_path("rolling.svg"),
        )?;
    }
    print_summary(&refs);
    println!("outputs: {}", dir.path().display());
    Ok(())
}

fn evaluate_artifact(
    inst: &cutstock::ProblemInstance,
    run: &TrainRun,
    eval_cfg: &cutstock::EvalConfig,
    select: &str,
) -> Result<Vec<EvalReport>, CliError> {
    match select {
        "best" => {
            let (best, reports) = harness::reevaluate_run(inst, run, eval_cfg)?;
            eprintln!(
                "best policy: iteration {} (mean cost {:.2})",
                best, reports[best].mean
            );
            Ok(vec![reports[best].clone()])
        }
        "all" => {
            let (best, reports) = harness::reevaluate_run(inst, run, eval_cfg)?;
            eprintln!("best policy: iteration {best}");
            Ok(reports)
        }
        idx => {
            let i: usize = idx.parse().map_err(|_| {
                CliError::Usage(format!(
                    "--select must be `best`, `all`, or an index (got {idx:?})"
                ))
            })?;
            let theta = run.thetas.get(i).ok_or_else(|| {
                CliError::Usage(format!(
                    "index {i} out of range (run holds {} parameter vectors)",
                    run.thetas.len()
                ))
            })?;
            let policy = CemGreedyPolicy::new(&run.config.basis, theta, &run.config.cem)
                .named(format!("trained[{i}]"));
            Ok(vec![harness::simulate(inst, &policy, eval_cfg)?])
        }
    }
}

fn cmd_sweep(
    cfg_args: ConfigArgs,
    gammas: Option<&str>,
    name: Option<String>,
    svg: bool,
) -> Result<(), CliError> {
    let resolved = resolve(&cfg_args)?;
    let gammas: Vec<f64> = match gammas {
        None => DEFAULT_GAMMA_SWEEP.to_vec(),
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("bad gamma value {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    if gammas.is_empty() {
        return Err(CliError::Usage("gamma list is empty".into()));
    }
    let rows = harness::sweep_gamma(&resolved.instance, &gammas, &resolved.train, &resolved.eval)?;
    let dir = RunDir::create(&resolved.output_root, name)?;
    dir.echo_config(&resolved.source_text)?;
    harness::write_gamma_sweep_csv(&rows, dir.csv_path("gamma_sweep.csv"))?;
    println!("{:<8} {:>12} {:>12} {:>12} {:>6}", "gamma", "mean", "ci_lo", "ci_hi", "best");
    for r in &rows {
        println!(
            "{:<8} {:>12.2} {:>12.2} {:>12.2} {:>6}",
            r.gamma, r.mean, r.ci_lo, r.ci_hi, r.best_index
        );
    }
    if svg {
        let series = vec![("best mean cost".to_string(), rows.iter().map(|r| r.mean).collect())];
        harness::render_line_chart("Best mean cost per gamma", &series, dir.csv_path("sweep.svg"))?;
    }
    println!("outputs: {}", dir.path().display());
    Ok(())
}

fn cmd_inspect(artifact: &std::path::Path) -> Result<(), CliError> {
    let run = trainer::load_run_partial(artifact)?;
    println!(
        "config: gamma={} l1={} l2={} seed={} basis={:?} K={}",
        run.config.gamma,
        run.config.l1,
        run.config.l2,
        run.config.seed,
        run.config.basis.kind,
        run.config.basis.num_features()
    );
    if run.thetas.len() != run.config.l1 as usize {
        println!(
            "NOTE: partial run ({} of {} iterations present)",
            run.thetas.len(),
            run.config.l1
        );
    }
    println!(
        "{:<10} {:>14} {:>12} {:>16} {:>12}",
        "iteration", "mean_cost", "theta_norm", "solver", "condition"
    );
    for (d, theta) in run.diagnostics.iter().zip(&run.thetas) {
        println!(
            "{:<10} {:>14.4} {:>12.4} {:>16} {:>12}",
            d.iteration,
            d.mean_sampled_cost,
            theta.norm(),
            format!("{:?}", d.solver_path),
            d.condition.map_or("inf".into(), |c| format!("{c:.3e}"))
        );
    }
    Ok(())
}

fn cmd_validate(path: &std::path::Path) -> Result<(), CliError> {
    let inst = load_instance(path).map_err(|e| CliError::Config(e.to_string()))?;
    println!(
        "ok: {} item types, {} patterns, object length {}, s_max {}, x_max {}",
        inst.num_items(),
        inst.num_patterns(),
        inst.patterns.object_length(),
        inst.bounds.s_max,
        inst.bounds.x_max
    );
    println!("trim: {:?}", inst.patterns.trim());
    Ok(())
}
