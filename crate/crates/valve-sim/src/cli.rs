//! The `valve-sim` command line.
//!
//! Subcommands:
//!
//! - `run --scenario FILE [--seed N] --out DIR` — simulate one deployment,
//!   writing `events.log` and `summary.csv`.
//! - `audit --scenario FILE [--exhaustive | --trials N] [--out FILE]` —
//!   check the four assumptions and the safety claim; human-readable report
//!   on stdout, machine-readable key=value file with `--out`.
//! - `counterexample --family FILE --violate {a|b|c|d} [--budget N] [--out DIR]`
//!   — search for a dangerous trajectory when one assumption is dropped.
//! - `dt --scenario FILE` — assist-game table: theory x variant.
//! - `sweep --family FILE --out DIR [--jobs N]` — run the family's seed
//!   sweep in parallel, one subdirectory per scenario plus a combined CSV.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 audit failure (an
//! assumption FAILs or the safety claim is VIOLATED), so scripts can gate on
//! the audit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::decision::{self, AssistAct, AssistVariant, TheoryKind};
use crate::deploy::{
    audit_assumptions, dependence_experiment, find_counterexample, run_deployment_with_seed,
    Assumption, AuditOptions, DeploymentResult, Scenario,
};
use crate::log::{write_log_file, write_summary_csv, SummaryRow};
use crate::scenario::{parse_family, parse_scenario, serialize_scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_AUDIT_FAIL: i32 = 2;

#[derive(Parser)]
#[command(
    name = "valve-sim",
    about = "Simulate and audit shutdown-seeking AIs behind a capability safety valve",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one deployment sequence and write its logs.
    Run(RunArgs),
    /// Audit the four safety-valve assumptions and the safety claim.
    Audit(AuditArgs),
    /// Search for a dangerous trajectory with one assumption dropped.
    Counterexample(CounterexampleArgs),
    /// Evaluate the assist game under CDT, EDT, and FDT.
    Dt(DtArgs),
    /// Run a family's seed sweep in parallel.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Override the scenario file's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Force exhaustive enumeration of growth choices.
    #[arg(long, conflicts_with = "trials")]
    exhaustive: bool,
    /// Sample this many growth trajectories / deployment runs instead.
    #[arg(long)]
    trials: Option<u64>,
    /// Also write a machine-readable report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long)]
    family: PathBuf,
    /// Which assumption to drop: a, b, c, or d.
    #[arg(long)]
    violate: String,
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    /// Write the found scenario and its trajectory log here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DtArgs {
    #[arg(long)]
    scenario: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
}

/// Entry point used by the binary and by tests: parse `argv`, run, write
/// human-readable output to `stdout`, return the exit code.
pub fn cli<W: Write>(argv: &[String], stdout: &mut W) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stdout, "{e}");
                    EXIT_USAGE
                }
            }
        }
    };
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(stdout, "error: {message}");
            EXIT_USAGE
        }
    }
}

/// Convenience wrapper for `main`.
pub fn run_main() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    cli(&argv, &mut lock)
}

fn dispatch<W: Write>(cli: Cli, stdout: &mut W) -> Result<i32, String> {
    match cli.command {
        Command::Run(args) => cmd_run(args, stdout),
        Command::Audit(args) => cmd_audit(args, stdout),
        Command::Counterexample(args) => cmd_counterexample(args, stdout),
        Command::Dt(args) => cmd_dt(args, stdout),
        Command::Sweep(args) => cmd_sweep(args, stdout),
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_scenario(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn summarize(scenario_id: u64, seed: u64, result: &DeploymentResult) -> SummaryRow {
    let shutdowns: Vec<usize> = result
        .deployments
        .iter()
        .filter_map(|d| d.result.shutdown_step.filter(|_| d.result.shutdown))
        .collect();
    let dangerous_events: u64 =
        result.deployments.iter().map(|d| d.result.dangerous_events.len() as u64).sum();
    SummaryRow {
        scenario_id,
        seed,
        deployments: result.deployments.len() as u64,
        shutdowns: shutdowns.len() as u64,
        dangerous_events,
        mean_shutdown_step: (!shutdowns.is_empty())
            .then(|| shutdowns.iter().sum::<usize>() as f64 / shutdowns.len() as f64),
        total_task_progress: result.deployments.iter().map(|d| d.result.task_progress).sum(),
    }
}

fn write_run_outputs(
    dir: &Path,
    scenario_id: u64,
    seed: u64,
    result: &DeploymentResult,
) -> Result<SummaryRow, String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    write_log_file(&dir.join("events.log"), &result.records)
        .map_err(|e| format!("cannot write events.log: {e}"))?;
    let row = summarize(scenario_id, seed, result);
    let file = fs::File::create(dir.join("summary.csv"))
        .map_err(|e| format!("cannot write summary.csv: {e}"))?;
    write_summary_csv(file, std::slice::from_ref(&row))
        .map_err(|e| format!("cannot write summary.csv: {e}"))?;
    Ok(row)
}

fn cmd_run<W: Write>(args: RunArgs, stdout: &mut W) -> Result<i32, String> {
    let scenario = load_scenario(&args.scenario)?;
    let seed = args.seed.unwrap_or(scenario.seed);
    let result = run_deployment_with_seed(&scenario, seed).map_err(|e| e.to_string())?;
    let row = write_run_outputs(&args.out, 0, seed, &result)?;
    let _ = writeln!(
        stdout,
        "deployments: {} (stop: {:?}), shutdowns: {}, dangerous deployments: {}, task: {}",
        row.deployments,
        result.stop,
        row.shutdowns,
        result.dangerous_deployments,
        row.total_task_progress
    );
    if let Some(dep) = &scenario.dependence {
        let stats = dependence_experiment(&scenario, dep).map_err(|e| e.to_string())?;
        let mean = stats
            .mean_shutdown_step
            .map_or("n/a".to_string(), |m| format!("{m:.2}"));
        let _ = writeln!(
            stdout,
            "dependence: {} trials, shutdown rate {:.4}, mean shutdown step {}, mean loss {:.4}",
            stats.trials, stats.shutdown_rate, mean, stats.mean_loss
        );
        let text = format!(
            "trials={}\nshutdowns={}\nshutdown_rate={}\nmean_shutdown_step={}\nmean_loss={}\n",
            stats.trials,
            stats.shutdowns,
            stats.shutdown_rate,
            stats.mean_shutdown_step.map_or("nan".to_string(), |m| m.to_string()),
            stats.mean_loss
        );
        fs::write(args.out.join("dependence.txt"), text)
            .map_err(|e| format!("cannot write dependence.txt: {e}"))?;
    }
    let _ = writeln!(stdout, "wrote {}", args.out.display());
    Ok(EXIT_OK)
}

fn cmd_audit<W: Write>(args: AuditArgs, stdout: &mut W) -> Result<i32, String> {
    let scenario = load_scenario(&args.scenario)?;
    let opts = AuditOptions {
        exhaustive: if args.exhaustive {
            Some(true)
        } else if args.trials.is_some() {
            Some(false)
        } else {
            None
        },
        trials: args.trials.unwrap_or(1000),
    };
    let report = audit_assumptions(&scenario, &opts).map_err(|e| e.to_string())?;
    let _ = writeln!(stdout, "{report}");
    if let Some(path) = &args.out {
        fs::write(path, report.to_machine_text())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(if report.clean() { EXIT_OK } else { EXIT_AUDIT_FAIL })
}

fn cmd_counterexample<W: Write>(args: CounterexampleArgs, stdout: &mut W) -> Result<i32, String> {
    let text = fs::read_to_string(&args.family)
        .map_err(|e| format!("cannot read {}: {e}", args.family.display()))?;
    let family = parse_family(&text).map_err(|e| format!("{}: {e}", args.family.display()))?;
    let violate = Assumption::parse(&args.violate)
        .ok_or_else(|| format!("--violate must be one of a, b, c, d (got {:?})", args.violate))?;
    let outcome =
        find_counterexample(&family, violate, args.budget).map_err(|e| e.to_string())?;
    match &outcome.found {
        Some(found) => {
            let path: Vec<String> =
                found.trajectory.trajectory().iter().map(|v| v.to_string()).collect();
            let _ = writeln!(
                stdout,
                "counterexample violating ({}) {} after examining {} scenario(s):",
                violate.token(),
                violate.name(),
                outcome.examined
            );
            let _ = writeln!(stdout, "trajectory: {}", path.join(" -> "));
            let _ = writeln!(
                stdout,
                "dangerous deployments: {}",
                found.trajectory.dangerous_deployments
            );
            if let Some(dir) = &args.out {
                fs::create_dir_all(dir)
                    .map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
                fs::write(dir.join("scenario.scn"), serialize_scenario(&found.scenario))
                    .map_err(|e| format!("cannot write scenario.scn: {e}"))?;
                write_log_file(&dir.join("trajectory.log"), &found.trajectory.records)
                    .map_err(|e| format!("cannot write trajectory.log: {e}"))?;
                let _ = writeln!(stdout, "wrote {}", dir.display());
            }
        }
        None => {
            let _ = writeln!(
                stdout,
                "no counterexample found for ({}) {} within budget ({} scenario(s) examined)",
                violate.token(),
                violate.name(),
                outcome.examined
            );
        }
    }
    Ok(EXIT_OK)
}

fn cmd_dt<W: Write>(args: DtArgs, stdout: &mut W) -> Result<i32, String> {
    let scenario = load_scenario(&args.scenario)?;
    let game = scenario
        .assist_game
        .ok_or_else(|| "scenario has no [assist_game] section".to_string())?;
    let _ = writeln!(
        stdout,
        "{:<6} {:<16} {:>12} {:>12}  decision",
        "theory", "variant", "EU(assist)", "EU(refrain)"
    );
    for theory in TheoryKind::ALL {
        for variant in AssistVariant::ALL {
            let assist = decision::expected_utility(&game, theory, variant, AssistAct::Assist);
            let refrain = decision::expected_utility(&game, theory, variant, AssistAct::Refrain);
            let choice = decision::decide(&game, theory, variant);
            let _ = writeln!(
                stdout,
                "{:<6} {:<16} {:>12.6} {:>12.6}  {}",
                theory.token(),
                variant.token(),
                assist,
                refrain,
                choice.token()
            );
        }
    }
    Ok(EXIT_OK)
}

fn cmd_sweep<W: Write>(args: SweepArgs, stdout: &mut W) -> Result<i32, String> {
    let text = fs::read_to_string(&args.family)
        .map_err(|e| format!("cannot read {}: {e}", args.family.display()))?;
    let family = parse_family(&text).map_err(|e| format!("{}: {e}", args.family.display()))?;
    fs::create_dir_all(&args.out)
        .map_err(|e| format!("cannot create {}: {e}", args.out.display()))?;

    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    let tasks: Vec<(u64, u64)> = family
        .seeds
        .iter()
        .enumerate()
        .map(|(i, &seed)| (i as u64, seed))
        .collect();

    // Workers take tasks round-robin; each scenario writes its own
    // subdirectory, and rows are reassembled in index order afterwards so
    // the combined CSV is deterministic regardless of scheduling.
    let results: Vec<Result<SummaryRow, String>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for worker in 0..jobs {
            let tasks = &tasks;
            let base = &family.base;
            let out = &args.out;
            handles.push(scope.spawn(move || {
                let mut rows = Vec::new();
                for &(index, seed) in tasks.iter().skip(worker).step_by(jobs) {
                    let row = run_deployment_with_seed(base, seed)
                        .map_err(|e| e.to_string())
                        .and_then(|result| {
                            let dir = out.join(format!("scenario_{index:03}"));
                            write_run_outputs(&dir, index, seed, &result)
                        });
                    rows.push((index, row));
                }
                rows
            }));
        }
        let mut collected: Vec<(u64, Result<SummaryRow, String>)> = Vec::new();
        for handle in handles {
            collected.extend(handle.join().expect("sweep worker panicked"));
        }
        collected.sort_by_key(|(index, _)| *index);
        collected.into_iter().map(|(_, row)| row).collect()
    });

    let mut rows = Vec::new();
    for result in results {
        rows.push(result?);
    }
    let file = fs::File::create(args.out.join("sweep_summary.csv"))
        .map_err(|e| format!("cannot write sweep_summary.csv: {e}"))?;
    write_summary_csv(file, &rows).map_err(|e| format!("cannot write sweep_summary.csv: {e}"))?;
    let _ = writeln!(
        stdout,
        "swept {} scenario(s) across {} worker(s); wrote {}",
        rows.len(),
        jobs,
        args.out.display()
    );
    Ok(EXIT_OK)
}
