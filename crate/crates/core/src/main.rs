//! Command line interface: run a single instance, sweep experiments,
//! generate instances, run the verification battery, and reproduce the
//! four-server counterexample.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use linematch::harness::{experiment, generate_instance, ExperimentConfig, GeneratorKind};
use linematch::verify::{reproduce_dh_counterexample, standard_battery, BatteryLevel};
use linematch::{run_with_mode, validate_instance, Algorithm, Instance, PdMode};

#[derive(Parser)]
#[command(
    name = "linematch",
    about = "Online metric matching on the line: algorithms, experiments, verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm over an instance file and emit the transcript.
    Run(RunArgs),
    /// Generate instances and run algorithms over them, emitting a report.
    Sweep(SweepArgs),
    /// Run the verification battery; exits nonzero on any violation.
    Verify(VerifyArgs),
    /// Reproduce the four-server non-monotonicity instance exactly.
    Counterexample(CounterexampleArgs),
    /// Emit a generated instance as JSON.
    Gen(GenArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Instance file: {"servers": [...], "requests": [...]}
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "mdh")]
    algo: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pseudo-distance mode: clamped (default) or raw.
    #[arg(long, default_value = "clamped")]
    pd: String,
    /// Enforce unit gaps, on-server requests and one request per server.
    #[arg(long)]
    strict: bool,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment config JSON; replaces the generator/size/trial flags.
    #[arg(long, conflicts_with_all = ["gen", "n", "trials", "algo"])]
    config: Option<PathBuf>,
    /// Generator: uniform, clustered, geometric-gaps, harmonic-adversary.
    #[arg(long, default_value = "uniform")]
    gen: String,
    /// Comma-separated instance sizes.
    #[arg(long, default_value = "16,32,64")]
    n: String,
    #[arg(long, default_value_t = 20)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated algorithms: greedy, harmonic, dh, mdh.
    #[arg(long, default_value = "mdh")]
    algo: String,
    /// Output format: json (canonical) or csv.
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// quick or full (full is the acceptance-scale battery).
    #[arg(long, default_value = "full")]
    level: String,
    /// text (one line per check) or json.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct CounterexampleArgs {
    /// text or json.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    gen: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("writing {path:?}: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_pd(s: &str) -> Result<PdMode, String> {
    match s {
        "clamped" => Ok(PdMode::Clamped),
        "raw" => Ok(PdMode::Raw),
        other => Err(format!("unknown pd mode '{other}' (clamped or raw)")),
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), String> {
    let text = fs::read_to_string(&args.instance)
        .map_err(|e| format!("reading {:?}: {e}", args.instance))?;
    let inst = Instance::from_json(&text).map_err(|e| format!("parsing instance: {e}"))?;
    let (validated, warnings) = validate_instance(&inst, args.strict).map_err(|e| e.to_string())?;
    for w in warnings {
        eprintln!("warning: {w:?}");
    }
    let algorithm = Algorithm::from_str(&args.algo)?;
    let mode = parse_pd(&args.pd)?;
    let transcript =
        run_with_mode(&validated, algorithm, args.seed, mode).map_err(|e| e.to_string())?;
    emit(&args.out, &format!("{}\n", transcript.to_json()))
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), String> {
    let cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("reading {path:?}: {e}"))?;
            serde_json::from_str::<ExperimentConfig>(&text)
                .map_err(|e| format!("parsing config: {e}"))?
        }
        None => {
            let sizes = args
                .n
                .split(',')
                .map(|tok| tok.trim().parse::<usize>().map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            let algorithms = args
                .algo
                .split(',')
                .map(|tok| Algorithm::from_str(tok.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            ExperimentConfig {
                generator: GeneratorKind::from_str(&args.gen)?,
                sizes,
                trials: args.trials,
                seed: args.seed,
                algorithms,
                pd_mode: PdMode::Clamped,
                reduction: None,
            }
        }
    };
    let report = experiment(&cfg).map_err(|e| e.to_string())?;
    let text = match args.format.as_str() {
        "json" => format!("{}\n", report.to_json()),
        "csv" => report.to_csv(),
        other => return Err(format!("unknown format '{other}' (json or csv)")),
    };
    emit(&args.out, &text)
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool, String> {
    let level = match args.level.as_str() {
        "quick" => BatteryLevel::Quick,
        "full" => BatteryLevel::Full,
        other => return Err(format!("unknown level '{other}' (quick or full)")),
    };
    let reports = standard_battery(level, args.seed);
    let all_pass = reports.iter().all(|r| r.pass());
    match args.format.as_str() {
        "json" => {
            let body = serde_json::to_string_pretty(&reports).expect("serializable");
            println!("{body}");
        }
        "text" => {
            for r in &reports {
                println!(
                    "{} {}: trials={} violations={} worst_margin={:.3e}",
                    if r.pass() { "PASS" } else { "FAIL" },
                    r.name,
                    r.trials,
                    r.violations,
                    r.worst_margin
                );
                for d in r.details.iter().take(5) {
                    println!("    {d}");
                }
            }
        }
        other => return Err(format!("unknown format '{other}' (text or json)")),
    }
    Ok(all_pass)
}

fn cmd_counterexample(args: &CounterexampleArgs) -> Result<bool, String> {
    let report = reproduce_dh_counterexample();
    match args.format.as_str() {
        "json" => println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable")
        ),
        "text" => {
            println!(
                "{} doubled harmonic non-monotonicity on servers [0, 4, 11, 31]",
                if report.pass { "PASS" } else { "FAIL" }
            );
            println!(
                "  third request at the first server:  Pr[-> third server] = {}",
                report.pr_s3_given_r3_at_s1
            );
            println!(
                "  third request at the second server: Pr[-> third server] = {:.6} (clamped), {:.6} (raw)",
                report.pr_s3_given_r3_at_s2_clamped, report.pr_s3_given_r3_at_s2_raw
            );
            println!(
                "  adjustment branch probability (simulated second request sent right): {:.6} (= 4/11)",
                report.adjustment_branch_probability
            );
            println!(
                "  Pr[-> fourth server | second server] = {:.6} (clamped), {:.6} (raw)",
                report.pr_s4_given_r3_at_s2_clamped, report.pr_s4_given_r3_at_s2_raw
            );
        }
        other => return Err(format!("unknown format '{other}' (text or json)")),
    }
    Ok(report.pass)
}

fn cmd_gen(args: &GenArgs) -> Result<(), String> {
    let kind = GeneratorKind::from_str(&args.gen)?;
    let inst = generate_instance(kind, args.n, args.seed).map_err(|e| e.to_string())?;
    emit(&args.out, &format!("{}\n", inst.to_json()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args).map(|()| true),
        Command::Sweep(args) => cmd_sweep(args).map(|()| true),
        Command::Verify(args) => cmd_verify(args),
        Command::Counterexample(args) => cmd_counterexample(args),
        Command::Gen(args) => cmd_gen(args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
