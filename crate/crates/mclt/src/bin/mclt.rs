//! Thin command-line front end over the library.
//!
//! Exit codes: 0 success, 1 bad configuration, 2 runtime failure,
//! 3 a verification row came back with `pass = false`.

use clap::{Args, Parser, Subcommand};
use mclt::harness::{
    emit_report, parse_config, parse_smoothing, run_rate_scan, run_verify, write_report,
    RunConfig,
};
use mclt::models::catalog;
use mclt::stein::{verify_stein_bounds, TestFunction};
use mclt::Error;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "mclt", version, about = "Martingale CLT bounds, verified by simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a bound on one model and compare with the exact distances
    Verify(RunArgs),
    /// Verify along a grid of n and fit the Wasserstein decay rate
    RateScan(RunArgs),
    /// Solve the Stein equation for each test function and check the norms
    SteinCheck(SteinArgs),
    /// Model catalog
    #[command(subcommand)]
    Models(ModelsCmd),
}

#[derive(Subcommand)]
enum ModelsCmd {
    /// Print the available model ids and their parameters
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Config file of `key = value` lines (flags below override it)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model id, e.g. rademacher or drifting-variance
    #[arg(long)]
    model: Option<String>,
    /// Number of martingale steps
    #[arg(long)]
    n: Option<usize>,
    /// Simulated paths per estimate
    #[arg(long)]
    reps: Option<usize>,
    /// Base seed for the counter-based streams
    #[arg(long)]
    seed: Option<u64>,
    /// Bound to evaluate: thm1, thm2, cor1, cor2 or cor3
    #[arg(long)]
    bound: Option<String>,
    /// Smoothing parameter: a number or `auto`
    #[arg(long)]
    a: Option<String>,
    /// Also write the CSV report to this path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SteinArgs {
    /// Comma-separated shift values
    #[arg(long, default_value = "0,1,2")]
    s: String,
    /// Comma-separated scale values
    #[arg(long, default_value = "0.5,1,2")]
    t: String,
}

fn load_config(args: &RunArgs) -> mclt::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(id) = &args.model {
        cfg.model.id = id.clone();
    }
    if let Some(n) = args.n {
        cfg.model.n = Some(n);
    }
    if let Some(reps) = args.reps {
        if reps == 0 {
            return Err(Error::Config("--reps must be >= 1".into()));
        }
        cfg.reps = reps;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(bound) = &args.bound {
        cfg.bound_kind = bound.parse()?;
    }
    if let Some(a) = &args.a {
        cfg.bound_a = parse_smoothing(a)?;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn parse_grid(raw: &str, what: &str) -> mclt::Result<Vec<f64>> {
    raw.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("--{what} entries must be numbers, got {piece:?}")))
        })
        .collect()
}

fn cmd_verify(args: &RunArgs) -> mclt::Result<i32> {
    let cfg = load_config(args)?;
    let row = run_verify(&cfg)?;
    let report = emit_report(std::slice::from_ref(&row));
    print!("{report}");
    if let Some(path) = &cfg.output {
        write_report(path, std::slice::from_ref(&row))?;
    }
    Ok(if row.pass { 0 } else { 3 })
}

fn cmd_rate_scan(args: &RunArgs) -> mclt::Result<i32> {
    let cfg = load_config(args)?;
    let report = run_rate_scan(&cfg)?;
    print!("{}", emit_report(&report.rows));
    eprintln!(
        "fitted rate: dw ~ n^({:.4}), intercept {:.4} over {} grid points",
        report.slope,
        report.intercept,
        report.rows.len()
    );
    if let Some(path) = &cfg.output {
        write_report(path, &report.rows)?;
    }
    Ok(if report.rows.iter().all(|r| r.pass) { 0 } else { 3 })
}

fn cmd_stein_check(args: &SteinArgs) -> mclt::Result<i32> {
    let svals = parse_grid(&args.s, "s")?;
    let tvals = parse_grid(&args.t, "t")?;
    println!(
        "{:<13} {:>5} {:>5} {:>13} {:>10} {:>10} {:>6}",
        "function", "s", "t", "residual", "|f'|", "|f''|", "pass"
    );
    let mut all_pass = true;
    for h in TestFunction::ALL {
        for &s in &svals {
            for &t in &tvals {
                let rep = verify_stein_bounds(h, s, t)?;
                all_pass &= rep.pass;
                println!(
                    "{:<13} {:>5} {:>5} {:>13.3e} {:>10.6} {:>10.6} {:>6}",
                    rep.test_function, s, t, rep.max_residual, rep.norm_fprime, rep.norm_fsecond, rep.pass
                );
            }
        }
    }
    Ok(if all_pass { 0 } else { 3 })
}

fn cmd_models_list() -> i32 {
    for info in catalog() {
        println!("{:<22} {}", info.id, info.summary);
        for (name, default, meaning) in info.params {
            println!("    {name:<18} default {default:<6} {meaning}");
        }
    }
    0
}

fn main() {
    // die quietly instead of panicking when stdout closes early,
    // e.g. `mclt stein-check | head`
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help/version print to stdout and exit 0; usage errors are
            // configuration errors
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let outcome = match &cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::RateScan(args) => cmd_rate_scan(args),
        Command::SteinCheck(args) => cmd_stein_check(args),
        Command::Models(ModelsCmd::List) => Ok(cmd_models_list()),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
