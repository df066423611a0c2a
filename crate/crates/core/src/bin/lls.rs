use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use lls_core::{config, harness, output, validate, Error};

#[derive(Parser)]
#[command(name = "lls", version, about = "Lateral leg spring curve tracking")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write trace.csv and summary.json.
    Simulate {
        config: PathBuf,
        #[arg(short, long, default_value = "out")]
        output: PathBuf,
        /// Override a config value, e.g. `--set tracking.gain=0.9`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Tabulate chord length and stiffness over the leg-angle grid.
    Sweep {
        config: PathBuf,
        #[arg(short, long, default_value = "out")]
        output: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run an oracle suite: conservation, lemma1, theorem1, quadrature,
    /// reflection, posture, optimality or all.
    Validate {
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) | Error::Usage(_) => 1,
        _ => 2,
    }
}

fn simulate(path: &Path, out: &Path, overrides: &[String]) -> Result<bool, Error> {
    let cfg = config::load(path, overrides)?;
    let trace = harness::run_scenario(&cfg)?;
    let m = harness::metrics(&trace, &cfg);
    let files = output::write_simulation(out, &trace, &m)?;
    println!("stances            {}", m.stances);
    match m.stances_to_converge {
        Some(n) => println!("converged after     {n}"),
        None => println!("converged after     -"),
    }
    println!("final |error| (m)   {:.6e}", m.final_error);
    println!("tail |error| (m)    {:.6e}", m.tail_error);
    println!("bound (m)           {:.6e}", m.bound);
    println!("trace               {}", files.trace.display());
    println!("summary             {}", files.summary.display());
    Ok(true)
}

fn sweep(path: &Path, out: &Path, overrides: &[String]) -> Result<bool, Error> {
    let cfg = config::load(path, overrides)?;
    let rows = harness::leg_sweep(&cfg)?;
    let file = output::write_sweep(out, &rows)?;
    println!("{} rows -> {}", rows.len(), file.display());
    Ok(true)
}

fn run_validate(suite: &str, seed: u64) -> Result<bool, Error> {
    let reports = validate::run(suite, seed)?;
    for r in &reports {
        for c in &r.checks {
            println!(
                "{} {:<13} {:<55} worst {:.3e} tol {:.1e} ({} samples)",
                if c.passed { "PASS" } else { "FAIL" },
                r.suite,
                c.name,
                c.worst,
                c.tolerance,
                c.samples
            );
        }
    }
    Ok(reports.iter().all(|r| r.passed()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match &cli.command {
        Command::Simulate {
            config,
            output,
            overrides,
        } => simulate(config, output, overrides),
        Command::Sweep {
            config,
            output,
            overrides,
        } => sweep(config, output, overrides),
        Command::Validate { suite, seed } => run_validate(suite, *seed),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
