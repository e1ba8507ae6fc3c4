//! `damped-euler` command-line entry point.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use damped_euler::cli::{self, ExperimentConfig, Mode};
use damped_euler::Error;

#[derive(Parser)]
#[command(name = "damped-euler", version, about = "Damped Euler numerical laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Burgers lifespan and grid-vs-characteristics comparison
    Burgers(Flags),
    /// 2-D damped Euler run with diagnostics
    Euler2d(Flags),
    /// Diagnostics of stored DEL1 snapshots
    Diagnose(Flags),
    /// Inequality test-bench on the analytic catalog
    Testbench(Flags),
    /// Hypergeometric and Riemann-function identity sweeps
    SpecfunCheck(Flags),
    /// Phase-diagram sweep over (lambda, mu, eps)
    Sweep(Flags),
}

#[derive(Args)]
struct Flags {
    /// JSON config; the built-in default for the subcommand when absent
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config's `out`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; all cores when absent
    #[arg(long)]
    threads: Option<usize>,
    /// Check hashes and invariants of the outputs after the run
    #[arg(long)]
    verify: bool,
}

const EXIT_RUNTIME: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_VERIFY: u8 = 3;

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(match e {
        Error::Config { .. } => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, flags) = match cli.command {
        Command::Burgers(f) => (Mode::Burgers, f),
        Command::Euler2d(f) => (Mode::Euler2d, f),
        Command::Diagnose(f) => (Mode::Diagnose, f),
        Command::Testbench(f) => (Mode::Testbench, f),
        Command::SpecfunCheck(f) => (Mode::SpecfunCheck, f),
        Command::Sweep(f) => (Mode::Sweep, f),
    };
    if let Some(n) = flags.threads {
        if n == 0 {
            return fail(Error::Config {
                path: "--threads".into(),
                reason: "must be at least 1".into(),
            });
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(Error::Io(std::io::Error::other(e.to_string())));
        }
    }
    let cfg = match &flags.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(c) => c,
            Err(Error::Io(e)) => return fail(Error::Config {
                path: path.display().to_string(),
                reason: e.to_string(),
            }),
            Err(e) => return fail(e),
        },
        None => ExperimentConfig::default_for(mode),
    };
    if cfg.mode != mode {
        return fail(Error::Config {
            path: "mode".into(),
            reason: format!("config is for `{}`, subcommand is `{}`", cfg.mode.name(), mode.name()),
        });
    }
    let dir = cli::output_dir(&cfg, flags.out.as_deref());
    let manifest = match cli::run(&cfg, &dir) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    println!("wrote {} files to {}", manifest.files.len(), dir.display());
    if flags.verify {
        let checks = match cli::verify(&dir) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        for c in &checks {
            println!("{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        if !cli::verify::all_passed(&checks) {
            return ExitCode::from(EXIT_VERIFY);
        }
    }
    ExitCode::SUCCESS
}
