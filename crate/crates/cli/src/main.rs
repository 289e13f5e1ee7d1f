use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use faraday_qkd::harness::{emit_curves, run_experiment, solve_report, AttackSpec, ExperimentConfig};
use faraday_qkd::Error;

#[derive(Debug, Parser)]
#[command(name = "faraday-qkd", version, about = "Faraday-rotator QKD simulator and security analysis")]
struct Cli {
    /// Worker threads for round simulation, or "auto".
    #[arg(long, global = true, env = "FARADAY_QKD_WORKERS", value_parser = parse_workers)]
    workers: Option<Workers>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy)]
enum Workers {
    Auto,
    Count(usize),
}

fn parse_workers(s: &str) -> Result<Workers, String> {
    if s == "auto" {
        return Ok(Workers::Auto);
    }
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("expected a positive integer or 'auto', got '{s}'")),
        Ok(k) => Ok(Workers::Count(k)),
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run N protocol rounds, optionally under attack, and report.
    Simulate {
        /// Flat `key = value` config file; flags given here override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        rounds: Option<u64>,
        #[arg(long)]
        test_bits: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// none | general:cx,cy,gamma | intercept:gamma | impersonate:one|two | pns:3|4home
        /// (gamma may be "rand" for a fresh angle every round)
        #[arg(long, value_parser = parse_attack)]
        attack: Option<AttackSpec>,
        /// Per-round CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// One-row CSV of the aggregate figures.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Write the mutual-information curves as CSV.
    Curves {
        #[arg(long, default_value_t = 0.001)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the security threshold, Eve's optimum and the collective bound.
    Solve,
}

fn parse_attack(s: &str) -> Result<AttackSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn run(cli: Cli) -> faraday_qkd::Result<()> {
    match cli.command {
        Command::Simulate { config, rounds, test_bits, seed, attack, out, summary } => {
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::from_file(path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(n) = rounds {
                cfg.rounds = n;
            }
            if let Some(m) = test_bits {
                cfg.test_bits = m;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(a) = attack {
                cfg.attack = a;
            }
            if out.is_some() {
                cfg.output_path = out;
            }
            if summary.is_some() {
                cfg.summary_path = summary;
            }
            match cli.workers {
                Some(Workers::Auto) => cfg.workers = None,
                Some(Workers::Count(k)) => cfg.workers = Some(k),
                None => {}
            }
            let report = run_experiment(&cfg)?;
            println!("{report}");
        }
        Command::Curves { step, out } => {
            let table = emit_curves(step, &out)?;
            println!("wrote {} rows to {}", table.rows().len(), out.display());
        }
        Command::Solve => print!("{}", solve_report()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
