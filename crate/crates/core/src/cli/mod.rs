//! Scenario runner behind the `cvps` binary.

pub mod config;
pub mod output;
pub mod run;
pub mod selfcheck;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::ScenarioConfig;
pub use run::{load_config, run_scenario, Overrides, RunError};
pub use selfcheck::{selfcheck, Check};

pub const EXIT_SELFCHECK: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "cvps", version, about = "Homodyne post-selection scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Emulator seed, overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Fock truncation, overrides the config.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file (TOML, or JSON by extension).
    Run { config: PathBuf },
    /// Fast invariant checks.
    Selfcheck,
}

/// Executes parsed arguments and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("invalid configuration: --threads must be ≥ 1");
            return run::EXIT_VALIDATION;
        }
        // Ignored if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match &cli.command {
        Command::Run { config } => {
            let overrides = Overrides {
                seed: cli.seed,
                dim: cli.dim,
            };
            let result =
                load_config(config, overrides).and_then(|cfg| run_scenario(&cfg, &cli.out));
            match result {
                Ok(_) => {
                    println!("wrote {}", cli.out.join("result.json").display());
                    0
                }
                Err(e) => {
                    eprintln!("{e}");
                    e.exit_code()
                }
            }
        }
        Command::Selfcheck => {
            let checks = selfcheck(cli.dim.unwrap_or(config::DEFAULT_PHOTON_DIM));
            for c in &checks {
                println!("{c}");
            }
            if checks.iter().all(|c| c.passed) {
                0
            } else {
                EXIT_SELFCHECK
            }
        }
    }
}
