use std::path::PathBuf;
use std::process::ExitCode;

use affine_lab::commands::{self, CliError, RunOptions};
use affine_lab::config::ExperimentConfig;
use affine_lab::selftest::{self, SelftestOptions};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "affine-lab",
    version,
    about = "Affine isoperimetric experiments"
)]
struct Cli {
    /// Experiment config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps and batches.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Override the grid size from the config.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Override the bootstrap seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Record runtimes and timestamps (output is then not reproducible).
    #[arg(long, global = true)]
    stamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Area, Omega_p, ratio, deficit and sigma window per body.
    Functionals,
    /// Affine normal flow traces and plots.
    Flow,
    /// Stability pipeline per body and p.
    Verify,
    /// Parameter sweep with log-log plot and slope fit.
    Sweep,
    /// Invariant suite.
    Selftest {
        /// Corrupt the affine perimeter so the area-ODE check fails.
        #[arg(long)]
        inject_fault: bool,
    },
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(n) = cli.grid {
        cfg.grid = n;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    if let Command::Selftest { inject_fault } = cli.command {
        let checks = selftest::run(cli.grid.unwrap_or(256), SelftestOptions { inject_fault });
        print!("{}", selftest::render(&checks));
        return Ok(checks.iter().all(|c| c.pass));
    }
    let cfg = load(cli)?;
    let opts = RunOptions {
        out: cli.out.clone(),
        jobs: cli.jobs,
        stamp: cli.stamp,
    };
    let (text, ok) = match cli.command {
        Command::Functionals => commands::functionals(&cfg, &opts)?,
        Command::Flow => commands::flow(&cfg, &opts)?,
        Command::Verify => commands::verify_cmd(&cfg, &opts)?,
        Command::Sweep => commands::sweep(&cfg, &opts)?,
        Command::Selftest { .. } => unreachable!(),
    };
    print!("{text}");
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
