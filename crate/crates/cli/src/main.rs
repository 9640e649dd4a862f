use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser};
use revsurf_cli::{execute, init_workers, keys_help, parse_config, resolve_workers, Flags, Subcommand, EXIT_FAILURE, EXIT_OK};

/// Quantum states and transport on surfaces of revolution.
#[derive(Parser)]
#[command(name = "revsurf", version)]
struct Cli {
    /// Config file of `key = value` lines with [section] headers.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output directory (tables go to stdout when unset for geometry,
    /// bound-states and transport).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (0 = one per core); also REVSURF_WORKERS.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Lengths in units of rho, energies in hbar^2/(2m rho^2).
    #[arg(long, global = true)]
    dimensionless: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Profile, metric, curvatures and geometric potential along z.
    Geometry(Params),
    /// Hard-wall axial levels of a truncated cone.
    BoundStates(Params),
    /// Transmission through a cylinder junction.
    Transport(Params),
    /// Run a predefined study and write its tables.
    Experiment(Params),
    /// Run the acceptance checks.
    Verify(Params),
}

#[derive(clap::Args)]
struct Params {
    #[arg(value_name = "KEY=VALUE")]
    params: Vec<String>,
}

fn main() -> ExitCode {
    let mut cmd = Cli::command();
    for sub in Subcommand::ALL {
        cmd = cmd.mut_subcommand(sub.name(), |c| c.after_help(keys_help(sub)));
    }
    let cli = match Cli::from_arg_matches(&cmd.get_matches()) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let (sub, params) = match cli.command {
        Command::Geometry(p) => (Subcommand::Geometry, p.params),
        Command::BoundStates(p) => (Subcommand::BoundStates, p.params),
        Command::Transport(p) => (Subcommand::Transport, p.params),
        Command::Experiment(p) => (Subcommand::Experiment, p.params),
        Command::Verify(p) => (Subcommand::Verify, p.params),
    };
    let flags = Flags { config: cli.config, out: cli.out, workers: cli.workers, dimensionless: cli.dimensionless };

    let result = parse_config(sub, &params, &flags).map_err(Into::into).and_then(|cfg| {
        let env = std::env::var("REVSURF_WORKERS").ok();
        init_workers(resolve_workers(&cfg, env.as_deref())?);
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        let passed = execute(&cfg, &mut lock)?;
        let _ = lock.flush();
        Ok(passed)
    });
    match result {
        Ok(true) => ExitCode::from(EXIT_OK as u8),
        Ok(false) => ExitCode::from(EXIT_FAILURE as u8),
        Err(e) => {
            let e: revsurf_cli::CliError = e;
            eprintln!("revsurf {}: {e}", sub.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
