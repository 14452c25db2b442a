//! Command-line front end: `solve`, `validate`, `converge`, each driven by a
//! flat dotted-key configuration file.
//!
//! Exit codes: 0 success, 1 validation failure, 2 config error, 3 runtime
//! blow-up.

mod commands {
    pub mod converge;
    pub mod solve;
    pub mod validate;
}
mod config;
mod out;

use clap::{Args, Parser, Subcommand};
use config::Config;
use fracwave::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fracwave", version, about = "Pseudospectral solvers and validation harness for fractional Boussinesq / CH-type wave models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file (flat `key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's output.dir)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized battery fields
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel sweeps (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Inject a named coefficient corruption (validate only; test mode)
    #[arg(long)]
    mutate: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one model and write snapshot CSVs
    Solve(CommonArgs),
    /// Run the hierarchy / reduction / conservation battery
    Validate(CommonArgs),
    /// Run a convergence study against the parent equation
    Converge(CommonArgs),
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Blowup { .. } | Error::NonFinite { .. } => 3,
        Error::RealityLoss { .. } | Error::TransformHealth { .. } => 3,
        _ => 2,
    }
}

fn run(
    args: &CommonArgs,
    body: impl FnOnce(&mut Config, &std::path::Path) -> fracwave::Result<i32>,
) -> Result<i32, Error> {
    if let Some(threads) = args.threads {
        // ignore "already built" when several commands run in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let mut cfg = Config::load(&args.config)?;
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.raw("output.dir").map(PathBuf::from))
        .ok_or_else(|| Error::Config("no output directory: set output.dir or pass --out".into()))?;
    body(&mut cfg, &out_dir)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(args) => {
            if args.mutate.is_some() {
                Err(Error::Config("--mutate is only valid for the validate command".into()))
            } else {
                run(args, |cfg, dir| commands::solve::run(cfg, dir, args.seed))
            }
        }
        Command::Validate(args) => run(args, |cfg, dir| {
            commands::validate::run(cfg, dir, args.seed, args.mutate.as_deref())
        }),
        Command::Converge(args) => {
            if args.mutate.is_some() {
                Err(Error::Config("--mutate is only valid for the validate command".into()))
            } else {
                run(args, |cfg, dir| commands::converge::run(cfg, dir, args.seed))
            }
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
