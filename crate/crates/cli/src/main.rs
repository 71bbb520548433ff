use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use morlim_cli::{cmd_compare, cmd_reduce, cmd_synth, cmd_verify, CliError, ExitStatus, RunConfig};

/// Frequency-limited model order reduction with certificates.
#[derive(Parser)]
#[command(name = "morlim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a model and write the ROM, report.json and error_response.csv.
    Reduce {
        #[arg(long)]
        config: PathBuf,
        /// Directory holding A.mtx, B.mtx and C.mtx.
        #[arg(long)]
        model: PathBuf,
        /// Output directory; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-run the certificates of a finished reduction.
    Verify {
        #[arg(long)]
        model: PathBuf,
        /// Output directory of the `reduce` run.
        #[arg(long)]
        run: PathBuf,
    },
    /// Generate a synthetic multi-machine network and its linear model.
    Synth {
        #[arg(long, default_value_t = 16)]
        machines: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run flpork, pork, flbt and modal truncation and write compare.csv.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load_config(path: &PathBuf, nodes: Option<usize>, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(n) = nodes {
        cfg.nodes = n;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate().map_err(CliError::usage)?;
    Ok(cfg)
}

fn out_dir(cli: Option<PathBuf>, cfg: &RunConfig) -> Result<PathBuf, CliError> {
    cli.or_else(|| cfg.output.clone())
        .ok_or_else(|| CliError::usage("no output directory: pass --out or set \"output\" in the config"))
}

fn run(cli: Cli) -> Result<ExitStatus, CliError> {
    match cli.command {
        Command::Reduce {
            config,
            model,
            out,
            nodes,
            seed,
        } => {
            let cfg = load_config(&config, nodes, seed)?;
            let out = out_dir(out, &cfg)?;
            cmd_reduce(&cfg, &model, &out)
        }
        Command::Verify { model, run } => cmd_verify(&model, &run),
        Command::Synth { machines, seed, out } => cmd_synth(machines, seed, &out),
        Command::Compare {
            config,
            model,
            out,
            nodes,
            seed,
        } => {
            let cfg = load_config(&config, nodes, seed)?;
            let out = out_dir(out, &cfg)?;
            cmd_compare(&cfg, &model, &out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MORLIM_LOG", "error")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { ExitStatus::Usage.code() } else { 0 };
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status().code())
        }
    }
}
