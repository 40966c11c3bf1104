//! `pcclone`: run cloner experiments described by JSON configs.
//!
//! Exit status: 0 on success, 2 for invalid configs or arguments, 3 for I/O
//! failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phasecov::experiment::{self, CliError, ExperimentConfig, Format};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "pcclone", version, about = "Phase-covariant cloner simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the configured input (analytic, plus counts if configured).
    Run(Common),
    /// Evaluate every point of the configured sweep.
    Sweep(Common),
    /// One summary row per config; give `--config` at least twice.
    Compare(Common),
    /// Numeric symmetrization from the `optimize` section.
    Optimize(Common),
    /// Coincidence-count simulation from the `counting` section.
    Montecarlo(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long = "config", value_name = "PATH", required = true)]
    configs: Vec<PathBuf>,
    /// Overrides every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; defaults to the config's `output.path`, then stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn single(common: &Common) -> Result<ExperimentConfig, CliError> {
    match common.configs.as_slice() {
        [path] => ExperimentConfig::load(path),
        _ => Err(CliError::Validation(
            "this subcommand takes exactly one --config".into(),
        )),
    }
}

fn write<T: Serialize>(rows: &[T], common: &Common, cfg: &ExperimentConfig) -> Result<(), CliError> {
    let path = common.out.as_deref().or(cfg.output.path.as_deref());
    let format = experiment::resolve_format(common.format.map(Into::into), &cfg.output, path);
    let bytes = experiment::render(rows, format)?;
    experiment::emit(&bytes, path)
}

fn label_for(path: &Path, cfg: &ExperimentConfig) -> String {
    cfg.label.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string())
    })
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(c) => {
            let cfg = single(&c)?;
            write(&experiment::run(&cfg, c.seed)?, &c, &cfg)
        }
        Command::Sweep(c) => {
            let cfg = single(&c)?;
            write(&experiment::sweep(&cfg, c.seed)?, &c, &cfg)
        }
        Command::Montecarlo(c) => {
            let cfg = single(&c)?;
            write(&experiment::montecarlo(&cfg, c.seed)?, &c, &cfg)
        }
        Command::Optimize(c) => {
            let cfg = single(&c)?;
            write(&experiment::optimize(&cfg)?, &c, &cfg)
        }
        Command::Compare(c) => {
            let configs = c
                .configs
                .iter()
                .map(|p| ExperimentConfig::load(p).map(|cfg| (label_for(p, &cfg), cfg)))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = experiment::compare(&configs, c.seed)?;
            // Output settings come from the first config.
            write(&rows, &c, &configs[0].1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pcclone: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
