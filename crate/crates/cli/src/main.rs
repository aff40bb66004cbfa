mod commands;
mod config;
mod error;
mod figures;
mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::McGrid;
use config::RunConfig;
use error::CliError;
use figures::FigureId;
use table::Table;

/// Ramsey spectroscopy uncertainty under correlated dephasing.
#[derive(Debug, Parser)]
#[command(name = "ramsey", version)]
struct Cli {
    /// TOML file with run settings; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the uncertainty of one fully specified protocol.
    Eval(RunConfig),
    /// Optimize τ and the squeezing parameter for one N or an N grid.
    Optimize(RunConfig),
    /// Emit the data of a figure.
    Figure(FigureArgs),
    /// Compare Monte Carlo estimator variances with the closed forms.
    McValidate(McArgs),
    /// Zero-frequency bound and the optimized uncertainty relative to it.
    Bound(RunConfig),
}

#[derive(Debug, Args)]
struct FigureArgs {
    #[arg(value_enum)]
    id: FigureId,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long, value_enum, default_value = "white")]
    grid: McGrid,
    #[command(flatten)]
    run: RunConfig,
}

fn merged(cli_config: &Option<PathBuf>, flags: RunConfig) -> Result<RunConfig, CliError> {
    let base = match cli_config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = flags.over(base);
    if let Some(threads) = cfg.threads {
        if threads == 0 {
            return Err(config::invalid("threads", "must be at least 1"));
        }
        // Fails only if a pool already exists, which cannot happen before this point.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(cfg)
}

fn emit(table: &Table, cfg: &RunConfig) -> Result<(), CliError> {
    let mut out: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    table.write(cfg.format(), &mut out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval(flags) => {
            let cfg = merged(&cli.config, flags)?;
            emit(&commands::eval(&cfg)?, &cfg)
        }
        Command::Optimize(flags) => {
            let cfg = merged(&cli.config, flags)?;
            emit(&commands::optimize(&cfg)?, &cfg)
        }
        Command::Figure(args) => {
            let cfg = merged(&cli.config, args.run)?;
            emit(&figures::figure(args.id, &cfg)?, &cfg)
        }
        Command::McValidate(args) => {
            let cfg = merged(&cli.config, args.run)?;
            let (table, failure) = commands::mc_validate(args.grid, &cfg)?;
            emit(&table, &cfg)?;
            failure.map_or(Ok(()), Err)
        }
        Command::Bound(flags) => {
            let cfg = merged(&cli.config, flags)?;
            emit(&commands::bound(&cfg)?, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors; everything else is a validation failure.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ramsey: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
