mod commands;
mod config;
mod error;
mod parse;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::cosets::CosetsArgs;
use commands::hecke::HeckeCmd;
use commands::measure::MeasureCmd;
use commands::padic::MatrixArgs;
use commands::phase::PhaseArgs;
use commands::report::ReportArgs;
use commands::zeta::ZetaCmd;
use config::Config;
use error::{CliError, CliResult};
use render::{Format, Output};

#[derive(Debug, Parser)]
#[command(
    name = "kms",
    version,
    about = "Exact computations for Hecke operators, p-adic strata, partition functions and scaling measures on GL_n"
)]
struct Cli {
    /// `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// json (default) or csv for tabular commands.
    #[arg(long, global = true, value_parser = parse::format_arg)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List Hecke coset or reduced-matrix representatives.
    Cosets(CosetsArgs),
    /// Phase polynomial and the verdict table over β.
    Phase(PhaseArgs),
    #[command(subcommand)]
    Zeta(ZetaCmd),
    /// Stratum of a matrix in Mat_n(Q_p), with normal form witnesses.
    Stratify(MatrixArgs),
    /// p-local normal form B·M·C = D.
    Snf(MatrixArgs),
    #[command(subcommand)]
    Hecke(HeckeCmd),
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Phase diagram and identity checks as one JSON document.
    Report(ReportArgs),
}

fn tabular(c: &Command) -> bool {
    matches!(
        c,
        Command::Cosets(_) | Command::Phase(_) | Command::Hecke(HeckeCmd::Apply(_))
    )
}

fn run(cli: Cli) -> CliResult<String> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let format = cfg
        .pick(cli.format, "format", parse::format_arg)?
        .unwrap_or(Format::Json);
    if format == Format::Csv && !tabular(&cli.command) {
        return Err(CliError::input(
            "csv output is only available for cosets, phase and hecke apply",
        ));
    }
    let out: Output = match cli.command {
        Command::Cosets(a) => commands::cosets::run(a, &cfg)?,
        Command::Phase(a) => commands::phase::run(a, &cfg)?,
        Command::Zeta(c) => commands::zeta::run(c, &cfg)?,
        Command::Stratify(a) => commands::padic::run_stratify(a, &cfg)?,
        Command::Snf(a) => commands::padic::run_snf(a, &cfg)?,
        Command::Hecke(c) => commands::hecke::run(c, &cfg)?,
        Command::Measure(c) => commands::measure::run(c, &cfg)?,
        Command::Report(a) => commands::report::run(a, &cfg)?,
    };
    out.render(format)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("kms: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
