mod commands;
mod input;
mod output;
mod repro;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use freecurrents::pushforward::DEFAULT_BUDGET;

use output::Format;

/// Exact computations with geodesic currents on free groups.
#[derive(Parser)]
#[command(name = "freecurrents", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
    /// Rank of the free group; inferred from the inputs when omitted.
    #[arg(long, global = true)]
    pub rank: Option<usize>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Total refinement steps for interval pushforwards.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Seed for randomized experiments.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Subcommand)]
enum Command {
    #[command(subcommand)]
    Word(commands::WordCmd),
    #[command(subcommand)]
    Auto(commands::AutoCmd),
    #[command(subcommand)]
    Current(commands::CurrentCmd),
    #[command(subcommand)]
    Lang(commands::LangCmd),
    #[command(subcommand)]
    Lp(commands::LpCmd),
    #[command(subcommand)]
    Spectral(commands::SpectralCmd),
    /// Regenerate the reference experiments with PASS/FAIL verdicts.
    Repro {
        #[arg(value_enum)]
        suite: repro::Suite,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numeric = err.chain().any(|e| e.downcast_ref::<freecurrents::Error>().is_some_and(|e| e.is_numeric()));
    if numeric {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let g = &cli.global;
    let result = match &cli.command {
        Command::Word(c) => commands::word(c, g),
        Command::Auto(c) => commands::auto(c, g),
        Command::Current(c) => commands::current(c, g),
        Command::Lang(c) => commands::lang(c, g),
        Command::Lp(c) => commands::lp(c, g),
        Command::Spectral(c) => commands::spectral(c, g),
        Command::Repro { suite } => repro::run(*suite, g),
    };
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.render(g.format).as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

