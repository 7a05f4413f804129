//! `halo`: command-line experiments on superlevel sets of maximal operators.
//!
//! Exit codes: 0 success, 2 malformed input, 3 rejected by the library,
//! 4 I/O failure. Failures print a JSON error object on stderr.

mod commands;
mod context;
mod error;
mod parse;

use clap::{Parser, Subcommand};

use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "halo", version, about = "Superlevel sets and halo constants of maximal operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact superlevel set of the 1D maximal function of an indicator.
    Superlevel(commands::SuperlevelArgs),
    /// Superlevel set of a mixed indicator against its measure bound.
    Lemma1(commands::Lemma1Args),
    /// Majorant chain of the iterated directional maximal operator.
    Chain(commands::ChainArgs),
    /// Density-ball selection with its covering certificates.
    Cover(commands::CoverArgs),
    /// Optimal protrusion over a slab, with an optional exponent fit.
    Slab(commands::SlabArgs),
    /// Sampled lower bounds of the halo ratio along a level ladder.
    Sweep(commands::SweepArgs),
    /// Log-log exponent fit of a sweep column.
    Fit(commands::FitArgs),
    /// SVG of a sweep or a fit.
    Plot(commands::PlotArgs),
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("HALO_THREADS") else {
        return Ok(());
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::parse(format!("HALO_THREADS: {e}"))),
        _ => Err(CliError::parse(format!("HALO_THREADS: {v:?} is not a positive integer"))),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Superlevel(a) => commands::superlevel(a),
        Command::Lemma1(a) => commands::lemma1(a),
        Command::Chain(a) => commands::chain(a),
        Command::Cover(a) => commands::cover(a),
        Command::Slab(a) => commands::slab(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Fit(a) => commands::fit(a),
        Command::Plot(a) => commands::plot(a),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let err = CliError::parse(e.to_string().trim_end());
            eprintln!("{}", err.to_json());
            std::process::exit(err.kind.exit_code());
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("{}", err.to_json());
        std::process::exit(err.kind.exit_code());
    }
}
