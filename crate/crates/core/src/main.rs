use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use povm_core::cli::{self, CliError, Format, Options};

#[derive(Parser)]
#[command(
    name = "povm",
    version,
    about = "Covariant phase POVMs and their first moments"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// JSON config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated dimensions, e.g. `8,16,32`.
    #[arg(long, global = true, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Write F(X) for each configured set.
    Build,
    /// Side-by-side contrast of the POVM and the spectral measure of its first moment.
    DilemmaReport,
    /// Spectrum and idempotence sweeps for the canonical phase.
    Convergence,
    /// Smeared position measures on a line grid.
    Line,
    /// Closed-form moment coefficients against adaptive quadrature.
    OracleCheck,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = Options {
        config: args.config,
        out: args.out,
        seed: args.seed,
        dims: args.dims,
        format: args.format,
    };
    let result: Result<Vec<PathBuf>, CliError> = match args.command {
        Command::Build => cli::build(&opts),
        Command::DilemmaReport => cli::cmd_dilemma_report(&opts),
        Command::Convergence => cli::cmd_convergence(&opts),
        Command::Line => cli::cmd_line(&opts),
        Command::OracleCheck => cli::cmd_oracle_check(&opts),
    };
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("povm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
