//! `tml`: fixtures, diagnostics and certification suites from the command line.

mod commands;
mod out;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Outcome;

#[derive(Parser)]
#[command(name = "tml", version, about = "Certify multiplier-summability inequalities on Z^d")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct OutArgs {
    /// Output directory; falls back to $OUTPUT_DIR, then ./tml-out.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Per-ring sums and maxima of |λ_n|/|n|_2.
    Rings(commands::RingsArgs),
    /// The N-sector partition of Z^d \ {0}.
    Sectors(commands::SectorsArgs),
    /// A seeded same-sector Riesz product and its expansion.
    Riesz(commands::RieszArgs),
    /// Fejér or Riesz-antiderivative test functions.
    Testfn(commands::TestfnArgs),
    /// Ring, Schatten and main-sum diagnostics for one symbol.
    Diagnose(commands::DiagnoseArgs),
    /// Run the certification suite.
    Certify(commands::CertifyArgs),
    /// Partial sums of Σ(|λ_n|/|n|_2)^q over an exponent grid.
    Sharpness(commands::SharpnessArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rings(a) => commands::rings(a),
        Command::Sectors(a) => commands::sectors(a),
        Command::Riesz(a) => commands::riesz(a),
        Command::Testfn(a) => commands::testfn(a),
        Command::Diagnose(a) => commands::diagnose(a),
        Command::Certify(a) => commands::certify(a),
        Command::Sharpness(a) => commands::sharpness(a),
    };
    let outcome = result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        Outcome::from_error(&e)
    });
    ExitCode::from(outcome.code())
}
