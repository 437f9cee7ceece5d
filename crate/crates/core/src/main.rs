use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use residue_forge::error::Error;
use residue_forge::report::{resolve_seed, run, Format, Mode, PsiChoice, RunConfig, TheoremChoice, DEFAULT_SEED};

/// Boundary and interior residue densities of perturbed Dirac operators, with a numeric oracle.
#[derive(Parser, Debug)]
#[command(name = "residue-forge", version)]
struct Cli {
    #[arg(long, value_enum, default_value = "1")]
    theorem: TheoremChoice,
    #[arg(long, value_enum, default_value = "generic")]
    psi: PsiChoice,
    #[arg(long, value_enum, default_value = "both")]
    mode: Mode,
    /// Seed of every random sweep; RESIDUE_FORGE_SEED overrides it.
    #[arg(long, help = format!("Seed of every random sweep [default: {DEFAULT_SEED}]; RESIDUE_FORGE_SEED overrides it"))]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output stem; writes PATH.json and/or PATH.tex instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = match resolve_seed(cli.seed) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let config =
        RunConfig { theorem: cli.theorem, psi: cli.psi, mode: cli.mode, seed, format: cli.format, out: cli.out };
    let output = match run(&config) {
        Ok(o) => o,
        Err(e @ Error::Usage(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match output.emit(config.out.as_deref()) {
        Ok(Some(text)) => println!("{text}"),
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    for r in output.report.oracle.iter().filter(|r| !r.pass) {
        eprintln!("oracle failure: {} (error {:.3e} > {:.0e})", r.id, r.error, r.tolerance);
    }
    if output.all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
