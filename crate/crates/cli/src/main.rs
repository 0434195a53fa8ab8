//! `linfty`: obstruction calculus and deformation tools on JSON inputs.

mod commands;
mod format;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use report::Report;

const CATALAN_CAP_VAR: &str = "LINFTY_CATALAN_CAP";

#[derive(Debug, Parser)]
#[command(
    name = "linfty",
    version,
    about = "Obstruction calculus for strict L-infinity algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Truncation order of formal series.
    #[arg(long, global = true, default_value_t = linfty::obstruction::DEFAULT_MAX_ORDER)]
    pub order: usize,

    /// Parameter value at which series and transports are evaluated.
    #[arg(
        long,
        global = true,
        default_value_t = 1.0,
        allow_negative_numbers = true
    )]
    pub t: f64,

    /// Integration steps for parallel transport.
    #[arg(long, global = true, default_value_t = 1000)]
    pub steps: usize,

    /// Norm used for coefficient and operator bounds.
    #[arg(long, global = true, value_enum, default_value_t = NormArg::Max)]
    pub norm: NormArg,

    /// Verify the L-infinity relations before running the command.
    #[arg(long, global = true)]
    pub strict_check: bool,

    /// Cross-check against the independent reference computations.
    #[arg(long, global = true)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Max,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the generalized Jacobi identities.
    Verify { algebra: PathBuf },
    /// Dimensions of the cohomology of the differential.
    Cohomology {
        algebra: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        degree: Option<i32>,
    },
    /// Contracting homotopy in one degree.
    Homotopy {
        algebra: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        degree: i32,
    },
    /// Obstruction of a finite prefix of a Maurer-Cartan series.
    Obstruction {
        algebra: PathBuf,
        /// JSON file `{"coeffs": ["label=value, …", …]}`.
        series: PathBuf,
    },
    /// Extend a first-order deformation, sum it and certify convergence.
    Deform {
        /// Algebra file; omit when `--lie` is given.
        algebra: Option<PathBuf>,
        /// Lie structure whose deformation algebra is used.
        #[arg(long, conflicts_with = "algebra")]
        lie: Option<PathBuf>,
        /// First-order term, e.g. `x1=1/20` or `(0,1)=3`.
        #[arg(long, allow_hyphen_values = true)]
        u1: String,
    },
    /// Infinitesimal rigidity of a Lie structure.
    Rigidity { lie: PathBuf },
    /// Parallel transport along a path of Lie structures.
    Transport { lie: PathBuf, path: PathBuf },
    /// Write the deformation algebra of a Lie structure as an algebra file.
    ExportLie { lie: PathBuf },
    /// Rewrite an algebra file in canonical form.
    Canonical { algebra: PathBuf },
    /// Super-Catalan numbers `C_1, …, C_k`.
    Catalan {
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
}

/// Failure before any mathematics ran: unreadable or invalid input.
#[derive(Debug)]
pub struct InputError(pub anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.into())
    }
}

pub enum Output {
    Report(Report),
    Text(String),
}

fn configure() -> Result<(), InputError> {
    if let Ok(v) = std::env::var(CATALAN_CAP_VAR) {
        let cap = v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| {
                anyhow::anyhow!("{CATALAN_CAP_VAR} must be a positive integer, got {v:?}")
            })?;
        linfty::combinatorics::set_catalan_cap(cap);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = configure().and_then(|()| commands::run(&cli));
    match out {
        Ok(Output::Report(r)) => {
            print!("{}", r.to_json());
            ExitCode::from(r.status.exit_code())
        }
        Ok(Output::Text(s)) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(InputError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
