use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use commands::CliError;

/// Exact solutions of the 1D Dirac equation in a square well.
#[derive(Debug, Parser)]
#[command(name = "diracwell", version, about)]
struct Cli {
    #[command(flatten)]
    globals: Globals,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    /// Energy arguments (E, E-min, E-max) are multiples of m.
    M,
    /// Everything in natural units.
    Raw,
}

impl Units {
    pub fn label(self) -> &'static str {
        match self {
            Units::M => "m",
            Units::Raw => "raw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct Globals {
    /// Particle mass.
    #[arg(
        long = "m",
        global = true,
        default_value_t = 1.0,
        allow_negative_numbers = true
    )]
    pub mass: f64,
    /// Well depth (the potential is -V on [0, a]).
    #[arg(
        long = "V",
        global = true,
        default_value_t = 5.0,
        allow_negative_numbers = true
    )]
    pub depth: f64,
    /// Well width.
    #[arg(
        long = "a",
        global = true,
        default_value_t = 1.0,
        allow_negative_numbers = true
    )]
    pub width: f64,
    /// Unit convention for energy inputs.
    #[arg(long, global = true, value_enum, default_value_t = Units::M)]
    pub units: Units,
    /// Output format (default: text for `verify` and `table`, json otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Accept energies on a zone edge by moving them just above it; sweeps
    /// keep edge points instead of nudging them.
    #[arg(long, global = true)]
    pub allow_edge: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IncidenceChoice {
    /// The row's own solution: left incidence, bound state, or the
    /// two-sided superposition.
    Auto,
    Left,
    Right,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All bound states: both Klein branches and the conventional ones.
    Spectrum {
        /// Only the Klein-zone branches; fails without a Klein zone.
        #[arg(long)]
        klein_only: bool,
        /// Compare outside-branch levels with particle-in-a-box levels.
        #[arg(long)]
        nonrel_check: bool,
        /// Number of levels compared by --nonrel-check.
        #[arg(long, default_value_t = 3)]
        levels: u32,
    },
    /// Reflection, transmission and amplitudes at one energy.
    Scatter {
        #[arg(long = "E", allow_negative_numbers = true)]
        energy: f64,
    },
    /// Sample Ψ(x) on [-L, a+L].
    Wavefunction {
        #[arg(long = "E", allow_negative_numbers = true)]
        energy: f64,
        /// Distance sampled on each side of the well (default 2a).
        #[arg(long = "L")]
        extent: Option<f64>,
        /// Samples per region; the walls are always included.
        #[arg(long, default_value_t = 1001)]
        points: usize,
        #[arg(long, value_enum, default_value_t = IncidenceChoice::Auto)]
        incidence: IncidenceChoice,
    },
    /// Uniform energy sweep.
    Sweep {
        #[arg(long = "E-min", allow_negative_numbers = true)]
        e_min: f64,
        #[arg(long = "E-max", allow_negative_numbers = true)]
        e_max: f64,
        #[arg(long, default_value_t = 1001)]
        points: usize,
    },
    /// Run the property battery and print a pass/fail table.
    Verify {
        /// Relative perturbation of β at the right wall (fault injection).
        #[arg(long, allow_negative_numbers = true)]
        perturb_beta: Option<f64>,
        /// Only the oracle checks of this row (1 to 7).
        #[arg(long)]
        row: Option<u8>,
        /// Energies per row.
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// The ansatz used at one energy.
    Table {
        #[arg(long = "E", allow_negative_numbers = true)]
        energy: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.globals, &cli.command) {
        Ok(outcome) => match output::emit(&cli.globals, &outcome.rendered) {
            Ok(()) => {
                if outcome.success {
                    ExitCode::SUCCESS
                } else {
                    if let Some(message) = &outcome.failure_message {
                        eprintln!("{message}");
                    }
                    ExitCode::from(1)
                }
            }
            Err(err) => report(err),
        },
        Err(err) => report(err),
    }
}

fn report(err: CliError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(err.exit_code())
}
