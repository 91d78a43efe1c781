mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use iob_core::{Branch, Grid, Mechanism};

use crate::error::CliError;
use crate::output::Format;

/// Optical bistability and resonance-fluorescence spectra of a dense
/// two-level medium. All frequencies are in units of Γ.
#[derive(Debug, Parser)]
#[command(name = "iob", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady-state excitation across a drive grid, with switching thresholds.
    Hysteresis(HysteresisArgs),
    /// Incoherent emission spectrum on one branch.
    Spectrum(SpectrumArgs),
    /// Satellite positions ±ν_p across a drive grid.
    Peaks(PeaksArgs),
    /// Time-domain Bloch dynamics: relaxation runs or slow drive sweeps.
    Dynamics(DynamicsArgs),
    /// Run the oracle suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
struct MediumArgs {
    /// Spontaneous decay rate.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    gamma: f64,
    /// Bare detuning ω_A − ω_L.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta: f64,
    /// Lorentz local-field coupling ζ_L.
    #[arg(long = "zeta-l", default_value_t = 0.0, allow_negative_numbers = true)]
    zeta_l: f64,
    /// Excitation-dependent detuning coupling ζ_m.
    #[arg(long = "zeta-m", default_value_t = 0.0, allow_negative_numbers = true)]
    zeta_m: f64,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Diagnostics on standard error (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Normalize {
    /// Divide by the free-atom saturation maximum 1/(2Γ).
    FreeAtomMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    Up,
    Down,
    Both,
}

#[derive(Debug, Args)]
struct HysteresisArgs {
    #[command(flatten)]
    medium: MediumArgs,
    /// Mechanism; inferred from which coupling is non-zero when omitted.
    #[arg(long)]
    mechanism: Option<Mechanism>,
    /// Drive grid `start:end:count` or a single value.
    #[arg(long, default_value = "0:25:501")]
    omega: Grid,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    medium: MediumArgs,
    #[arg(long)]
    mechanism: Option<Mechanism>,
    /// Drive strength.
    #[arg(long, allow_negative_numbers = true)]
    omega: f64,
    #[arg(long, default_value = "lower")]
    branch: Branch,
    /// Frequency grid `start:end:count`; a symmetric default is chosen from ν_p.
    #[arg(long = "nu-grid", allow_hyphen_values = true)]
    nu_grid: Option<Grid>,
    #[arg(long, value_enum)]
    normalize: Option<Normalize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct PeaksArgs {
    #[command(flatten)]
    medium: MediumArgs,
    /// Repeat to map several mechanisms; each uses only its own coupling.
    #[arg(long)]
    mechanism: Vec<Mechanism>,
    #[arg(long, default_value = "0:25:251")]
    omega: Grid,
    /// Add the free-atom reference (both couplings off).
    #[arg(long)]
    free_atom: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct DynamicsArgs {
    #[command(flatten)]
    medium: MediumArgs,
    #[arg(long)]
    mechanism: Option<Mechanism>,
    /// Fixed drive for a relaxation run.
    #[arg(long, conflicts_with_all = ["sweep_from", "sweep_to"])]
    omega: Option<f64>,
    /// Start the relaxation run on this branch instead of the ground state.
    #[arg(long, requires = "omega")]
    branch: Option<Branch>,
    /// Offset added to u, v and W of the starting state.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, requires = "branch")]
    perturb: f64,
    #[arg(long = "t-end", default_value_t = 50.0)]
    t_end: f64,
    /// Number of output samples in a relaxation run.
    #[arg(long, default_value_t = 501)]
    samples: usize,
    /// Lower end of a drive sweep.
    #[arg(long, requires = "sweep_to")]
    sweep_from: Option<f64>,
    /// Upper end of a drive sweep.
    #[arg(long, requires = "sweep_from")]
    sweep_to: Option<f64>,
    #[arg(long, value_enum, default_value_t = Direction::Both)]
    direction: Direction,
    /// Drive ramp rate dΩ/dt (at most 1e-3 Γ²).
    #[arg(long = "ramp-rate", default_value_t = 1e-3)]
    ramp_rate: f64,
    /// Drive spacing of recorded sweep samples.
    #[arg(long = "omega-step", default_value_t = 1e-2)]
    omega_step: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Seed for the randomized parameter sets.
    #[arg(long, default_value_t = iob_core::verify::DEFAULT_SEED)]
    seed: u64,
    /// Use the misprinted `16|Ω|²` term in b2 (fault injection).
    #[arg(long)]
    b2_as_printed: bool,
    #[command(flatten)]
    output: OutputArgs,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Hysteresis(a) => commands::hysteresis(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::Peaks(a) => commands::peaks(&a),
        Command::Dynamics(a) => commands::dynamics(&a),
        Command::Verify(a) => commands::verify(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("iob: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
