//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use morseflow_core::equilibria::DEFAULT_INTERIOR;
use morseflow_core::nonlinearity::NonlinearityModel;
use morseflow_core::Sign;

use crate::init::InitSpec;

#[derive(Debug, Parser)]
#[command(name = "morseflow", version, about = "Equilibria, connections and Morse decompositions for u_t = u_xx + f(u)")]
pub struct Cli {
    /// Worker threads for sweeps and probes.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample both time maps on an energy grid.
    Timemap(TimemapArgs),
    /// Shoot every equilibrium profile.
    Equilibria(EquilibriaArgs),
    /// Distance of a Heaviside branch to its limit profile over eps.
    Sweep(SweepArgs),
    /// Integrate the reaction-diffusion equation.
    Simulate(SimulateArgs),
    /// Probe connections between equilibria.
    Connections(ConnectionsArgs),
    /// Distance of each Morse set to its limit over eps.
    MorseSweep(MorseSweepArgs),
    /// Finite multivalued maps read from graph JSON.
    Graph {
        #[command(subcommand)]
        command: GraphCommand,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Sign {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Debug, Args)]
pub struct TimemapArgs {
    /// `linear:lambda=2`, `sat:lambda=50` or `heaviside:eps=0.2`.
    #[arg(long)]
    pub model: NonlinearityModel,
    #[arg(long)]
    pub emin: f64,
    #[arg(long)]
    pub emax: f64,
    #[arg(long)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    pub spacing: Spacing,
    /// Exit with code 2 unless both maps increase along the grid.
    #[arg(long)]
    pub check_monotone: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EquilibriaArgs {
    #[arg(long)]
    pub model: NonlinearityModel,
    #[arg(long, default_value_t = DEFAULT_INTERIOR)]
    pub interior: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated Heaviside widths, in sweep order.
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = SignArg::Plus)]
    pub sign: SignArg,
    #[arg(long, default_value_t = DEFAULT_INTERIOR)]
    pub interior: usize,
    /// Required terminal H1_0 distance.
    #[arg(long, default_value_t = 0.05)]
    pub conv_tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub model: NonlinearityModel,
    /// `sin:k=1,amp=0.01`, `random:seed=7,amp=2`, or a CSV of `(x, u)`.
    #[arg(long)]
    pub init: InitSpec,
    #[arg(long)]
    pub t_end: f64,
    /// Time step; defaults to `min(0.25 / f'(0), 1e-3)`.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 255)]
    pub interior: usize,
    /// Stop once the run settles near an equilibrium.
    #[arg(long)]
    pub capture: bool,
    /// Window for the integrated H1_0 estimates.
    #[arg(long, default_value_t = 1.0)]
    pub window: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConnectionsArgs {
    #[arg(long)]
    pub model: NonlinearityModel,
    #[arg(long, default_value_t = 511)]
    pub interior: usize,
    /// Unsigned perturbation amplitudes; each runs with both signs.
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.03])]
    pub amps: Vec<f64>,
    /// Sine modes; defaults to 1 through twice the largest branch index.
    #[arg(long, value_delimiter = ',')]
    pub modes: Option<Vec<u32>>,
    /// Branches below the cut get their own Morse set.
    #[arg(long, default_value_t = 1)]
    pub cut: u32,
    #[arg(long, default_value_t = 1e-3)]
    pub capture_tol: f64,
    #[arg(long, default_value_t = 1.0)]
    pub dwell: f64,
    #[arg(long, default_value_t = 50.0)]
    pub t_max: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct MorseSweepArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub cut: u32,
    #[arg(long, default_value_t = DEFAULT_INTERIOR)]
    pub interior: usize,
    /// Required terminal distance of every set.
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum GraphCommand {
    /// Dynamically gradient verdict with a homoclinic witness.
    Check(GraphArgs),
    /// Order the family as a Morse decomposition.
    Reorder(GraphArgs),
    /// Robustness over the perturbed step relations.
    Sweep(GraphArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Report file; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
