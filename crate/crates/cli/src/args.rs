use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "welander", version, about = "Two-box overturning model: PWS geometry, simulation and continuation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags accepted by every subcommand. They override the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub kappa1: Option<f64>,
    #[arg(long)]
    pub kappa2: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// JSON scenario file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file; standard output if absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Region of a parameter point in the PWS diagram and its attractors.
    #[command(allow_negative_numbers = true)]
    Classify {
        /// μ, overriding `--mu`.
        #[arg(id = "mu_pos", value_name = "MU")]
        mu: Option<f64>,
        /// η, overriding `--eta`.
        #[arg(id = "eta_pos", value_name = "ETA")]
        eta: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Trajectories, invariant manifolds, Σ geometry and periodic orbits.
    Portrait {
        #[command(flatten)]
        common: Common,
        /// Side of the default initial-condition grid.
        #[arg(long)]
        n_ic: Option<usize>,
        /// Integration time per orbit.
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Two-parameter bifurcation diagram in (μ, η).
    Diagram {
        #[command(flatten)]
        common: Common,
        /// Stack smooth diagrams over a range of ε with the BT and cusp loci.
        #[arg(long)]
        sweep: bool,
        /// Samples per PWS curve.
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// Attractor census on a grid of parameter points.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_mu: Option<usize>,
        #[arg(long)]
        n_eta: Option<usize>,
        #[arg(long)]
        n_ic: Option<usize>,
    },
    /// One-parameter continuation of an equilibrium of the smooth model.
    ContinueEq {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        free: Option<FreeArg>,
        /// Lower end of the parameter range.
        #[arg(long, allow_negative_numbers = true)]
        from: Option<f64>,
        /// Upper end of the parameter range.
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
        /// Start towards decreasing parameter values.
        #[arg(long)]
        backward: bool,
    },
    /// Double BT and generalised BT–cusp points by continuation in ε.
    BtLocate {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FreeArg {
    Mu,
    Eta,
}
