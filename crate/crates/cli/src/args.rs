use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Strichartz maximizers on the torus and the periodic DMNLS flow.
#[derive(Debug, Parser)]
#[command(name = "strichartz", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Evaluate W_B, its decomposition, A_B and G_B for a coefficient file.
    Eval(EvalArgs),
    /// Scan max A_B over a test family and refine the threshold.
    Threshold(ThresholdArgs),
    /// Maximize W_B on the unit sphere over a fixed support.
    Optimize(OptimizeArgs),
    /// Integrate the periodic DMNLS flow from an initial field.
    Simulate(SimulateArgs),
    /// Perturb a ground state and track its orbit distance.
    Stability(StabilityArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval(_) => "eval",
            Command::Threshold(_) => "threshold",
            Command::Optimize(_) => "optimize",
            Command::Simulate(_) => "simulate",
            Command::Stability(_) => "stability",
        }
    }

    pub fn out(&self) -> Option<&PathBuf> {
        match self {
            Command::Eval(a) => a.out.as_ref(),
            Command::Threshold(a) => a.out.as_ref(),
            Command::Optimize(a) => a.out.as_ref(),
            Command::Simulate(a) => a.out.as_ref(),
            Command::Stability(a) => a.out.as_ref(),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Command::Threshold(a) => a.seed,
            Command::Optimize(a) => a.seed,
            Command::Stability(a) => a.seed,
            Command::Eval(_) | Command::Simulate(_) => 0,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    /// JSON file `{"n_min": .., "coeffs": [[re, im], ..]}`.
    pub input: PathBuf,
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: f64,
    /// Directory for the report and manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ThresholdArgs {
    /// Test family, 1 to 4.
    #[arg(long)]
    pub family: u8,
    #[arg(long, default_value_t = 0.01)]
    pub scan_step: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid starts refined per scan point.
    #[arg(long, default_value_t = 4)]
    pub restarts: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizeArgs {
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: f64,
    /// Support is `[-h, h]`.
    #[arg(long, default_value_t = 2)]
    pub halfwidth: usize,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Initial field: a coefficient file, optionally carrying `"L"`.
    pub init: PathBuf,
    /// Period; overrides the file's `"L"`.
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub period: Option<f64>,
    #[arg(long, default_value_t = 1e-2)]
    pub dt: f64,
    #[arg(long, default_value_t = 10.0)]
    pub horizon: f64,
    /// Reference profile for the `orbit_distance` column.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Write a state snapshot every this many steps (0 disables).
    #[arg(long, default_value_t = 0)]
    pub snapshot_stride: usize,
    /// Fail with exit code 5 when the conservation check warns.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct StabilityArgs {
    /// Ground-state profile: a coefficient file, optionally carrying `"L"`.
    pub ground_state: PathBuf,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub period: Option<f64>,
    /// Rescale the profile to mass `P = lambda` before the run.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 10.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub dt: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
