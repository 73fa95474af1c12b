use std::collections::BTreeMap;

use clap::{Args, ValueEnum};
use clarkrif::{Error, Result};

pub const CLARK_GRID_N: usize = 2048;
pub const FOURIER_GRID_N: usize = 256;
pub const DEFAULT_K: usize = 16;
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-6;

/// Tolerances that `--tol name=value` may override.
pub const TOLERANCE_NAMES: [&str; 2] = ["ortho", "identity"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Debug, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Output::Text, global = true)]
    pub output: Output,
    /// Grid size (power of two); defaults to 2048 for Clark models and 256
    /// for Fourier passes.
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    /// Largest Fourier index in orthogonality tests.
    #[arg(long = "k", global = true)]
    pub k: Option<usize>,
    /// Tolerance override `name=value` (names: ortho, identity).
    #[arg(long = "tol", value_parser = parse_tolerance, global = true)]
    pub tol: Vec<(String, f64)>,
    /// Seed for randomized test points.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

fn parse_tolerance(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let name = name.trim();
    if !TOLERANCE_NAMES.contains(&name) {
        return Err(format!("unknown tolerance {name:?}; expected one of {}", TOLERANCE_NAMES.join(", ")));
    }
    let v: f64 = value.trim().parse().map_err(|_| format!("tolerance {name} is not a number: {value:?}"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("tolerance {name} must be positive"));
    }
    Ok((name.to_string(), v))
}

#[derive(Clone, Debug)]
pub struct Config {
    pub output: Output,
    pub grid_n: usize,
    pub k: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
}

impl Config {
    /// Resolves defaults for a command whose main grid defaults to
    /// `default_grid` and checks the grid invariants.
    pub fn resolve(g: &GlobalArgs, default_grid: usize) -> Result<Config> {
        let grid_n = g.grid_n.unwrap_or(default_grid);
        let k = g.k.unwrap_or(DEFAULT_K);
        if !grid_n.is_power_of_two() || grid_n < 4 {
            return Err(Error::InvalidArgument(format!("grid_n = {grid_n} must be a power of two ≥ 4")));
        }
        Ok(Config { output: g.output, grid_n, k, tolerances: g.tol.iter().cloned().collect(), seed: g.seed })
    }

    /// Fourier parameters also need `K ≤ grid_n/4`.
    pub fn check_fourier(&self) -> Result<()> {
        clarkrif::spaces::validate_fourier_params(self.k, self.grid_n)
    }

    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }
}
