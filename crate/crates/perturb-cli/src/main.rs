//! `perturb`: run perturbation-theory experiments on JSON system specs and
//! write CSV reports.

mod commands;
mod report;
mod spec;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(version, about, long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Flags {
    /// Report path; stdout when omitted.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Keep the diagonal of H1 in the coupling instead of moving it into the
    /// energies. Only the path-sum series accepts such systems.
    #[arg(long, global = true)]
    pub no_redivision: bool,
    /// Degeneracy tolerance for level grouping.
    #[arg(long, global = true, default_value_t = perturb::model::DEFAULT_TOL_DEG)]
    pub tol_deg: f64,
    /// Highest revision energy order included, 2 to 5.
    #[arg(long, global = true, default_value_t = 5, value_parser = clap::value_parser!(u8).range(2..=5))]
    pub g_orders: u8,
    /// Use every revision order in all improved exponents.
    #[arg(long, global = true)]
    pub uniform_g: bool,
    /// Kahan-compensated path sums.
    #[arg(long, global = true)]
    pub compensated_sum: bool,
}

#[derive(Args, Debug, Clone)]
pub struct TimeGrid {
    #[arg(long, default_value_t = 0.0)]
    pub t_start: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    /// Number of grid points, at least 1.
    #[arg(long, default_value_t = 11)]
    pub t_steps: usize,
}

impl TimeGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.t_steps == 0 {
            bail!("--t-steps must be at least 1");
        }
        if !self.t_start.is_finite() || !self.t_end.is_finite() {
            bail!("time grid bounds must be finite");
        }
        if self.t_steps == 1 {
            return Ok(vec![self.t_start]);
        }
        let span = self.t_end - self.t_start;
        let last = (self.t_steps - 1) as f64;
        Ok((0..self.t_steps)
            .map(|k| self.t_start + span * k as f64 / last)
            .collect())
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evolve a basis state with the truncated series.
    Evolve {
        #[arg(long, short)]
        input: PathBuf,
        /// Truncation order L.
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// Initial basis state.
        #[arg(long, default_value_t = 0)]
        initial: usize,
        #[command(flatten)]
        grid: TimeGrid,
    },
    /// Propagator errors of the usual and improved series against the exact
    /// solution, per order.
    Compare {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[command(flatten)]
        grid: TimeGrid,
    },
    /// List the term catalog of one order, with term values when a system is
    /// given and the order has closed forms.
    Terms {
        #[arg(long)]
        order: usize,
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 0)]
        gamma: usize,
        #[arg(long, default_value_t = 0)]
        gamma_prime: usize,
    },
    /// Golden-rule rate and its revision from a tabulated continuum.
    GoldenRule {
        #[arg(long, short)]
        input: PathBuf,
    },
    /// Two-level comparison of usual, improved and exact probabilities.
    TwoState {
        #[arg(long, default_value_t = 0.0)]
        e1: f64,
        #[arg(long, default_value_t = 1.0)]
        e2: f64,
        #[arg(long, default_value_t = 0.1)]
        v: f64,
        #[command(flatten)]
        grid: TimeGrid,
    },
    /// Revision energies and redefined energies against the exact spectrum.
    Energies {
        #[arg(long, short)]
        input: PathBuf,
    },
    /// Hermiticity and degeneracy report of a spec.
    Validate {
        #[arg(long, short)]
        input: PathBuf,
    },
    /// Write a random spec; `PERTURB_SEED` fixes the generator.
    Sample {
        #[arg(long, default_value_t = 3)]
        dimension: usize,
        /// Frobenius norm of H1.
        #[arg(long, default_value_t = 0.1)]
        norm: f64,
        /// Minimum spacing of the unperturbed energies.
        #[arg(long, default_value_t = 0.2)]
        gap: f64,
        #[arg(long, env = "PERTURB_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
