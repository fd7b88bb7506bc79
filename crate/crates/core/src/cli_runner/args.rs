//! Command-line flags.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use super::config::{FrequencySpec, Method, RunConfig, SweepSpec};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "lattice-wh", version, about = "Lattice waves scattered by a finite screen in a discrete waveguide")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Solver: wh (pole removal), bae (boundary equations) or both.
    #[arg(long, global = true)]
    pub method: Option<Method>,
    /// Frequency.
    #[arg(long, global = true, conflicts_with = "sweep")]
    pub omega: Option<f64>,
    /// Frequency sweep A:B:K (K points from A to B inclusive).
    #[arg(long, global = true)]
    pub sweep: Option<SweepSpec>,
    /// Incident mode index.
    #[arg(long, global = true)]
    pub p: Option<i64>,
    /// Projection column for numeric coefficients.
    #[arg(long, global = true)]
    pub mr: Option<i64>,
    /// Field window half-width in m.
    #[arg(long, global = true)]
    pub window: Option<i64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// List the duct modes at --omega.
    Modes,
    /// Solve at one frequency and write fields, coefficients and a report.
    Solve,
    /// Sweep the frequency and write coefficient curves plus a gnuplot script.
    Sweep,
    /// Run the cross-method invariant suite.
    Validate,
}

impl Cli {
    /// Defaults, then the config file, then flags, then `LATTICE_WH_EPS`.
    pub fn to_config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(m) = self.method {
            c.method = m;
        }
        if let Some(om) = self.omega {
            c.frequency = Some(FrequencySpec::Single(om));
        }
        if let Some(s) = self.sweep {
            c.frequency = Some(FrequencySpec::Sweep(s));
        }
        if let Some(p) = self.p {
            c.p = p;
        }
        if let Some(mr) = self.mr {
            c.m_r = mr;
        }
        if let Some(w) = self.window {
            c.window = w;
        }
        if let Some(j) = self.jobs {
            c.jobs = j;
        }
        if let Some(o) = &self.out {
            c.out = o.clone();
        }
        c.apply_env()?;
        Ok(c)
    }
}
