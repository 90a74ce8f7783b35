use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "bslab", version, about = "Birman-Schwinger spectral checks and enclosures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Finite-dimensional checks on seeded random systems.
    Lab(LabArgs),
    /// Schrodinger operators on the line.
    S1d(Common),
    /// Radial certificates in R^3.
    E3d(Common),
    /// Radial potentials on hyperbolic space.
    H3(Common),
    /// Eigenvalue-free strip for matrix potentials.
    Dirac(Common),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    CsvBundle,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Potential family; see the README for the families of each model.
    #[arg(long)]
    pub potential: Option<String>,
    /// Family parameters as `key=value,key=value`.
    #[arg(long, default_value = "")]
    pub params: String,
    /// Nodes of the reporting grid.
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Truncation interval `lo,hi` (line model only).
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    /// Search rectangle `re_min,re_max,im_min,im_max`; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub search: Vec<String>,
    /// `default` or `lambda_max,step,rays,ray_points,ring,ring_points`.
    #[arg(long)]
    pub zgrid: Option<String>,
    /// CSV table for tabulated potentials or matrix samples.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct LabArgs {
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    #[arg(long, default_value_t = 12)]
    pub dim_max: usize,
    /// Resolvent samples per system.
    #[arg(long, default_value_t = 20)]
    pub z_per_system: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report file for `json`, directory for `csv-bundle`; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Zero timestamps and timings so identical runs give identical bytes.
    #[arg(long)]
    pub fixed_clock: bool,
}
