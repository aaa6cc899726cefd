use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const UNITS: &str = "Units: energies in mc², momenta in mc, lengths in reduced Compton wavelengths ħ/mc \
(one Bohr radius is 1/α_S of these). All quantities are dimensionless in these units.";

/// Parsed command line, echoed into every JSON document it produces.
#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "rtfw",
    version,
    about = "Relativistic Thomas–Fermi–Weizsäcker atoms: constants, bounds and radial minimizers",
    long_about = None,
    after_help = UNITS
)]
pub struct RunConfig {
    /// Configuration file (key=value lines or a flat JSON object) with
    /// subcommand flags; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    #[serde(skip)]
    pub out: Option<PathBuf>,

    /// Output format; CSV is only available for tabular data.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads for parameter scans (0 = all cores).
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Ionization constant a = inf H, b = sup H, the bound coefficient 2/√a,
    /// the minimum c_g of g and the Thomas–Fermi constant e_TF (all dimensionless).
    #[command(args_override_self = true, after_help = UNITS)]
    Constants,

    /// Tabulate f, F, H, t^TF and g on a log grid of momenta t (units of mc).
    #[command(args_override_self = true, after_help = UNITS)]
    Table(TableArgs),

    /// Check the elementary inequalities on a log grid of momenta.
    #[command(args_override_self = true, after_help = UNITS)]
    VerifyBounds(VerifyArgs),

    /// Cutoff radius R_β (and R̃_{α,β} when --alpha is given), in ħ/mc.
    #[command(args_override_self = true, after_help = UNITS)]
    Cutoff(CutoffArgs),

    /// Explicit lower bound −N − C(A) on the energy (mc²).
    #[command(args_override_self = true, after_help = UNITS)]
    StabilityBound(StabilityArgs),

    /// Minimize the energy of a single atom under ∫ρ ≤ N.
    #[command(args_override_self = true, after_help = UNITS)]
    SolveAtom(SolveArgs),

    /// Largest bound electron number by bisection, or the analytic bound.
    #[command(args_override_self = true, after_help = UNITS)]
    Ionize(IonizeArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TableArgs {
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Smallest momentum (mc).
    #[arg(long, default_value_t = 1e-4)]
    pub t_min: f64,
    /// Largest momentum (mc).
    #[arg(long, default_value_t = 1e4)]
    pub t_max: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Log-spaced sample points.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Smallest sampled momentum (mc).
    #[arg(long, default_value_t = 1e-8)]
    pub s_min: f64,
    /// Largest sampled momentum (mc).
    #[arg(long, default_value_t = 1e8)]
    pub s_max: f64,
    /// Additional log-uniform random points.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    /// Seed for the random points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CutoffArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StabilityArgs {
    /// Weizsäcker coefficient λ.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Fine-structure constant α_S.
    #[arg(long = "alpha-s", default_value_t = 1.0 / 137.0)]
    pub alpha_s: f64,
    /// Nuclear charges, comma separated.
    #[arg(long = "Z", value_delimiter = ',', num_args = 1.., default_value = "1")]
    #[serde(rename = "Z")]
    pub z: Vec<f64>,
    /// Particle number N.
    #[arg(long = "N", default_value_t = 1.0)]
    #[serde(rename = "N")]
    pub n: f64,
    /// Largest allowed charge for the N-independent constant.
    #[arg(long = "Z-inf")]
    #[serde(rename = "Z_inf")]
    pub z_inf: Option<f64>,
    /// Number of nuclei for the N-independent constant (defaults to the
    /// number of charges).
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    /// Weizsäcker coefficient λ.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Fine-structure constant α_S.
    #[arg(long = "alpha-s", default_value_t = 1.0 / 137.0)]
    pub alpha_s: f64,
    /// Grid nodes.
    #[arg(long = "grid-n", default_value_t = 2000)]
    pub grid_n: usize,
    /// Innermost node, in Bohr radii 1/α_S.
    #[arg(long = "grid-rmin", default_value_t = 1e-5)]
    pub grid_rmin: f64,
    /// Outermost node (field vanishes there), in Bohr radii 1/α_S.
    #[arg(long = "grid-rmax", default_value_t = 60.0)]
    pub grid_rmax: f64,
    /// Relative stationarity tolerance of the inner solves.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    /// Relative tolerance on the particle number.
    #[arg(long = "particle-tol", default_value_t = 1e-6)]
    pub particle_tol: f64,
    /// Iteration cap per inner solve.
    #[arg(long = "max-iter", default_value_t = 20_000)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    /// Nuclear charge.
    #[arg(long = "Z")]
    #[serde(rename = "Z")]
    pub z: f64,
    /// Upper bound on the particle number.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the radial profile (r, chi, p, rho, hartree_potential) as CSV.
    #[arg(long, value_name = "PATH")]
    #[serde(skip)]
    pub profile: Option<PathBuf>,
    /// Include the nodal field chi in the JSON output.
    #[arg(long)]
    pub include_field: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IonizeArgs {
    /// Nuclear charges, comma separated; one scan each.
    #[arg(long = "Z", value_delimiter = ',', num_args = 1.., required = true)]
    #[serde(rename = "Z")]
    pub z: Vec<f64>,
    /// Report only the analytic bound N < (2/√a)·Z.
    #[arg(long)]
    pub analytic: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}
