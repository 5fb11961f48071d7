//! Command-line surface (clap derive).

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "sbs",
    version,
    about = "Low-frequency scattering by small bodies: capacitance, polarizability, amplitudes",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Worker thread cap (default: SBS_THREADS, then all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Include wall-clock timings in the report (content then varies run to
    /// run; without this flag output is byte-identical for fixed inputs).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Subcommand)]
pub enum Command {
    /// Mesh inspection.
    #[command(subcommand)]
    Mesh(MeshCmd),
    /// Electrostatic capacitance from the surface-integral series.
    Capacitance(CapacitanceArgs),
    /// Polarizability tensor at a material contrast.
    Polarizability(PolarizabilityArgs),
    /// Scattering amplitudes.
    #[command(subcommand)]
    Scatter(ScatterCmd),
    /// Electromagnetic scattering matrix.
    #[command(subcommand)]
    Em(EmCmd),
    /// Far-field probe inversion.
    #[command(subcommand)]
    Probe(ProbeCmd),
    /// Continuous-medium Born forward/inverse.
    #[command(subcommand)]
    Medium(MediumCmd),
}

#[derive(Subcommand)]
pub enum MeshCmd {
    /// Validate a surface and report its metrics.
    Info(ShapeArgs),
}

#[derive(Subcommand)]
pub enum ScatterCmd {
    /// One body, one plane wave, an angle sweep.
    Single(SceneArgs),
    /// Coupled point-capacitor bodies.
    Many(SceneArgs),
}

#[derive(Subcommand)]
pub enum EmCmd {
    /// The 2×2 scattering matrix over a scattering-angle grid.
    Matrix(EmMatrixArgs),
}

#[derive(Subcommand)]
pub enum ProbeCmd {
    /// Recover the polarization vector and incident field from two
    /// far-field measurements.
    Invert(ProbeInvertArgs),
}

#[derive(Subcommand)]
pub enum MediumCmd {
    /// Born amplitudes of a potential-density grid.
    Born(MediumBornArgs),
    /// Recover the density grid from full-lattice Born data.
    Invert(MediumInvertArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeKind {
    Sphere,
    Ellipsoid,
    Box,
}

/// Body geometry from a mesh file or a parametric shape.
#[derive(Args)]
pub struct ShapeArgs {
    /// Mesh file (OFF or OBJ, auto-detected by extension).
    #[arg(value_name = "MESH")]
    pub mesh: Option<PathBuf>,

    /// Parametric shape instead of a mesh file.
    #[arg(long, value_enum)]
    pub shape: Option<ShapeKind>,

    /// Sphere radius.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,

    /// Ellipsoid semi-axes a,b,c.
    #[arg(long, value_delimiter = ',', value_name = "A,B,C")]
    pub semi_axes: Option<Vec<f64>>,

    /// Box edge lengths lx,ly,lz.
    #[arg(long, value_delimiter = ',', value_name = "LX,LY,LZ")]
    pub size: Option<Vec<f64>>,

    /// Icosphere subdivision level (sphere/ellipsoid).
    #[arg(long, default_value_t = 3)]
    pub refinement: u32,

    /// Per-edge divisions (box).
    #[arg(long, default_value_t = 8)]
    pub divisions: u32,
}

#[derive(Args)]
pub struct CapacitanceArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,

    /// Series truncation order.
    #[arg(long, default_value_t = 6)]
    pub order: usize,

    #[arg(long, default_value_t = 1.0)]
    pub epsilon0: f64,

    /// Also solve the dense boundary-element system as a cross-check.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args)]
pub struct PolarizabilityArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,

    /// Material contrast γ in [−1, 1]; γ = −1 gives the magnetic tensor.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: f64,

    /// Series truncation order.
    #[arg(long, default_value_t = 6)]
    pub order: usize,
}

#[derive(Args)]
pub struct SceneArgs {
    /// Scene description (JSON).
    #[arg(long, value_name = "FILE")]
    pub scene: PathBuf,

    /// Also write the numeric table as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Args)]
pub struct EmMatrixArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,

    /// Electric contrast γ for the polarizability tensor.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: f64,

    /// Wavenumber.
    #[arg(long)]
    pub k: f64,

    /// Number of scattering angles on [0, π].
    #[arg(long, default_value_t = 19)]
    pub theta_count: usize,

    #[arg(long, default_value_t = 1.0)]
    pub mu0: f64,

    /// Drop the induced-current magnetic term (thick skin depth).
    #[arg(long)]
    pub no_magnetic: bool,

    /// Series truncation order for the tensors.
    #[arg(long, default_value_t = 8)]
    pub order: usize,

    /// Body number density; adds the refraction tensor of the dilute cloud.
    #[arg(long, value_name = "N")]
    pub density: Option<f64>,

    /// Also write the angle table as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Args)]
pub struct ProbeInvertArgs {
    /// Measurement description (JSON).
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
}

#[derive(Args)]
pub struct MediumBornArgs {
    /// Potential-density grid (JSON).
    #[arg(long, value_name = "FILE")]
    pub grid: PathBuf,

    /// Wavenumber.
    #[arg(long)]
    pub k: f64,

    /// Incidence direction x,y,z (normalized internally).
    #[arg(long, value_delimiter = ',', value_name = "X,Y,Z")]
    pub nu: Vec<f64>,

    /// Observation direction x,y,z; repeat for several directions.
    #[arg(long = "n", value_delimiter = ',', action = clap::ArgAction::Append, value_name = "X,Y,Z")]
    pub observations: Vec<f64>,

    /// Sweep the grid's entire momentum-transfer lattice instead of --n
    /// (produces data `medium invert` can consume).
    #[arg(long)]
    pub full_lattice: bool,

    /// Write the synthesized data file here.
    #[arg(long, value_name = "FILE")]
    pub data_out: Option<PathBuf>,

    /// Also write the data table as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Args)]
pub struct MediumInvertArgs {
    /// Far-field data file (JSON).
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,

    /// Target grid corner x,y,z.
    #[arg(long, value_delimiter = ',', value_name = "X,Y,Z", allow_hyphen_values = true)]
    pub origin: Vec<f64>,

    /// Target grid spacing.
    #[arg(long)]
    pub spacing: f64,

    /// Target grid cell counts nx,ny,nz.
    #[arg(long, value_delimiter = ',', value_name = "NX,NY,NZ")]
    pub dims: Vec<usize>,

    /// Write the recovered grid here (same format `medium born --grid` reads).
    #[arg(long, value_name = "FILE")]
    pub grid_out: Option<PathBuf>,
}
