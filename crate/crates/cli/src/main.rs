//! `xigeo`: build or load surfaces, analyze them, scan the product-torus
//! family and shoot closed λ-curves.

mod commands;
mod source;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use xigeo_core::{GeoError, Tolerances};

#[derive(Parser, Debug)]
#[command(name = "xigeo", version, about = "Geometry of Lagrangian tori and ξ-submanifolds in C^2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full analysis and write a JSON report.
    Analyze(AnalyzeArgs),
    /// Scan the product-torus family over a grid of radii and write CSV.
    Scan(ScanArgs),
    /// Shoot a closed λ-curve, optionally building the certified product surface.
    Curve(CurveArgs),
    /// Run the identity battery; exits with status 4 if any residual is too large.
    Verify(AnalyzeArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `S¹(a) × S¹(b)`.
    ProductTorus,
    /// Product of two centred ellipses.
    ProductEllipse,
    /// Rotation of a plane ellipse (a circle when `a = b`) about the origin.
    Equivariant,
    /// `(cos u + i cos v, sin u + i sin v)`, a non-Lagrangian control.
    Twisted,
}

#[derive(Args, Debug, Clone)]
pub struct TolArgs {
    #[arg(long, default_value_t = Tolerances::default().lagrangian)]
    pub tol_lagrangian: f64,
    #[arg(long, default_value_t = Tolerances::default().xi)]
    pub tol_xi: f64,
    #[arg(long, default_value_t = Tolerances::default().identity)]
    pub tol_identity: f64,
}

impl TolArgs {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            lagrangian: self.tol_lagrangian,
            xi: self.tol_xi,
            identity: self.tol_identity,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SourceArgs {
    /// Built-in surface family.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Surface file to load instead of a family.
    #[arg(long)]
    pub input: Option<std::path::PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub nu: usize,
    #[arg(long, default_value_t = 64)]
    pub nv: usize,
    /// First radius (product-torus) or ellipse semi-axis along x (equivariant).
    #[arg(long)]
    pub a: Option<f64>,
    /// Second radius (product-torus) or ellipse semi-axis along y (equivariant).
    #[arg(long)]
    pub b: Option<f64>,
    /// Semi-axes of the first ellipse factor.
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub b1: Option<f64>,
    /// Semi-axes of the second ellipse factor.
    #[arg(long)]
    pub a2: Option<f64>,
    #[arg(long)]
    pub b2: Option<f64>,
    /// Centre offset of the equivariant profile along the x axis.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center: f64,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    pub output: Option<std::path::PathBuf>,
    /// Also write the analyzed surface as a surface file.
    #[arg(long)]
    pub dump_surface: Option<std::path::PathBuf>,
    /// Also write per-sample fields as CSV.
    #[arg(long)]
    pub emit_plot_data: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, value_enum, default_value = "product-torus")]
    pub family: Family,
    /// `start:stop:count` for the first radius.
    #[arg(long, default_value = "0.3:3:50")]
    pub a_range: String,
    /// `start:stop:count` for the second radius.
    #[arg(long, default_value = "0.3:3:50")]
    pub b_range: String,
    #[arg(long, default_value_t = 32)]
    pub nu: usize,
    #[arg(long, default_value_t = 32)]
    pub nv: usize,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long, short)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Rotation index `p/q`: the curve turns by `2πp/q` about the origin per period.
    #[arg(long, default_value = "1/1")]
    pub rotation: String,
    /// Initial-radius bracket `lo:hi` for the shooting search.
    #[arg(long)]
    pub bracket: String,
    /// Samples of the closed curve.
    #[arg(long, default_value_t = 128)]
    pub samples: usize,
    /// Integration step.
    #[arg(long, default_value_t = 2e-3)]
    pub ds: f64,
    /// Build the product with a centred circle of this radius and certify it.
    #[arg(long)]
    pub product_with_circle: Option<f64>,
    /// Samples of the circle factor.
    #[arg(long, default_value_t = 64)]
    pub circle_samples: usize,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long, short)]
    pub output: Option<std::path::PathBuf>,
    /// Where to write the product surface file.
    #[arg(long)]
    pub surface_output: Option<std::path::PathBuf>,
}

/// Failure classes, one per nonzero exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(anyhow::Error),
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<GeoError> for CliError {
    fn from(e: GeoError) -> Self {
        match e {
            GeoError::Parameter(_) | GeoError::InvalidGrid(_) => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other.into()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numeric(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze(&a),
        Command::Scan(a) => commands::scan(&a),
        Command::Curve(a) => commands::curve(&a),
        Command::Verify(a) => commands::verify(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("usage error: {m}"),
                CliError::Numeric(m) => eprintln!("error: {m:#}"),
                CliError::Verification(m) => eprintln!("verification failed: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
