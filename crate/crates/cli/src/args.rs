use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "vinelock", version, about = "Models, planner and simulator for passively shape-locking growing robots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

impl From<Toggle> for bool {
    fn from(t: Toggle) -> bool {
        t == Toggle::On
    }
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Run a scenario; writes trace.jsonl, centerline.csv and deploy.svg
    Simulate(SimulateArgs),
    /// Fit a waypoint target and write the command plan that deploys it
    Plan(PlanArgs),
    /// Print model curves as CSV
    Models(ModelsArgs),
    /// Fit fastener strengths to measured separation pressures
    Calibrate(CalibrateArgs),
    /// Mean configuration error between two centerline CSVs
    Evaluate(EvaluateArgs),
    /// Serve simulator sessions over line-delimited JSON
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub scenario: PathBuf,
    /// Output directory (created if missing)
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Design file replacing the scenario's design
    #[arg(long)]
    pub design: Option<PathBuf>,
    /// Override the scenario's disturbance option
    #[arg(long, value_enum)]
    pub disturbance: Option<Toggle>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// JSON array of [x_mm, y_mm] waypoints
    pub target: PathBuf,
    #[arg(long)]
    pub design: Option<PathBuf>,
    /// Allowed mean configuration error, mm
    #[arg(long = "tol-mm", default_value_t = 5.0)]
    pub tol_mm: f64,
    /// Plan file to write
    #[arg(long)]
    pub out: PathBuf,
    /// Body pressure used for separation warnings, kPa
    #[arg(long = "pressure-kpa", default_value_t = 7.0)]
    pub pressure_kpa: f64,
    /// Use only zero or full cable tension (arcs must be at the minimum radius)
    #[arg(long)]
    pub binary: bool,
    /// Largest number of primitives tried
    #[arg(long, default_value_t = 32)]
    pub max_primitives: usize,
}

#[derive(Debug, Args)]
pub struct ModelsArgs {
    #[command(subcommand)]
    pub model: ModelCmd,
    #[arg(long, global = true)]
    pub design: Option<PathBuf>,
    /// Write the CSV here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ModelCmd {
    /// Separation pressure against bend angle (theta_rad,p_min_kpa)
    PressureCurve(PressureCurveArgs),
    /// Tip force against displacement for both regimes
    Stiffness(StiffnessArgs),
    /// Tip deflection against cable tension for both regimes
    Deflection(DeflectionArgs),
}

#[derive(Debug, Args)]
pub struct FastenerOverrides {
    #[arg(long = "sigma-kpa")]
    pub sigma_kpa: Option<f64>,
    #[arg(long = "tau-kpa")]
    pub tau_kpa: Option<f64>,
    #[arg(long = "width-mm")]
    pub width_mm: Option<f64>,
    #[arg(long = "thickness-mm")]
    pub thickness_mm: Option<f64>,
    #[arg(long = "offset-mm")]
    pub offset_mm: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PressureCurveArgs {
    /// Beam radius, mm (defaults to the design's)
    #[arg(long = "radius-mm")]
    pub radius_mm: Option<f64>,
    #[arg(long = "from-rad", default_value_t = 0.1)]
    pub from_rad: f64,
    #[arg(long = "to-rad", default_value_t = 3.0)]
    pub to_rad: f64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Evaluate a single angle instead of a sweep, rad
    #[arg(long = "angle-rad", conflicts_with_all = ["from_rad", "to_rad", "points"])]
    pub angle_rad: Option<f64>,
    #[command(flatten)]
    pub fastener: FastenerOverrides,
}

#[derive(Debug, Args)]
pub struct StiffnessArgs {
    #[arg(long = "max-displacement-m", default_value_t = 0.1)]
    pub max_displacement_m: f64,
    #[arg(long, default_value_t = 11)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct DeflectionArgs {
    /// Largest tension, N (defaults to the design's full tension)
    #[arg(long = "max-tension-n")]
    pub max_tension_n: Option<f64>,
    #[arg(long, default_value_t = 11)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// CSV with theta_rad,p_sep_kpa columns
    pub samples: PathBuf,
    #[arg(long)]
    pub design: Option<PathBuf>,
    /// Beam radius of the test specimen, mm (defaults to the design's)
    #[arg(long = "radius-mm")]
    pub radius_mm: Option<f64>,
    /// Also fit the pinch offset d
    #[arg(long = "fit-d")]
    pub fit_d: bool,
    /// Write the design with the fitted fastener here
    #[arg(long = "write-design")]
    pub write_design: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Deployed centerline CSV (x_mm,y_mm columns)
    pub deployed: PathBuf,
    /// Desired centerline CSV (x_mm,y_mm columns)
    pub desired: PathBuf,
    /// Evenly spaced points compared
    #[arg(long, default_value_t = 100)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 7878)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Speak the protocol on standard input/output instead of TCP
    #[arg(long)]
    pub stdio: bool,
    #[arg(long)]
    pub design: Option<PathBuf>,
    /// Initial body pressure, kPa
    #[arg(long = "pressure-kpa", default_value_t = 7.0)]
    pub pressure_kpa: f64,
    #[arg(long, value_enum, default_value = "off")]
    pub disturbance: Toggle,
}
