use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "framekit", version, about = "Moving frames and membership tests for space curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a Frenet, Bishop or null frame along a curve.
    Frame {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = FrameChoice::Auto)]
        kind: FrameChoice,
        /// Constant rotation of the Bishop normal legs.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        gauge_angle: f64,
    },
    /// Normal development `s -> (kappa1, kappa2)` of a Bishop frame.
    Develop {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        gauge_angle: f64,
    },
    /// Plane, sphere, light-cone and quadric membership.
    Detect {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        gauge_angle: f64,
        /// Quadric matrix B: `diag:a,b,c`, `matrix:` with nine entries, or a JSON file.
        #[arg(long = "quadric-B", value_name = "SPEC")]
        quadric_b: Option<String>,
        /// Center `x,y,z`; resolves sphere pencils and fixes the quadric center.
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
        /// Level `rho` of the candidate surface for lightlike curves.
        #[arg(long, allow_negative_numbers = true)]
        rho: Option<f64>,
    },
    /// Level-surface criteria for a curve against a scalar field.
    LevelCheck {
        #[command(flatten)]
        common: Common,
        /// Polynomial field JSON, or `sphere`, `quartic`, `torus:R,a`.
        #[arg(long)]
        field: String,
        #[arg(long, value_enum, default_value_t = CriterionChoice::Both)]
        criterion: CriterionChoice,
    },
    /// Lightlike ruling through a point of a pseudo-sphere or light-cone.
    Ruling {
        #[arg(long, default_value = "minkowski")]
        metric: String,
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long, allow_negative_numbers = true)]
        rho: f64,
        /// Point `x,y,z` on the surface.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Which of the two rulings, 0 or 1.
        #[arg(long, default_value_t = 0)]
        which: usize,
        #[arg(long, default_value_t = 10.0)]
        half_length: f64,
        #[arg(long)]
        tol_causal: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// `euclidean`, `minkowski`, `diag:a,b,c`, `matrix:` with nine entries, or a JSON file.
    #[arg(long, default_value = "euclidean")]
    pub metric: String,
    /// Curve JSON specification or `t,x,y,z` CSV samples.
    #[arg(long)]
    pub curve: PathBuf,
    #[arg(long)]
    pub tol_causal: Option<f64>,
    #[arg(long)]
    pub tol_fit: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameChoice {
    Auto,
    Frenet,
    Bishop,
    Null,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionChoice {
    Hessian,
    Euclidean,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}
