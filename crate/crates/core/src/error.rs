use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad class of an error, used by the command-line front end to pick an
/// exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Malformed input: bad parameters, files, or option combinations.
    Validation,
    /// Input is well formed but violates a mathematical precondition.
    Precondition,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero vector has no causal character in this classifier")]
    ZeroVector,
    #[error("metric matrix is not symmetric")]
    NonSymmetricMetric,
    #[error("metric is degenerate (|lambda_min| = {min_abs:e}, |lambda_max| = {max_abs:e})")]
    DegenerateMetric { min_abs: f64, max_abs: f64 },
    #[error("vectors are linearly dependent")]
    DependentVectors,
    #[error("curve changes causal character near parameters {flips:?}")]
    MixedCausalCharacter { flips: Vec<f64> },
    #[error("lightlike curve is a straight line; pseudo arc-length is undefined")]
    StraightLight,
    #[error("curve is not regular: velocity vanishes at t = {t}")]
    DegenerateCurve { t: f64 },
    #[error("parameter {s} outside domain [{min}, {max}]")]
    OutOfDomain { s: f64, min: f64, max: f64 },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("Frenet curvature vanishes at s = {s}; use a Bishop frame")]
    VanishingCurvature { s: f64 },
    #[error("Frenet normal changes causal character along the curve near s = {s}")]
    MixedNormalCharacter { s: f64 },
    #[error("Bishop frames do not exist along lightlike curves")]
    LightlikeCurve,
    #[error("null frames require a lightlike curve")]
    NotLightlike,
    #[error("invalid gauge: {0}")]
    InvalidGauge(String),
    #[error("operation requires a {expected} frame, got {found}")]
    WrongFrameKind { expected: &'static str, found: String },
    #[error("unsupported metric: {0}")]
    UnsupportedMetric(String),
    #[error("no lightlike tangent direction exists at this point")]
    NoLightlikeTangent,
    #[error("point is not on the surface (defect {defect:e})")]
    NotOnSurface { defect: f64 },
    #[error("Hessian is degenerate at {point:?}")]
    DegenerateHessian { point: [f64; 3] },
    #[error("Hessian index is not constant over the region (found {first} and {other})")]
    MixedIndex { first: usize, other: usize },
    #[error("curve is tangent to an asymptotic (lightlike) direction near s = {s}")]
    AsymptoticDirection { s: f64 },
    #[error("gradient vanishes at {point:?}")]
    CriticalPoint { point: [f64; 3] },
    #[error("vector is not tangent to the level surface (defect {defect:e})")]
    NotTangent { defect: f64 },
    #[error("line fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("projection onto the level set did not converge at t = {t}")]
    ProjectionFailed { t: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroVector => "zero_vector",
            Error::NonSymmetricMetric => "non_symmetric_metric",
            Error::DegenerateMetric { .. } => "degenerate_metric",
            Error::DependentVectors => "dependent_vectors",
            Error::MixedCausalCharacter { .. } => "mixed_causal_character",
            Error::StraightLight => "straight_light",
            Error::DegenerateCurve { .. } => "degenerate_curve",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::InvalidCurve(_) => "invalid_curve",
            Error::VanishingCurvature { .. } => "vanishing_curvature",
            Error::MixedNormalCharacter { .. } => "mixed_normal_character",
            Error::LightlikeCurve => "lightlike_curve",
            Error::NotLightlike => "not_lightlike",
            Error::InvalidGauge(_) => "invalid_gauge",
            Error::WrongFrameKind { .. } => "wrong_frame_kind",
            Error::UnsupportedMetric(_) => "unsupported_metric",
            Error::NoLightlikeTangent => "no_lightlike_tangent",
            Error::NotOnSurface { .. } => "not_on_surface",
            Error::DegenerateHessian { .. } => "degenerate_hessian",
            Error::MixedIndex { .. } => "mixed_index",
            Error::AsymptoticDirection { .. } => "asymptotic_direction",
            Error::CriticalPoint { .. } => "critical_point",
            Error::NotTangent { .. } => "not_tangent",
            Error::TooFewPoints(_) => "too_few_points",
            Error::ProjectionFailed { .. } => "projection_failed",
            Error::Invalid(_) => "invalid_input",
            Error::Format(_) => "format_error",
            Error::Io(_) => "io_error",
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::NonSymmetricMetric
            | Error::InvalidCurve(_)
            | Error::InvalidGauge(_)
            | Error::OutOfDomain { .. }
            | Error::Invalid(_)
            | Error::Format(_) => ErrorCategory::Validation,
            Error::Io(_) => ErrorCategory::Io,
            _ => ErrorCategory::Precondition,
        }
    }
}
