//! Scalar fields, Hessian metrics and level-surface membership criteria.

mod criteria;
mod field;
mod generate;
mod polynomial;

pub use criteria::{
    level_residual_euclidean, level_residual_for_frame, level_residual_hessian, normal_curvature, tangent_character,
    LevelCriterion, LevelResidualReport, LevelTolerances, TANGENCY_TOL,
};
pub use field::{hessian_metric, HessianMetricField, ScalarField, DEGENERACY_TOL};
pub use generate::{
    integrate_level_curve, on_surface_curve, project_to_level, ConverseOptions, ConverseTrace, OnSurfaceCurve,
    PROJECTION_TOL,
};
pub use polynomial::{Polynomial, Term};
