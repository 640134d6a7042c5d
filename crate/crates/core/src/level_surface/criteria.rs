//! Level-surface membership from the normal development:
//! `c₀ + c₁κ₁ + c₂κ₂ = (F ∘ α)″` with point-dependent coefficients.

use std::sync::Arc;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::field::{hessian_metric, HessianMetricField, ScalarField};
use crate::curves::{profile_causal, reparametrize_in, Curve, ReparamOptions};
use crate::error::{Error, Result};
use crate::frames::{bishop, BishopGauge, FrameField};
use crate::numeric::fd_derivative;
use crate::pseudo_metric::{CausalCharacter, MetricField, PseudoMetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelCriterion {
    /// Bishop frame of the Hessian metric, covariant Hessian coefficients.
    Hessian,
    /// Euclidean Bishop frame, plain Hessian coefficients.
    Euclidean,
}

/// Thresholds relative to `1 + max(‖∇F‖ + ‖Hess F‖)` along the curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelTolerances {
    pub residual: f64,
    pub tangency: f64,
}

impl Default for LevelTolerances {
    fn default() -> Self {
        LevelTolerances { residual: 1e-4, tangency: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResidualReport {
    pub criterion: LevelCriterion,
    pub grid: Vec<f64>,
    /// `(c₀, c₁, c₂)` per grid point.
    pub coefficients: Vec<[f64; 3]>,
    pub kappas: Vec<[f64; 2]>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// `max |cᵢ′ − predicted|` with `cᵢ′` by finite differences.
    pub derivative_consistency: f64,
    /// `⟨∇F, t⟩` at the first grid point.
    pub anchor_tangency: f64,
    /// `max F − min F` over the grid.
    pub level_spread: f64,
    /// Index of the working metric (Hessian criterion only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric_index: Option<usize>,
    pub threshold: f64,
    pub on_surface: bool,
    pub notes: Vec<String>,
}

fn report_from_frame(
    criterion: LevelCriterion,
    field: &ScalarField,
    ff: &FrameField,
    hm: Option<&HessianMetricField>,
    tol: &LevelTolerances,
) -> Result<LevelResidualReport> {
    let signs = ff.signs();
    let n = ff.len();
    let mut coefficients = Vec::with_capacity(n);
    let mut kappas = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let mut predicted = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut scale = 1.0f64;
    for i in 0..n {
        let p = ff.positions()[i];
        let [t, n1, n2] = ff.triads()[i];
        let grad = field.gradient(&p);
        let hess = match hm {
            Some(hm) => hm.covariant_hessian_matrix(&p)?,
            None => field.hessian(&p),
        };
        scale = scale.max(1.0 + grad.norm() + field.hessian(&p).amax());
        let c = [t.dot(&(hess * t)), signs[1] * grad.dot(&n1), signs[2] * grad.dot(&n2)];
        let k = [ff.coeffs()[i][0], ff.coeffs()[i][1]];
        residuals.push(c[0] + c[1] * k[0] + c[2] * k[1]);
        predicted.push(Vector3::new(0.0, signs[1] * n1.dot(&(hess * t)), signs[2] * n2.dot(&(hess * t))));
        coefficients.push(c);
        kappas.push(k);
        values.push(field.value(&p));
    }
    let grid = ff.grid().to_vec();
    let h = grid[1] - grid[0];
    let as_vec: Vec<Vector3<f64>> = coefficients.iter().map(|c| Vector3::from(*c)).collect();
    let derivs = fd_derivative(&as_vec, h);
    let consistency =
        derivs.iter().zip(&predicted).map(|(d, p)| (d.y - p.y).abs().max((d.z - p.z).abs())).fold(0.0f64, f64::max);
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let anchor = field.gradient(&ff.positions()[0]).dot(&ff.triads()[0][0]);
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let threshold = tol.residual * scale;
    let on_surface = max_residual <= threshold && anchor.abs() <= tol.tangency * scale;
    let mut notes = Vec::new();
    if max_residual > threshold {
        notes.push("normal development violates the level criterion".into());
    }
    if anchor.abs() > tol.tangency * scale {
        notes.push("tangent is not orthogonal to the gradient at the anchor".into());
    }
    Ok(LevelResidualReport {
        criterion,
        grid,
        coefficients,
        kappas,
        residuals,
        max_residual,
        derivative_consistency: consistency,
        anchor_tangency: anchor,
        level_spread: hi - lo,
        metric_index: hm.map(|m| m.index()),
        threshold,
        on_surface,
        notes,
    })
}

/// Criterion in the Hessian metric of `F`: `a₀ = H^F(t, t)`,
/// `aᵢ = εᵢ (grad F, nᵢ)`.
pub fn level_residual_hessian(
    field: &ScalarField,
    curve: &Curve,
    tol: &LevelTolerances,
) -> Result<LevelResidualReport> {
    let probes: Vec<Vector3<f64>> = curve.samples().into_iter().map(|(_, p)| p).collect();
    let hm = hessian_metric(field.clone(), &probes)?;
    let metric: Arc<dyn MetricField> = Arc::new(hm.clone());
    match profile_causal(curve, metric.as_ref()) {
        Ok(CausalCharacter::Lightlike) => {
            return Err(Error::AsymptoticDirection { s: curve.domain().0 });
        }
        Err(Error::MixedCausalCharacter { flips }) => {
            return Err(Error::AsymptoticDirection { s: flips[0] });
        }
        Err(e) => return Err(e),
        Ok(_) => {}
    }
    let pc = Arc::new(reparametrize_in(curve, metric, ReparamOptions::default())?);
    let ff = bishop(&pc, BishopGauge::default())?;
    report_from_frame(LevelCriterion::Hessian, field, &ff, Some(&hm), tol)
}

/// Criterion in the Euclidean metric: `b₀ = ⟨Hess F t, t⟩`, `bᵢ = ⟨∇F, nᵢ⟩`.
pub fn level_residual_euclidean(
    field: &ScalarField,
    curve: &Curve,
    tol: &LevelTolerances,
) -> Result<LevelResidualReport> {
    let metric: Arc<dyn MetricField> = Arc::new(PseudoMetric::euclidean());
    let pc = Arc::new(reparametrize_in(curve, metric, ReparamOptions::default())?);
    let ff = bishop(&pc, BishopGauge::default())?;
    report_from_frame(LevelCriterion::Euclidean, field, &ff, None, tol)
}

/// Euclidean report for an existing Euclidean Bishop frame.
pub fn level_residual_for_frame(
    field: &ScalarField,
    ff: &FrameField,
    tol: &LevelTolerances,
) -> Result<LevelResidualReport> {
    if ff.param_curve().constant_metric().map(|m| m.is_euclidean_like()) != Some(true) {
        return Err(Error::UnsupportedMetric("expected a Euclidean Bishop frame".into()));
    }
    ff.expect_kind(crate::frames::FrameKind::Bishop)?;
    report_from_frame(LevelCriterion::Euclidean, field, ff, None, tol)
}

/// Relative tolerance for `⟨∇F, v⟩ = 0`.
pub const TANGENCY_TOL: f64 = 1e-8;

/// `⟨Hess F v, v⟩ / ‖∇F‖` for `v` tangent to the level set through `p`.
pub fn normal_curvature(field: &ScalarField, p: &Vector3<f64>, v: &Vector3<f64>) -> Result<f64> {
    let g = field.gradient(p);
    let gn = g.norm();
    if gn <= 1e-12 * (1.0 + field.hessian(p).amax() * (1.0 + p.norm())) {
        return Err(Error::CriticalPoint { point: (*p).into() });
    }
    if v.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let defect = g.dot(v) / (gn * v.norm());
    if defect.abs() > TANGENCY_TOL {
        return Err(Error::NotTangent { defect });
    }
    Ok(v.dot(&(field.hessian(p) * v)) / gn)
}

/// Causal character of a tangent direction in the Hessian metric; lightlike
/// exactly when the normal curvature vanishes within the causal band.
pub fn tangent_character(hm: &HessianMetricField, p: &Vector3<f64>, v: &Vector3<f64>) -> Result<CausalCharacter> {
    hm.metric_at(p)?.classify_vector(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{AngleLaw, Family, ProjectionMode};
    use crate::level_surface::Polynomial;
    use approx::assert_relative_eq;
    use nalgebra::Matrix3;
    use std::f64::consts::PI;

    fn sphere() -> ScalarField {
        ScalarField::polynomial(Polynomial::sphere())
    }

    #[test]
    fn sphere_field_circle_both_routes() {
        let c = Curve::from_family(Family::circle(2.0), (0.0, 2.0 * PI), 256).unwrap();
        let tol = LevelTolerances::default();
        let e = level_residual_euclidean(&sphere(), &c, &tol).unwrap();
        assert!(e.on_surface && e.max_residual < 1e-8, "{}", e.max_residual);
        let h = level_residual_hessian(&sphere(), &c, &tol).unwrap();
        assert!(h.on_surface && h.max_residual < 1e-6);
        assert_eq!(h.metric_index, Some(0));
    }

    #[test]
    fn ellipse_on_quadric_field() {
        let b = Matrix3::from_diagonal(&Vector3::new(0.25, 1.0, 1.0));
        let f = ScalarField::polynomial(Polynomial::quadric(&b, &Vector3::zeros()));
        let c = Curve::from_family(Family::ellipse(2.0, 1.0), (0.0, 2.0 * PI), 256).unwrap();
        let r = level_residual_hessian(&f, &c, &LevelTolerances::default()).unwrap();
        assert!(r.on_surface && r.max_residual < 1e-5);
    }

    #[test]
    fn torus_latitude_euclidean() {
        let f = ScalarField::polynomial(Polynomial::torus(2.0, 0.5));
        let c = Curve::from_family(Family::TorusLatitude { major: 2.0, minor: 0.5, angle: 0.0 }, (0.0, 2.0 * PI), 256)
            .unwrap();
        let r = level_residual_euclidean(&f, &c, &LevelTolerances::default()).unwrap();
        assert!(r.on_surface && r.max_residual < 1e-5, "{}", r.max_residual);
    }

    #[test]
    fn helix_is_off_the_sphere() {
        let c = Curve::from_family(Family::helix(1.0, 1.0), (0.0, 4.0 * PI), 256).unwrap();
        let r = level_residual_euclidean(&sphere(), &c, &LevelTolerances::default()).unwrap();
        assert!(!r.on_surface);
        assert!(r.max_residual.max(r.anchor_tangency.abs()) >= 0.1);
    }

    #[test]
    fn quartic_projected_curve_passes() {
        let f = Family::Projected {
            field: Polynomial::quartic_example(),
            level: 3.0,
            seed: Box::new(Family::SphereCurve {
                center: [0.0; 3],
                radius: 1.0,
                lon: AngleLaw::linear(0.0, 1.0),
                lat: AngleLaw { c0: 0.2, c1: 0.0, amp: 0.3, freq: 2.0 },
            }),
            mode: ProjectionMode::Gradient,
        };
        let c = Curve::from_family(f, (0.0, 2.0 * PI), 512).unwrap();
        let field = ScalarField::polynomial(Polynomial::quartic_example());
        let tol = LevelTolerances::default();
        for r in
            [level_residual_hessian(&field, &c, &tol).unwrap(), level_residual_euclidean(&field, &c, &tol).unwrap()]
        {
            assert!(r.on_surface);
            assert!(r.max_residual < 1e-4, "{:?} {}", r.criterion, r.max_residual);
            assert!(r.derivative_consistency < 1e-4, "{:?} {}", r.criterion, r.derivative_consistency);
        }
    }

    #[test]
    fn asymptotic_curves_are_rejected() {
        // x² + y² − z² restricted to a ruling of the hyperboloid
        let b = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        let f = ScalarField::polynomial(Polynomial::quadric(&b, &Vector3::zeros()));
        let c = Curve::from_family(Family::line([1.0, 0.0, 0.0], [0.0, 1.0, 1.0]), (-1.0, 1.0), 32).unwrap();
        assert!(matches!(
            level_residual_hessian(&f, &c, &LevelTolerances::default()),
            Err(Error::AsymptoticDirection { .. })
        ));
    }

    #[test]
    fn normal_curvature_examples() {
        let p = Vector3::x();
        assert_relative_eq!(normal_curvature(&sphere(), &p, &Vector3::y()).unwrap(), 1.0, epsilon = 1e-15);
        let b = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        let f = ScalarField::polynomial(Polynomial::quadric(&b, &Vector3::zeros()));
        for v in [Vector3::new(0.0, 1.0, 1.0), Vector3::new(0.0, 1.0, -1.0)] {
            assert_eq!(normal_curvature(&f, &p, &v).unwrap(), 0.0);
            let hm = hessian_metric(f.clone(), &[p]).unwrap();
            assert_eq!(tangent_character(&hm, &p, &v).unwrap(), CausalCharacter::Lightlike);
        }
        assert!(matches!(normal_curvature(&sphere(), &p, &Vector3::x()), Err(Error::NotTangent { .. })));
        assert!(matches!(
            normal_curvature(&sphere(), &Vector3::zeros(), &Vector3::x()),
            Err(Error::CriticalPoint { .. })
        ));
    }
}
