//! Membership tests read off the normal development `s ↦ (κ₁, κ₂)` of a
//! Bishop frame.
//!
//! A curve lies on `(x − P, x − P) = ρ` exactly when `α − P = a₁n₁ + a₂n₂`
//! with constant `aᵢ`; then the development satisfies
//! `1 + ε a₁ κ₁ + ε a₂ κ₂ = 0` and `ρ = ε₁a₁² + ε₂a₂²`. Lines through the
//! origin mean the curve is planar.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::curves::{profile_causal, reparametrize_in, Curve, Family, ParamCurve, ReparamOptions};
use crate::error::{Error, Result};
use crate::frames::{bishop, null_frame, BishopGauge, FrameField, FrameKind};
use crate::pseudo_metric::{CausalCharacter, PseudoMetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneSignature {
    /// Definite normal plane.
    Euclidean,
    /// Normal plane of signature `(−, +)`.
    Lorentzian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalDevelopment {
    pub grid: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    /// `(ε, ε₁, ε₂)`.
    pub signs: [f64; 3],
    pub plane_signature: PlaneSignature,
}

impl NormalDevelopment {
    pub fn max_abs(&self) -> f64 {
        self.points.iter().flat_map(|p| p.iter()).fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn normal_development(ff: &FrameField) -> Result<NormalDevelopment> {
    if ff.kind() != FrameKind::Bishop {
        return Err(Error::WrongFrameKind { expected: "bishop", found: ff.kind().name().into() });
    }
    let signs = ff.signs();
    Ok(NormalDevelopment {
        grid: ff.grid().to_vec(),
        points: ff.coeffs().iter().map(|c| [c[0], c[1]]).collect(),
        signs,
        plane_signature: if signs[1] == signs[2] { PlaneSignature::Euclidean } else { PlaneSignature::Lorentzian },
    })
}

/// Scale-aware thresholds. Absolute tolerances are `rel · (1 + max|κᵢ|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitTolerances {
    /// Line-fit rms residual.
    pub fit: f64,
    /// `|c₀|` for a line through the origin.
    pub origin: f64,
    /// Light-cone relation `min(|a₁ − a₂|, |a₁ + a₂|) ≤ tol · max(|a₁|, 1)`.
    pub light_cone: f64,
    /// Pointwise `|κ₁|` for the lightlike criterion.
    pub null_curvature: f64,
    /// Direct membership defect `|(α − P, α − P) − ρ|`, relative.
    pub membership: f64,
}

impl Default for FitTolerances {
    fn default() -> Self {
        FitTolerances { fit: 1e-4, origin: 1e-5, light_cone: 1e-5, null_curvature: 1e-8, membership: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    /// `(c₀, c₁, c₂)` of `c₀ + c₁X + c₂Y = 0`, with `c₁² + c₂² = 1`.
    pub coefficients: [f64; 3],
    pub rms_residual: f64,
    pub through_origin: bool,
    /// All points coincide; the line was picked from the pencil through them.
    pub degenerate: bool,
    /// `(a₁, a₂)` from `1 + εa₁X + εa₂Y = 0`; absent through the origin.
    pub a: Option<[f64; 2]>,
    /// `ε₁a₁² + ε₂a₂²`.
    pub rho: Option<f64>,
    /// `d` with `1/d² = |ρ|`; absent through the origin or at the critical value.
    pub lorentz_distance: Option<f64>,
    /// `ρ = 0` within tolerance (light-cone case).
    pub critical: bool,
}

pub fn fit_line(nd: &NormalDevelopment) -> Result<LineFit> {
    fit_line_with(nd, &FitTolerances::default())
}

pub fn fit_line_with(nd: &NormalDevelopment, tol: &FitTolerances) -> Result<LineFit> {
    let n = nd.len();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    let scale = 1.0 + nd.max_abs();
    let nf = n as f64;
    let mx = nd.points.iter().map(|p| p[0]).sum::<f64>() / nf;
    let my = nd.points.iter().map(|p| p[1]).sum::<f64>() / nf;
    let mut cov = Matrix2::zeros();
    for p in &nd.points {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        cov += Matrix2::new(dx * dx, dx * dy, dx * dy, dy * dy);
    }
    cov /= nf;
    let eig = SymmetricEigen::new(cov);
    let (imin, imax) = if eig.eigenvalues[0] <= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let spread = eig.eigenvalues[imax].max(0.0).sqrt();
    let degenerate = spread <= tol.fit * scale;
    let (c1, c2, c0) = if degenerate {
        perpendicular_line(mx, my, nd.signs, tol.origin * scale)
    } else {
        let v = eig.eigenvectors.column(imin);
        (v[0], v[1], -(v[0] * mx + v[1] * my))
    };
    Ok(line_fit_from(nd, [c0, c1, c2], degenerate, tol))
}

/// Line through `(x, y)` perpendicular to its position vector in the
/// restricted form `diag(ε₁, ε₂)`.
fn perpendicular_line(x: f64, y: f64, signs: [f64; 3], origin_tol: f64) -> (f64, f64, f64) {
    let (e1, e2) = (signs[1], signs[2]);
    let q = e1 * x * x + e2 * y * y;
    let norm = x.hypot(y);
    if norm <= origin_tol {
        return (1.0, 0.0, 0.0);
    }
    if q.abs() <= origin_tol * norm {
        // null position vector: the pencil contains the line through the origin
        return (-y / norm, x / norm, 0.0);
    }
    let (u1, u2) = (e1 * x, e2 * y);
    let un = u1.hypot(u2);
    (u1 / un, u2 / un, -q / un)
}

fn line_fit_from(nd: &NormalDevelopment, c: [f64; 3], degenerate: bool, tol: &FitTolerances) -> LineFit {
    let scale = 1.0 + nd.max_abs();
    let norm = c[1].hypot(c[2]);
    let c = [c[0] / norm, c[1] / norm, c[2] / norm];
    let rms =
        (nd.points.iter().map(|p| (c[0] + c[1] * p[0] + c[2] * p[1]).powi(2)).sum::<f64>() / nd.len() as f64).sqrt();
    let through_origin = c[0].abs() <= tol.origin * scale;
    let [eps, e1, e2] = nd.signs;
    let (a, rho, distance, critical) = if through_origin {
        (None, None, None, false)
    } else {
        let a = [eps * c[1] / c[0], eps * c[2] / c[0]];
        let rho = e1 * a[0] * a[0] + e2 * a[1] * a[1];
        let critical = e1 != e2 && light_cone_relation(a) <= tol.light_cone * a[0].abs().max(1.0);
        let distance = if critical { None } else { Some(1.0 / rho.abs().sqrt()) };
        (Some(a), Some(rho), distance, critical)
    };
    LineFit {
        coefficients: c,
        rms_residual: rms,
        through_origin,
        degenerate,
        a,
        rho,
        lorentz_distance: distance,
        critical,
    }
}

/// `min(|a₁ − a₂|, |a₁ + a₂|)`.
pub fn light_cone_relation(a: [f64; 2]) -> f64 {
    (a[0] - a[1]).abs().min((a[0] + a[1]).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Plane,
    Sphere,
    PseudoSphere,
    PseudoHyperbolic,
    LightCone,
    Quadric,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadricKind {
    Ellipsoid,
    OneSheetedHyperboloid,
    TwoSheetedHyperboloid,
    Cone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadric_kind: Option<QuadricKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Signed level `ρ` of `(x − P, x − P) = ρ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 2]>,
    /// Euclidean normal of the containing plane.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plane_normal: Option<[f64; 3]>,
    pub residual: f64,
    pub diagnostics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl MembershipReport {
    fn none(residual: f64) -> Self {
        MembershipReport {
            verdict: Verdict::None,
            quadric_kind: None,
            center: None,
            radius: None,
            rho: None,
            a: None,
            plane_normal: None,
            residual,
            diagnostics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn center_vector(&self) -> Option<Vector3<f64>> {
        self.center.map(Vector3::from)
    }

    fn diag(&mut self, key: &str, v: f64) {
        self.diagnostics.insert(key.to_string(), v);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DetectOptions {
    pub tol: FitTolerances,
    /// Resolves the sphere when the development is a single point: among the
    /// pencil of spheres through such a curve, pick the one centred here.
    pub center_hint: Option<Vector3<f64>>,
}

fn constant_metric(ff: &FrameField) -> Result<PseudoMetric> {
    ff.param_curve()
        .constant_metric()
        .cloned()
        .ok_or_else(|| Error::UnsupportedMetric("membership tests need a constant metric".into()))
}

fn mean_and_spread(points: &[Vector3<f64>]) -> (Vector3<f64>, f64) {
    let n = points.len() as f64;
    let mean = points.iter().sum::<Vector3<f64>>() / n;
    let spread = (points.iter().map(|p| (p - mean).norm_squared()).sum::<f64>() / n).sqrt();
    (mean, spread)
}

/// Plane criterion: development on a line through the origin.
pub fn detect_plane(ff: &FrameField, opts: &DetectOptions) -> Result<MembershipReport> {
    let nd = normal_development(ff)?;
    let g = constant_metric(ff)?;
    let scale = 1.0 + nd.max_abs();
    let mut m = Matrix2::zeros();
    for p in &nd.points {
        m += Matrix2::new(p[0] * p[0], p[0] * p[1], p[0] * p[1], p[1] * p[1]);
    }
    m /= nd.len() as f64;
    let eig = SymmetricEigen::new(m);
    let imin = if eig.eigenvalues[0] <= eig.eigenvalues[1] { 0 } else { 1 };
    let u = eig.eigenvectors.column(imin);
    let rms = eig.eigenvalues[imin].max(0.0).sqrt();
    let mut report = MembershipReport::none(rms);
    report.diag("origin_line_rms", rms);
    if rms > opts.tol.fit * scale {
        return Ok(report);
    }
    let normals: Vec<Vector3<f64>> = ff
        .triads()
        .iter()
        .map(|e| {
            let n = e[1] * u[0] + e[2] * u[1];
            let co = g.matrix() * n;
            co / co.norm()
        })
        .collect();
    // fix the sign ambiguity of the covector at each point
    let reference = normals[0];
    let aligned: Vec<Vector3<f64>> = normals.iter().map(|n| if n.dot(&reference) < 0.0 { -n } else { *n }).collect();
    let (mean, spread) = mean_and_spread(&aligned);
    report.diag("plane_normal_spread", spread);
    let offsets: Vec<f64> = ff.positions().iter().map(|p| p.dot(&mean)).collect();
    let off_mean = offsets.iter().sum::<f64>() / offsets.len() as f64;
    let off_spread = (offsets.iter().map(|o| (o - off_mean).powi(2)).sum::<f64>() / offsets.len() as f64).sqrt();
    report.diag("plane_offset_spread", off_spread);
    report.verdict = Verdict::Plane;
    report.plane_normal = Some((mean / mean.norm()).into());
    report.residual = rms + spread;
    Ok(report)
}

/// Sphere criterion in the frame's (constant) metric.
pub fn detect_sphere(ff: &FrameField, opts: &DetectOptions) -> Result<MembershipReport> {
    let nd = normal_development(ff)?;
    let g = constant_metric(ff)?;
    let scale = 1.0 + nd.max_abs();
    let [eps, e1, e2] = nd.signs;
    let mut fit = fit_line_with(&nd, &opts.tol)?;
    let mut notes = Vec::new();
    if fit.degenerate {
        notes.push("normal development is a single point; the sphere is one of a pencil".to_string());
        if let Some(p) = opts.center_hint {
            let a = hinted_coefficients(ff, &g, &p);
            let c = [1.0, eps * a[0], eps * a[1]];
            let hinted = line_fit_from(&nd, c, true, &opts.tol);
            if hinted.rms_residual <= opts.tol.fit * scale {
                notes.push("pencil resolved by the supplied center".to_string());
                fit = hinted;
            } else {
                notes.push("supplied center is inconsistent with the development".to_string());
            }
        }
    }
    let plane = detect_plane(ff, opts)?;

    let mut report = MembershipReport::none(fit.rms_residual);
    report.notes = notes;
    report.diag("line_rms", fit.rms_residual);
    report.diag("line_c0", fit.coefficients[0]);
    report.diag("max_abs_kappa", nd.max_abs());
    report.diag("degenerate_development", if fit.degenerate { 1.0 } else { 0.0 });
    for (k, v) in &plane.diagnostics {
        report.diagnostics.insert(k.clone(), *v);
    }
    if plane.verdict == Verdict::Plane {
        report.diag("plane_criterion", 1.0);
    } else {
        report.diag("plane_criterion", 0.0);
    }

    if fit.rms_residual > opts.tol.fit * scale {
        report.notes.push("normal development is not a line".to_string());
        return Ok(report);
    }
    if fit.through_origin {
        if plane.verdict == Verdict::Plane {
            report.verdict = Verdict::Plane;
            report.plane_normal = plane.plane_normal;
            report.residual = plane.residual;
        }
        return Ok(report);
    }
    let a = fit.a.expect("off-origin fits carry coefficients");
    let rho = fit.rho.expect("off-origin fits carry rho");
    let centers: Vec<Vector3<f64>> =
        ff.positions().iter().zip(ff.triads()).map(|(p, e)| p - e[1] * a[0] - e[2] * a[1]).collect();
    let (center, spread) = mean_and_spread(&centers);
    report.diag("center_spread", spread);
    report.diag("rho", rho);
    report.diag("a1", a[0]);
    report.diag("a2", a[1]);
    report.diag("light_cone_relation", light_cone_relation(a));
    report.residual = fit.rms_residual + spread;
    let radius_scale = 1.0 + a[0].abs() + a[1].abs();
    if spread > opts.tol.fit * radius_scale {
        report.notes.push("center estimate is not constant along the curve".to_string());
        return Ok(report);
    }
    report.verdict = if g.index() == 0 {
        Verdict::Sphere
    } else if fit.critical {
        Verdict::LightCone
    } else if rho > 0.0 {
        Verdict::PseudoSphere
    } else {
        Verdict::PseudoHyperbolic
    };
    if e1 == e2 && report.verdict == Verdict::LightCone {
        report.verdict = Verdict::None;
    }
    report.center = Some(center.into());
    report.radius = Some(if fit.critical { 0.0 } else { rho.abs().sqrt() });
    report.rho = Some(if fit.critical { 0.0 } else { rho });
    report.a = Some(a);
    if plane.verdict == Verdict::Plane {
        report.notes.push("curve is also planar".to_string());
    }
    Ok(report)
}

/// `aᵢ = εᵢ (α − P, nᵢ)` averaged over the grid.
fn hinted_coefficients(ff: &FrameField, g: &PseudoMetric, p: &Vector3<f64>) -> [f64; 2] {
    let [_, e1, e2] = ff.signs();
    let n = ff.len() as f64;
    let mut a = [0.0; 2];
    for (x, e) in ff.positions().iter().zip(ff.triads()) {
        let d = x - p;
        a[0] += e1 * g.inner(&d, &e[1]) / n;
        a[1] += e2 * g.inner(&d, &e[2]) / n;
    }
    a
}

/// Criterion for lightlike curves: on a pseudo-sphere or light-cone the null
/// curvature `κ₁` vanishes. The converse fails, so a candidate `(P, ρ)` is
/// checked directly when supplied.
pub fn lightlike_sphere_test(
    ff: &FrameField,
    candidate: Option<(Vector3<f64>, f64)>,
    tol: &FitTolerances,
) -> Result<MembershipReport> {
    if ff.kind() != FrameKind::Null {
        return Err(Error::WrongFrameKind { expected: "null", found: ff.kind().name().into() });
    }
    let g = constant_metric(ff)?;
    let max_k1 = ff.coeffs().iter().fold(0.0f64, |m, c| m.max(c[0].abs()));
    let mut report = MembershipReport::none(max_k1);
    report.diag("max_abs_kappa1", max_k1);
    let consistent = max_k1 <= tol.null_curvature;
    report.diag("kappa1_vanishes", if consistent { 1.0 } else { 0.0 });
    if !consistent {
        report.notes.push("null curvature is nonzero: the curve lies on no pseudo-sphere or light-cone".into());
        return Ok(report);
    }
    report.notes.push("curve is a straight lightlike line".into());
    let Some((p, rho)) = candidate else {
        report.notes.push("no candidate surface supplied; membership not verified".into());
        return Ok(report);
    };
    let mut worst = 0.0f64;
    let mut scale = 1.0 + rho.abs();
    for x in ff.positions() {
        let d = x - p;
        worst = worst.max((g.norm_sq(&d) - rho).abs());
        scale = scale.max(1.0 + d.norm_squared());
    }
    report.diag("membership_defect", worst);
    report.residual = worst;
    if worst <= tol.membership * scale {
        report.verdict = if rho.abs() <= tol.membership * scale {
            Verdict::LightCone
        } else if rho > 0.0 {
            Verdict::PseudoSphere
        } else {
            Verdict::PseudoHyperbolic
        };
        report.center = Some(p.into());
        report.rho = Some(rho);
        report.radius = Some(rho.abs().sqrt());
    } else {
        report.notes.push("candidate surface does not contain the curve".into());
    }
    Ok(report)
}

/// Lightlike directions tangent to `(x − P, x − P) = ρ` at `p0`, scaled so
/// that their largest component is `+1`.
pub fn lightlike_ruling_directions(
    center: &Vector3<f64>,
    rho: f64,
    p0: &Vector3<f64>,
    metric: &PseudoMetric,
) -> Result<[Vector3<f64>; 2]> {
    let w = p0 - center;
    let defect = (metric.norm_sq(&w) - rho).abs();
    if defect > 1e-9 * (1.0 + rho.abs() + w.norm_squared()) {
        return Err(Error::NotOnSurface { defect });
    }
    if w.norm() == 0.0 {
        return Err(Error::Invalid("point coincides with the center".into()));
    }
    let (p, q) = metric.orthogonal_complement(&w)?;
    let dirs = metric.null_directions(&p, &q)?;
    Ok(dirs.map(|d| {
        let big = d.iter().fold(0.0f64, |m, x| if x.abs() > m.abs() { *x } else { m });
        d / big
    }))
}

/// The lightlike straight line through `p0` lying on `(x − P, x − P) = ρ`.
/// `which` selects one of the (at most two) rulings.
pub fn lightlike_ruling(
    center: &Vector3<f64>,
    rho: f64,
    p0: &Vector3<f64>,
    metric: &PseudoMetric,
    which: usize,
    domain: (f64, f64),
    n_samples: usize,
) -> Result<Curve> {
    let dirs = lightlike_ruling_directions(center, rho, p0, metric)?;
    let u = dirs[which.min(1)];
    Curve::from_family(Family::line((*p0).into(), u.into()), domain, n_samples)
}

/// Membership in `⟨B(x − P), x − P⟩ = r²`, using `⟨B·,·⟩` (or its negative)
/// as the ambient metric.
pub fn detect_quadric(
    curve: &Curve,
    b: &Matrix3<f64>,
    center: &Vector3<f64>,
    opts: &DetectOptions,
) -> Result<MembershipReport> {
    let base = PseudoMetric::from_matrix(*b)?;
    let positive = 3 - base.index();
    let (metric, flip) = if base.index() >= 2 { (base.negated(), -1.0) } else { (base.clone(), 1.0) };
    let metric = metric.with_causal_tolerance(opts.tol.membership.max(crate::pseudo_metric::DEFAULT_CAUSAL_TOLERANCE));
    let direct = |pts: &[Vector3<f64>]| -> (f64, f64) {
        let vals: Vec<f64> = pts.iter().map(|x| base.norm_sq(&(x - center))).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let dev = vals.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
        (mean, dev)
    };
    let causal = profile_causal(curve, &metric)?;
    let mut report = if causal == CausalCharacter::Lightlike {
        let field: Arc<dyn crate::pseudo_metric::MetricField> = Arc::new(metric.clone());
        let pc = match reparametrize_in(curve, field.clone(), ReparamOptions::default()) {
            Ok(pc) => pc,
            Err(Error::StraightLight) => ParamCurve::raw(curve, field)?,
            Err(e) => return Err(e),
        };
        let ff = null_frame(&Arc::new(pc))?;
        let (mean, _) = direct(ff.positions());
        let mut r = lightlike_sphere_test(&ff, Some((*center, flip * mean)), &opts.tol)?;
        r.notes.push("curve is asymptotic (lightlike in the quadric metric)".into());
        if let Some(rho) = r.rho {
            r.rho = Some(flip * rho);
        }
        r
    } else {
        let pc = reparametrize_in(curve, Arc::new(metric.clone()), ReparamOptions::default())?;
        let ff = bishop(&Arc::new(pc), BishopGauge::default())?;
        let mut o = *opts;
        o.center_hint = Some(*center);
        let mut r = detect_sphere(&ff, &o)?;
        if let Some(rho) = r.rho {
            r.rho = Some(flip * rho);
        }
        if let Some(c) = r.center_vector() {
            let err = (c - center).norm();
            r.diag("center_error", err);
            if err > opts.tol.fit * (1.0 + center.norm() + r.radius.unwrap_or(0.0)) * 10.0 {
                r.notes.push("curve lies on a quadric with a different center".into());
                r.verdict = Verdict::None;
            }
        }
        let (_, dev) = direct(ff.positions());
        r.diag("direct_defect", dev);
        r
    };
    if matches!(
        report.verdict,
        Verdict::Sphere | Verdict::PseudoSphere | Verdict::PseudoHyperbolic | Verdict::LightCone
    ) {
        let rho = report.rho.unwrap_or(0.0);
        report.quadric_kind = Some(quadric_kind(positive, rho, report.verdict == Verdict::LightCone));
        report.verdict = Verdict::Quadric;
        report.center = Some((*center).into());
    } else if report.verdict == Verdict::Plane {
        report.notes.push("curve is planar but not on the quadric".into());
        report.verdict = Verdict::None;
    }
    Ok(report)
}

fn quadric_kind(positive: usize, rho: f64, cone: bool) -> QuadricKind {
    if cone {
        return QuadricKind::Cone;
    }
    match (positive, rho > 0.0) {
        (3, _) | (0, _) => QuadricKind::Ellipsoid,
        (2, true) | (1, false) => QuadricKind::OneSheetedHyperboloid,
        _ => QuadricKind::TwoSheetedHyperboloid,
    }
}
