//! Frenet, Bishop (relatively parallel) and null frames along reparametrized
//! curves.
//!
//! Every frame field stores a triad `(e₀, e₁, e₂)` with `e₀ = α′` at each grid
//! point together with motion coefficients. Writing `K` for the skew matrix
//! `Kᵢⱼ = (eᵢ′, eⱼ)` and `E = [(eᵢ, eⱼ)]` for the constant Gram matrix, the
//! frame moves by `e′ = K E⁻¹ e`. Along position-dependent metrics `′` is the
//! covariant derivative `D/ds`.

use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::curves::{CurvePoint, ParamCurve, ParamKind};
use crate::error::{Error, Result};
use crate::numeric::{fd_derivative, trapezoid};
use crate::pseudo_metric::{contract_christoffel, smallest_axis, CausalCharacter, Christoffel, PseudoMetric};

/// Tolerance for the orthogonality of a user-supplied initial normal.
pub const GAUGE_ORTHOGONALITY_TOL: f64 = 1e-8;

/// Euclidean size of `t′` below which the Frenet frame is undefined.
pub const VANISHING_CURVATURE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    Frenet,
    Bishop,
    Null,
}

impl FrameKind {
    pub fn name(self) -> &'static str {
        match self {
            FrameKind::Frenet => "frenet",
            FrameKind::Bishop => "bishop",
            FrameKind::Null => "null",
        }
    }
}

/// Which of the three Frenet constructions applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrenetCase {
    /// `t` and `t′` non-null: `n = t′/‖t′‖`, `b = t × n`.
    Regular,
    /// `t` spacelike, `t′` lightlike: `n = t′`, `b` null with `(n, b) = -1`.
    LightlikeNormal,
    /// `t` lightlike: `n = t′`, `b` null with `(t, b) = -1`.
    LightlikeTangent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NullGauge {
    /// `z₁ = t′`; then `κ₁ = 1` and `κ₃ = 0`.
    #[default]
    Frenet,
    /// `z₁` transported with `κ₂ = 0`; the only choice along straight lines.
    Transported,
}

/// Initial data of a Bishop frame: an optional normal `n₁(s₀)` and a constant
/// rotation angle, circular or hyperbolic according to the normal plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BishopGauge {
    pub initial_normal: Option<Vector3<f64>>,
    pub angle: f64,
}

impl BishopGauge {
    pub fn with_normal(n: Vector3<f64>) -> Self {
        BishopGauge { initial_normal: Some(n), angle: 0.0 }
    }

    pub fn with_angle(angle: f64) -> Self {
        BishopGauge { initial_normal: None, angle }
    }
}

#[derive(Debug, Clone)]
pub struct FrameField {
    pc: Arc<ParamCurve>,
    kind: FrameKind,
    frenet_case: Option<FrenetCase>,
    null_gauge: Option<NullGauge>,
    grid: Vec<f64>,
    positions: Vec<Vector3<f64>>,
    triads: Vec<[Vector3<f64>; 3]>,
    coeffs: Vec<[f64; 3]>,
    gram: Matrix3<f64>,
}

impl FrameField {
    pub fn param_curve(&self) -> &Arc<ParamCurve> {
        &self.pc
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn frenet_case(&self) -> Option<FrenetCase> {
        self.frenet_case
    }

    pub fn null_gauge(&self) -> Option<NullGauge> {
        self.null_gauge
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn positions(&self) -> &[Vector3<f64>] {
        &self.positions
    }

    pub fn triads(&self) -> &[[Vector3<f64>; 3]] {
        &self.triads
    }

    /// Motion coefficients per grid point: Frenet `(κ, τ, 0)`, Bishop
    /// `(κ₁, κ₂, 0)`, null `(κ₁, κ₂, κ₃)`.
    pub fn coeffs(&self) -> &[[f64; 3]] {
        &self.coeffs
    }

    pub fn coeff_names(&self) -> &'static [&'static str] {
        match self.kind {
            FrameKind::Frenet => &["kappa", "tau"],
            FrameKind::Bishop => &["kappa1", "kappa2"],
            FrameKind::Null => &["kappa1", "kappa2", "kappa3"],
        }
    }

    /// The prescribed Gram matrix `E`.
    pub fn gram(&self) -> &Matrix3<f64> {
        &self.gram
    }

    /// `(ε, ε₁, ε₂)`: diagonal of the Gram matrix.
    pub fn signs(&self) -> [f64; 3] {
        [self.gram[(0, 0)], self.gram[(1, 1)], self.gram[(2, 2)]]
    }

    /// Gram matrix of the stored triad at grid index `i`.
    pub fn gram_at(&self, i: usize) -> Matrix3<f64> {
        let g = self.pc.metric().matrix_at(&self.positions[i]);
        let e = &self.triads[i];
        Matrix3::from_fn(|a, b| e[a].dot(&(g * e[b])))
    }

    /// `max_s ‖E(s) − E(s₀)‖_∞`.
    pub fn gram_drift(&self) -> f64 {
        let e0 = self.gram_at(0);
        (0..self.len()).map(|i| (self.gram_at(i) - e0).amax()).fold(0.0, f64::max)
    }

    /// Rebuilds a frame field from stored data, e.g. after import.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        pc: Arc<ParamCurve>,
        kind: FrameKind,
        frenet_case: Option<FrenetCase>,
        grid: Vec<f64>,
        positions: Vec<Vector3<f64>>,
        triads: Vec<[Vector3<f64>; 3]>,
        coeffs: Vec<[f64; 3]>,
        gram: Matrix3<f64>,
    ) -> Result<Self> {
        let n = grid.len();
        if positions.len() != n || triads.len() != n || coeffs.len() != n {
            return Err(Error::Format("frame arrays have different lengths".into()));
        }
        Ok(FrameField { pc, kind, frenet_case, null_gauge: None, grid, positions, triads, coeffs, gram })
    }

    /// Skew matrix `K` at grid index `i`.
    fn skew(&self, i: usize) -> Matrix3<f64> {
        let c = self.coeffs[i];
        let (k01, k02, k12) = match (self.kind, self.frenet_case) {
            (FrameKind::Bishop, _) => (c[0], c[1], 0.0),
            (FrameKind::Null, _) => (c[0], -c[2], c[1]),
            (FrameKind::Frenet, Some(FrenetCase::LightlikeNormal)) => (0.0, -1.0, -c[1]),
            (FrameKind::Frenet, Some(FrenetCase::LightlikeTangent)) => (1.0, 0.0, c[1]),
            (FrameKind::Frenet, _) => (c[0], 0.0, c[1]),
        };
        Matrix3::new(0.0, k01, k02, -k01, 0.0, k12, -k02, -k12, 0.0)
    }

    /// Coefficient matrix `C = K E⁻¹` of `e′ = C e` at grid index `i`.
    pub fn motion_matrix(&self, i: usize) -> Matrix3<f64> {
        let e_inv = self.gram.try_inverse().expect("frame Gram matrix is invertible");
        self.skew(i) * e_inv
    }

    fn grid_step(&self) -> Result<f64> {
        if self.len() < 7 {
            return Err(Error::Invalid("diagnostics need at least 7 grid points".into()));
        }
        Ok(self.grid[1] - self.grid[0])
    }

    /// Covariant finite-difference derivative of leg `k` along the grid.
    fn leg_derivative(&self, k: usize) -> Result<Vec<Vector3<f64>>> {
        let h = self.grid_step()?;
        let legs: Vec<Vector3<f64>> = self.triads.iter().map(|e| e[k]).collect();
        let mut d = fd_derivative(&legs, h);
        if self.pc.constant_metric().is_none() {
            for (i, di) in d.iter_mut().enumerate() {
                let gamma = self.pc.metric().christoffel_at(&self.positions[i]);
                *di += contract_christoffel(&gamma, &self.triads[i][0], &legs[i]);
            }
        }
        Ok(d)
    }

    /// Largest mismatch between finite-difference derivatives of the triad
    /// and the motion equations `e′ = C e`.
    pub fn motion_residual(&self) -> Result<f64> {
        let derivs: Vec<Vec<Vector3<f64>>> = (0..3).map(|k| self.leg_derivative(k)).collect::<Result<_>>()?;
        let mut worst = 0.0f64;
        for i in 0..self.len() {
            let c = self.motion_matrix(i);
            let e = &self.triads[i];
            for a in 0..3 {
                let predicted = e[0] * c[(a, 0)] + e[1] * c[(a, 1)] + e[2] * c[(a, 2)];
                worst = worst.max((derivs[a][i] - predicted).amax());
            }
        }
        Ok(worst)
    }

    /// For Bishop frames, `max ‖nᵢ′ − (nᵢ′, t) t / (t, t)‖` over the grid.
    pub fn relatively_parallel_defect(&self) -> Result<f64> {
        self.expect_kind(FrameKind::Bishop)?;
        let mut worst = 0.0f64;
        for k in 1..3 {
            let d = self.leg_derivative(k)?;
            for (i, di) in d.iter().enumerate() {
                let g = self.pc.metric().matrix_at(&self.positions[i]);
                let t = self.triads[i][0];
                let along = t * (di.dot(&(g * t)) / t.dot(&(g * t)));
                worst = worst.max((di - along).norm());
            }
        }
        Ok(worst)
    }

    pub(crate) fn expect_kind(&self, kind: FrameKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::WrongFrameKind { expected: kind.name(), found: self.kind.name().into() });
        }
        Ok(())
    }

    /// Integrates `α′ = e₀`, `e′ = C e` from the initial triad and the stored
    /// coefficients, returning positions at every other grid point.
    pub fn reconstruct(&self) -> Result<Vec<(f64, Vector3<f64>)>> {
        if self.pc.constant_metric().is_none() {
            return Err(Error::UnsupportedMetric("reconstruction needs a constant metric".into()));
        }
        let h = self.grid_step()?;
        type State = (Vector3<f64>, [Vector3<f64>; 3]);
        let rhs = |i: usize, y: &State| -> State {
            let c = self.motion_matrix(i);
            let e = &y.1;
            let de = std::array::from_fn(|a| e[0] * c[(a, 0)] + e[1] * c[(a, 1)] + e[2] * c[(a, 2)]);
            (e[0], de)
        };
        let axpy =
            |y: &State, k: &State, s: f64| -> State { (y.0 + k.0 * s, std::array::from_fn(|a| y.1[a] + k.1[a] * s)) };
        let mut y: State = (self.positions[0], self.triads[0]);
        let mut out = vec![(self.grid[0], y.0)];
        let mut i = 0;
        while i + 2 < self.len() {
            let step = 2.0 * h;
            let k1 = rhs(i, &y);
            let k2 = rhs(i + 1, &axpy(&y, &k1, 0.5 * step));
            let k3 = rhs(i + 1, &axpy(&y, &k2, 0.5 * step));
            let k4 = rhs(i + 2, &axpy(&y, &k3, step));
            y.0 += (k1.0 + (k2.0 + k3.0) * 2.0 + k4.0) * (step / 6.0);
            for a in 0..3 {
                y.1[a] += (k1.1[a] + (k2.1[a] + k3.1[a]) * 2.0 + k4.1[a]) * (step / 6.0);
            }
            i += 2;
            out.push((self.grid[i], y.0));
        }
        Ok(out)
    }
}

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn sample_points(pc: &ParamCurve) -> Result<Vec<CurvePoint>> {
    pc.sample()
}

/// Frenet frame. Needs a constant metric.
pub fn frenet(pc: &Arc<ParamCurve>) -> Result<FrameField> {
    let g = pc
        .constant_metric()
        .ok_or_else(|| Error::UnsupportedMetric("Frenet frames need a constant metric".into()))?
        .clone();
    if pc.kind() == ParamKind::Raw {
        return Err(Error::StraightLight);
    }
    let pts = sample_points(pc)?;
    let mut case: Option<(FrenetCase, f64)> = None;
    let mut triads = Vec::with_capacity(pts.len());
    let mut coeffs = Vec::with_capacity(pts.len());
    for p in &pts {
        let t = p.d1;
        let tp = p.d2;
        if tp.norm() <= VANISHING_CURVATURE_TOL {
            if pc.causal() == CausalCharacter::Lightlike {
                return Err(Error::StraightLight);
            }
            return Err(Error::VanishingCurvature { s: p.s });
        }
        let q = g.norm_sq(&tp);
        let this_case = if pc.causal() == CausalCharacter::Lightlike {
            if g.classify_value(q, tp.norm_squared()) != CausalCharacter::Spacelike {
                return Err(Error::StraightLight);
            }
            FrenetCase::LightlikeTangent
        } else if g.classify_value(q, tp.norm_squared()) == CausalCharacter::Lightlike {
            FrenetCase::LightlikeNormal
        } else {
            FrenetCase::Regular
        };
        let eta = sign(q);
        match case {
            None => case = Some((this_case, eta)),
            Some((c, e)) => {
                if c != this_case || (c == FrenetCase::Regular && e != eta) {
                    return Err(Error::MixedNormalCharacter { s: p.s });
                }
            }
        }
        match this_case {
            FrenetCase::Regular => {
                let norm = q.abs().sqrt();
                let n = tp / norm;
                let b = g.normalize(&g.cross(&t, &n)).ok_or(Error::DependentVectors)?;
                triads.push([t, n, b]);
                coeffs.push([g.inner(&tp, &n), g.inner(&p.d3, &b) / norm, 0.0]);
            }
            FrenetCase::LightlikeNormal => {
                let n = tp;
                let b = g.null_partner(&n, &t);
                triads.push([t, n, b]);
                coeffs.push([g.inner(&tp, &n), -g.inner(&p.d3, &b), 0.0]);
            }
            FrenetCase::LightlikeTangent => {
                let n = tp;
                let b = g.null_partner(&t, &n);
                triads.push([t, n, b]);
                coeffs.push([g.inner(&tp, &n), g.inner(&p.d3, &b), 0.0]);
            }
        }
    }
    let (fcase, eta) = case.ok_or_else(|| Error::Invalid("empty grid".into()))?;
    let eps = sign(g.norm_sq(&pts[0].d1));
    let gram = match fcase {
        FrenetCase::Regular => {
            let b_sign = sign(g.norm_sq(&triads[0][2]));
            Matrix3::from_diagonal(&Vector3::new(eps, eta, b_sign))
        }
        FrenetCase::LightlikeNormal => Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, -1.0, 0.0),
        FrenetCase::LightlikeTangent => Matrix3::new(0.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0),
    };
    Ok(FrameField {
        pc: pc.clone(),
        kind: FrameKind::Frenet,
        frenet_case: Some(fcase),
        null_gauge: None,
        grid: pts.iter().map(|p| p.s).collect(),
        positions: pts.iter().map(|p| p.position).collect(),
        triads,
        coeffs,
        gram,
    })
}

/// Geometric data of the curve needed by the Bishop transport.
struct Local {
    position: Vector3<f64>,
    t: Vector3<f64>,
    /// Covariant acceleration `Dt/ds`.
    dt: Vector3<f64>,
    g: Matrix3<f64>,
    gamma: Option<Christoffel>,
}

fn local(pc: &ParamCurve, s: f64) -> Result<Local> {
    let p = pc.point(s)?;
    let metric = pc.metric();
    let g = metric.matrix_at(&p.position);
    let gamma = if metric.as_constant().is_some() { None } else { Some(metric.christoffel_at(&p.position)) };
    let dt = match &gamma {
        Some(gm) => p.d2 + contract_christoffel(gm, &p.d1, &p.d1),
        None => p.d2,
    };
    Ok(Local { position: p.position, t: p.d1, dt, g, gamma })
}

fn ip(g: &Matrix3<f64>, u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
    u.dot(&(g * v))
}

/// Normal legs at the start of the curve, before the gauge angle.
fn initial_normals(
    l: &Local,
    metric: &PseudoMetric,
    eps: f64,
    lorentz_normal: bool,
    gauge: &BishopGauge,
) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let g = &l.g;
    let t = l.t;
    let n1 = match gauge.initial_normal {
        Some(n) => {
            let scale = n.norm() * t.norm() * metric.spectral_radius();
            if n.norm() == 0.0 || ip(g, &n, &t).abs() > GAUGE_ORTHOGONALITY_TOL * scale.max(1e-300) {
                return Err(Error::InvalidGauge("initial normal is not orthogonal to the tangent".into()));
            }
            let c = metric.classify_vector(&n)?;
            let wanted = if lorentz_normal { CausalCharacter::Timelike } else { CausalCharacter::Spacelike };
            if c != wanted {
                return Err(Error::InvalidGauge(format!("initial normal must be {wanted:?}, got {c:?}")));
            }
            metric.normalize(&n).ok_or(Error::ZeroVector)?
        }
        None => {
            let e = smallest_axis(&t.normalize());
            let cand = e - t * (eps * ip(g, &e, &t));
            let q = ip(g, &cand, &cand);
            let near_null = q.abs() <= 1e-3 * cand.norm_squared() * metric.spectral_radius();
            if lorentz_normal && near_null {
                normal_eigen_direction(metric, &t, true)?
            } else if lorentz_normal && q > 0.0 {
                let other = metric.cross(&t, &cand);
                metric.normalize(&other).ok_or(Error::DependentVectors)?
            } else if near_null {
                normal_eigen_direction(metric, &t, false)?
            } else {
                metric.normalize(&cand).ok_or(Error::DependentVectors)?
            }
        }
    };
    let n2 = metric.normalize(&metric.cross(&t, &n1)).ok_or(Error::DependentVectors)?;
    Ok((n1, n2))
}

/// Eigen-direction of the metric restricted to the normal plane: the
/// negative one when `timelike`, otherwise the positive one.
fn normal_eigen_direction(metric: &PseudoMetric, t: &Vector3<f64>, timelike: bool) -> Result<Vector3<f64>> {
    let (p, q) = metric.orthogonal_complement(t)?;
    let gram =
        nalgebra::Matrix2::new(metric.inner(&p, &p), metric.inner(&p, &q), metric.inner(&q, &p), metric.inner(&q, &q));
    let eig = gram.symmetric_eigen();
    let pick = if (eig.eigenvalues[0] < eig.eigenvalues[1]) == timelike { 0 } else { 1 };
    let c = eig.eigenvectors.column(pick);
    let mut v = p * c[0] + q * c[1];
    if v.iter().fold(0.0f64, |m, x| if x.abs() > m.abs() { *x } else { m }) < 0.0 {
        v = -v;
    }
    metric.normalize(&v).ok_or(Error::DependentVectors)
}

/// RK4 steps per grid interval of the Bishop transport.
const BISHOP_SUBSTEPS: usize = 4;

/// Bishop frame along a spacelike or timelike curve.
pub fn bishop(pc: &Arc<ParamCurve>, gauge: BishopGauge) -> Result<FrameField> {
    if pc.causal() == CausalCharacter::Lightlike {
        return Err(Error::LightlikeCurve);
    }
    if pc.kind() != ParamKind::ArcLength {
        return Err(Error::Invalid("Bishop frames need an arc-length parametrization".into()));
    }
    let grid = pc.grid().to_vec();
    let s0 = grid[0];
    let l0 = local(pc, s0)?;
    let metric0 = pc.metric().metric_at(&l0.position)?;
    if metric0.index() > 1 {
        return Err(Error::UnsupportedMetric(format!(
            "index {} metrics must be negated before framing",
            metric0.index()
        )));
    }
    let eps = sign(ip(&l0.g, &l0.t, &l0.t));
    let lorentz_normal = metric0.index() == 1 && eps > 0.0;
    let (n1, n2) = initial_normals(&l0, &metric0, eps, lorentz_normal, &gauge)?;
    let eps1 = sign(ip(&l0.g, &n1, &n1));
    let eps2 = sign(ip(&l0.g, &n2, &n2));

    let rhs = |l: &Local, n: &[Vector3<f64>; 2]| -> [Vector3<f64>; 2] {
        std::array::from_fn(|k| {
            let kappa = ip(&l.g, &l.dt, &n[k]);
            let mut d = -l.t * (eps * kappa);
            if let Some(gm) = &l.gamma {
                d -= contract_christoffel(gm, &l.t, &n[k]);
            }
            d
        })
    };
    let project = |l: &Local, n: &mut [Vector3<f64>; 2]| {
        let g = &l.g;
        let t = l.t;
        let mut a = n[0] - t * (eps * ip(g, &n[0], &t));
        a /= ip(g, &a, &a).abs().sqrt();
        let e1 = sign(ip(g, &a, &a));
        let mut b = n[1] - t * (eps * ip(g, &n[1], &t)) - a * (e1 * ip(g, &n[1], &a));
        b /= ip(g, &b, &b).abs().sqrt();
        *n = [a, b];
    };
    let coeff = |l: &Local, n: &[Vector3<f64>; 2]| [ip(&l.g, &l.dt, &n[0]), ip(&l.g, &l.dt, &n[1]), 0.0];

    let mut n = [n1, n2];
    let mut positions = vec![l0.position];
    let mut triads = vec![[l0.t, n[0], n[1]]];
    let mut coeffs = vec![coeff(&l0, &n)];
    let mut prev = l0;
    let add = |a: &[Vector3<f64>; 2], k: &[Vector3<f64>; 2], s: f64| -> [Vector3<f64>; 2] {
        [a[0] + k[0] * s, a[1] + k[1] * s]
    };
    for w in grid.windows(2) {
        let h = (w[1] - w[0]) / BISHOP_SUBSTEPS as f64;
        for j in 0..BISHOP_SUBSTEPS {
            let a = w[0] + h * j as f64;
            let mid = local(pc, a + 0.5 * h)?;
            let end = if j + 1 == BISHOP_SUBSTEPS { local(pc, w[1])? } else { local(pc, a + h)? };
            let k1 = rhs(&prev, &n);
            let k2 = rhs(&mid, &add(&n, &k1, 0.5 * h));
            let k3 = rhs(&mid, &add(&n, &k2, 0.5 * h));
            let k4 = rhs(&end, &add(&n, &k3, h));
            for k in 0..2 {
                n[k] += (k1[k] + (k2[k] + k3[k]) * 2.0 + k4[k]) * (h / 6.0);
            }
            project(&end, &mut n);
            prev = end;
        }
        let end = &prev;
        positions.push(end.position);
        triads.push([end.t, n[0], n[1]]);
        coeffs.push(coeff(end, &n));
    }
    let ff = FrameField {
        pc: pc.clone(),
        kind: FrameKind::Bishop,
        frenet_case: None,
        null_gauge: None,
        grid,
        positions,
        triads,
        coeffs,
        gram: Matrix3::from_diagonal(&Vector3::new(eps, eps1, eps2)),
    };
    if gauge.angle != 0.0 {
        regauge(&ff, gauge.angle)
    } else {
        Ok(ff)
    }
}

/// Rotates the normal legs of a Bishop frame by a constant angle: circular
/// when the normal plane is definite, hyperbolic when it is Lorentzian.
pub fn regauge(ff: &FrameField, angle: f64) -> Result<FrameField> {
    ff.expect_kind(FrameKind::Bishop)?;
    let [_, e1, e2] = ff.signs();
    let (a, b, c, d) = if e1 == e2 {
        let (s, co) = angle.sin_cos();
        (co, -s, s, co)
    } else {
        let (s, co) = (angle.sinh(), angle.cosh());
        (co, s, s, co)
    };
    let mut out = ff.clone();
    for (tr, k) in out.triads.iter_mut().zip(out.coeffs.iter_mut()) {
        let (n1, n2) = (tr[1], tr[2]);
        tr[1] = n1 * a + n2 * b;
        tr[2] = n1 * c + n2 * d;
        let (k1, k2) = (k[0], k[1]);
        k[0] = a * k1 + b * k2;
        k[1] = c * k1 + d * k2;
    }
    Ok(out)
}

/// Null frame along a lightlike curve. Straight lines use the transported
/// gauge on their own parameter; other curves the Frenet gauge.
pub fn null_frame(pc: &Arc<ParamCurve>) -> Result<FrameField> {
    let gauge = if pc.kind() == ParamKind::Raw { NullGauge::Transported } else { NullGauge::Frenet };
    null_frame_with(pc, gauge)
}

pub fn null_frame_with(pc: &Arc<ParamCurve>, gauge: NullGauge) -> Result<FrameField> {
    if pc.causal() != CausalCharacter::Lightlike {
        return Err(Error::NotLightlike);
    }
    let g = pc
        .constant_metric()
        .ok_or_else(|| Error::UnsupportedMetric("null frames need a constant metric".into()))?
        .clone();
    if g.index() != 1 {
        return Err(Error::UnsupportedMetric("null frames need an index-1 metric".into()));
    }
    let pts = sample_points(pc)?;
    let mut triads = Vec::with_capacity(pts.len());
    let mut coeffs = Vec::with_capacity(pts.len());
    match gauge {
        NullGauge::Frenet => {
            if pc.kind() != ParamKind::PseudoArcLength {
                return Err(Error::InvalidGauge(
                    "the Frenet null gauge needs a pseudo arc-length parametrization".into(),
                ));
            }
            for p in &pts {
                let z1 = p.d2;
                let z2 = g.null_partner(&p.d1, &z1);
                triads.push([p.d1, z1, z2]);
                coeffs.push([g.inner(&p.d2, &z1), g.inner(&p.d3, &z2), -g.inner(&z2, &p.d2)]);
            }
        }
        NullGauge::Transported => {
            let t0 = pts[0].d1;
            let z1 = normal_eigen_direction(&g, &t0, false)?;
            let mut z = [z1, g.null_partner(&t0, &z1)];
            let coeff = |p: &CurvePoint, z: &[Vector3<f64>; 2]| [g.inner(&p.d2, &z[0]), 0.0, -g.inner(&p.d2, &z[1])];
            let rhs = |p: &CurvePoint, z: &[Vector3<f64>; 2]| -> [Vector3<f64>; 2] {
                let k = coeff(p, z);
                [z[1] * k[0], -z[1] * k[2]]
            };
            triads.push([t0, z[0], z[1]]);
            coeffs.push(coeff(&pts[0], &z));
            for i in 1..pts.len() {
                let (a, b) = (&pts[i - 1], &pts[i]);
                let h = b.s - a.s;
                let mid = pc.point(a.s + 0.5 * h)?;
                let add = |x: &[Vector3<f64>; 2], k: &[Vector3<f64>; 2], s: f64| [x[0] + k[0] * s, x[1] + k[1] * s];
                let k1 = rhs(a, &z);
                let k2 = rhs(&mid, &add(&z, &k1, 0.5 * h));
                let k3 = rhs(&mid, &add(&z, &k2, 0.5 * h));
                let k4 = rhs(b, &add(&z, &k3, h));
                for k in 0..2 {
                    z[k] += (k1[k] + (k2[k] + k3[k]) * 2.0 + k4[k]) * (h / 6.0);
                }
                let t = b.d1;
                let mut z1 = z[0] + z[1] * g.inner(&z[0], &t);
                z1 /= g.norm_sq(&z1).abs().sqrt();
                z = [z1, g.null_partner(&t, &z1)];
                triads.push([t, z[0], z[1]]);
                coeffs.push(coeff(b, &z));
            }
        }
    }
    Ok(FrameField {
        pc: pc.clone(),
        kind: FrameKind::Null,
        frenet_case: None,
        null_gauge: Some(gauge),
        grid: pts.iter().map(|p| p.s).collect(),
        positions: pts.iter().map(|p| p.position).collect(),
        triads,
        coeffs,
        gram: Matrix3::new(0.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0),
    })
}

/// Total rotation `∫ τ ds` of a Bishop frame relative to the Frenet frame.
pub fn holonomy(ff: &FrameField) -> Result<f64> {
    ff.expect_kind(FrameKind::Bishop)?;
    let fr = frenet(ff.param_curve())?;
    if fr.frenet_case() != Some(FrenetCase::Regular) {
        return Err(Error::VanishingCurvature { s: fr.grid()[0] });
    }
    let tau: Vec<f64> = fr.coeffs().iter().map(|c| c[1]).collect();
    Ok(trapezoid(fr.grid(), &tau))
}
