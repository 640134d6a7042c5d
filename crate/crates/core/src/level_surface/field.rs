//! Scalar fields with derivatives to third order, and the Hessian metric
//! they induce.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use super::Polynomial;
use crate::error::{Error, Result};
use crate::jet::{Jet, JetVec};
use crate::pseudo_metric::{Christoffel, MetricField, PseudoMetric, DEFAULT_CAUSAL_TOLERANCE};

/// Eigenvalues below this fraction of the largest one mark a degenerate
/// Hessian.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug)]
struct PolyDerivs {
    f: Polynomial,
    grad: [Polynomial; 3],
    hess: [[Polynomial; 3]; 3],
    third: [[[Polynomial; 3]; 3]; 3],
}

type Evaluator = dyn Fn(&Vector3<f64>) -> f64 + Send + Sync;

#[derive(Clone)]
enum Repr {
    Poly(Arc<PolyDerivs>),
    BlackBox { name: String, f: Arc<Evaluator> },
}

/// A smooth scalar field on R³. Polynomial fields differentiate exactly;
/// black-box fields use central differences with step
/// `ε^{1/4} (1 + ‖p‖)` at every order.
#[derive(Clone)]
pub struct ScalarField {
    repr: Repr,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Poly(p) => f.debug_tuple("ScalarField::Polynomial").field(&p.f).finish(),
            Repr::BlackBox { name, .. } => f.debug_tuple("ScalarField::BlackBox").field(name).finish(),
        }
    }
}

impl From<Polynomial> for ScalarField {
    fn from(p: Polynomial) -> Self {
        ScalarField::polynomial(p)
    }
}

impl ScalarField {
    pub fn polynomial(f: Polynomial) -> Self {
        let grad: [Polynomial; 3] = std::array::from_fn(|i| f.derivative(i));
        let hess: [[Polynomial; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| grad[i].derivative(j)));
        let third = std::array::from_fn(|l| std::array::from_fn(|i| std::array::from_fn(|j| hess[i][j].derivative(l))));
        ScalarField { repr: Repr::Poly(Arc::new(PolyDerivs { f, grad, hess, third })) }
    }

    pub fn black_box<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Vector3<f64>) -> f64 + Send + Sync + 'static,
    {
        ScalarField { repr: Repr::BlackBox { name: name.into(), f: Arc::new(f) } }
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        match &self.repr {
            Repr::Poly(p) => Some(&p.f),
            Repr::BlackBox { .. } => None,
        }
    }

    /// Fields of degree at most two have a constant Hessian.
    pub fn has_constant_hessian(&self) -> bool {
        self.as_polynomial().is_some_and(|p| p.degree() <= 2)
    }

    pub fn fd_step(p: &Vector3<f64>) -> f64 {
        f64::EPSILON.powf(0.25) * (1.0 + p.norm())
    }

    pub fn value(&self, p: &Vector3<f64>) -> f64 {
        match &self.repr {
            Repr::Poly(d) => d.f.eval_at(p),
            Repr::BlackBox { f, .. } => f(p),
        }
    }

    pub fn gradient(&self, p: &Vector3<f64>) -> Vector3<f64> {
        match &self.repr {
            Repr::Poly(d) => Vector3::from_fn(|i, _| d.grad[i].eval_at(p)),
            Repr::BlackBox { f, .. } => {
                let h = Self::fd_step(p);
                Vector3::from_fn(|i, _| {
                    let e = Vector3::ith(i, h);
                    (f(&(p + e)) - f(&(p - e))) / (2.0 * h)
                })
            }
        }
    }

    pub fn hessian(&self, p: &Vector3<f64>) -> Matrix3<f64> {
        match &self.repr {
            Repr::Poly(d) => Matrix3::from_fn(|i, j| d.hess[i][j].eval_at(p)),
            Repr::BlackBox { f, .. } => fd_hessian(f.as_ref(), p, Self::fd_step(p)),
        }
    }

    /// `out[l] = ∂_l Hess F`.
    pub fn third(&self, p: &Vector3<f64>) -> [Matrix3<f64>; 3] {
        match &self.repr {
            Repr::Poly(d) => std::array::from_fn(|l| Matrix3::from_fn(|i, j| d.third[l][i][j].eval_at(p))),
            Repr::BlackBox { f, .. } => {
                let h = Self::fd_step(p);
                std::array::from_fn(|l| {
                    let e = Vector3::ith(l, h);
                    (fd_hessian(f.as_ref(), &(p + e), h) - fd_hessian(f.as_ref(), &(p - e), h)) / (2.0 * h)
                })
            }
        }
    }

    /// Hessian entries along a jet-valued position. Exact for polynomials;
    /// first order in the displacement for black-box fields.
    pub fn hessian_along(&self, p: &JetVec) -> [[Jet; 3]; 3] {
        match &self.repr {
            Repr::Poly(d) => std::array::from_fn(|i| std::array::from_fn(|j| d.hess[i][j].eval(p))),
            Repr::BlackBox { .. } => {
                let p0 = Vector3::new(p[0].value(), p[1].value(), p[2].value());
                let h0 = self.hessian(&p0);
                let t = self.third(&p0);
                let delta: [Jet; 3] = std::array::from_fn(|l| p[l] - p0[l]);
                std::array::from_fn(|i| {
                    std::array::from_fn(|j| {
                        let mut acc = Jet::constant(h0[(i, j)]);
                        for l in 0..3 {
                            acc += delta[l] * t[l][(i, j)];
                        }
                        acc
                    })
                })
            }
        }
    }
}

fn fd_hessian(f: &Evaluator, p: &Vector3<f64>, h: f64) -> Matrix3<f64> {
    let f0 = f(p);
    let mut m = Matrix3::zeros();
    for i in 0..3 {
        let ei = Vector3::ith(i, h);
        m[(i, i)] = (f(&(p + ei)) - 2.0 * f0 + f(&(p - ei))) / (h * h);
        for j in 0..i {
            let ej = Vector3::ith(j, h);
            let v = (f(&(p + ei + ej)) - f(&(p + ei - ej)) - f(&(p - ei + ej)) + f(&(p - ei - ej))) / (4.0 * h * h);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// The metric `⟨Hess F ·, ·⟩`, negated when its index is 2 or 3 so that the
/// working metric has index 0 or 1.
#[derive(Debug, Clone)]
pub struct HessianMetricField {
    field: ScalarField,
    sign: f64,
    raw_index: usize,
    causal_tol: f64,
    constant: Option<PseudoMetric>,
}

fn check_point(field: &ScalarField, p: &Vector3<f64>) -> Result<usize> {
    let h = field.hessian(p);
    let eig = h.symmetric_eigenvalues();
    let big = eig.amax();
    let small = eig.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    if !big.is_finite() || small <= DEGENERACY_TOL * big.max(1.0) {
        return Err(Error::DegenerateHessian { point: (*p).into() });
    }
    Ok(eig.iter().filter(|x| **x < 0.0).count())
}

/// Builds the Hessian metric, checking non-degeneracy and a common index
/// at every probe point.
pub fn hessian_metric(field: ScalarField, probes: &[Vector3<f64>]) -> Result<HessianMetricField> {
    let Some(first) = probes.first() else {
        return Err(Error::Invalid("Hessian metric needs at least one probe point".into()));
    };
    let raw_index = check_point(&field, first)?;
    for p in &probes[1..] {
        let k = check_point(&field, p)?;
        if k != raw_index {
            return Err(Error::MixedIndex { first: raw_index, other: k });
        }
    }
    let sign = if raw_index >= 2 { -1.0 } else { 1.0 };
    let constant =
        if field.has_constant_hessian() { Some(PseudoMetric::from_matrix(field.hessian(first) * sign)?) } else { None };
    Ok(HessianMetricField { field, sign, raw_index, causal_tol: DEFAULT_CAUSAL_TOLERANCE, constant })
}

impl HessianMetricField {
    pub fn with_causal_tolerance(mut self, tol: f64) -> Self {
        self.causal_tol = tol;
        self.constant = self.constant.map(|m| m.with_causal_tolerance(tol));
        self
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    /// `-1` when the Hessian was negated.
    pub fn sign(&self) -> f64 {
        self.sign
    }

    /// Index of `Hess F` itself.
    pub fn raw_index(&self) -> usize {
        self.raw_index
    }

    /// Index of the working metric.
    pub fn index(&self) -> usize {
        if self.sign < 0.0 {
            3 - self.raw_index
        } else {
            self.raw_index
        }
    }

    /// `Γ^k_ij = ½ g^{kl} F_ijl`; independent of the sign convention.
    pub fn christoffel(&self, p: &Vector3<f64>) -> Result<Christoffel> {
        let h = self.field.hessian(p);
        let inv = h.try_inverse().ok_or(Error::DegenerateHessian { point: (*p).into() })?;
        let t = self.field.third(p);
        Ok(std::array::from_fn(|k| (t[0] * inv[(k, 0)] + t[1] * inv[(k, 1)] + t[2] * inv[(k, 2)]) * 0.5))
    }

    /// Matrix of the covariant Hessian `H^F_ij = F_ij − Γ^k_ij F_k`.
    pub fn covariant_hessian_matrix(&self, p: &Vector3<f64>) -> Result<Matrix3<f64>> {
        let gamma = self.christoffel(p)?;
        let g = self.field.gradient(p);
        Ok(self.field.hessian(p) - gamma[0] * g[0] - gamma[1] * g[1] - gamma[2] * g[2])
    }

    pub fn covariant_hessian(&self, p: &Vector3<f64>, x: &Vector3<f64>, y: &Vector3<f64>) -> Result<f64> {
        Ok(x.dot(&(self.covariant_hessian_matrix(p)? * y)))
    }

    /// Largest entry of `∂_l g_ij − Γ^m_li g_mj − Γ^m_lj g_im`.
    pub fn compatibility_defect(&self, p: &Vector3<f64>) -> Result<f64> {
        let g = self.field.hessian(p) * self.sign;
        let dg = self.field.third(p).map(|m| m * self.sign);
        let gamma = self.christoffel(p)?;
        let mut worst = 0.0f64;
        for l in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let mut v = dg[l][(i, j)];
                    for m in 0..3 {
                        v -= gamma[m][(l, i)] * g[(m, j)] + gamma[m][(l, j)] * g[(i, m)];
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
        Ok(worst)
    }
}

impl MetricField for HessianMetricField {
    fn metric_at(&self, p: &Vector3<f64>) -> Result<PseudoMetric> {
        let m = PseudoMetric::from_matrix(self.matrix_at(p))?.with_causal_tolerance(self.causal_tol);
        if m.index() != self.index() {
            return Err(Error::MixedIndex { first: self.index(), other: m.index() });
        }
        Ok(m)
    }

    fn matrix_at(&self, p: &Vector3<f64>) -> Matrix3<f64> {
        self.field.hessian(p) * self.sign
    }

    fn christoffel_at(&self, p: &Vector3<f64>) -> Christoffel {
        self.christoffel(p).unwrap_or([Matrix3::zeros(); 3])
    }

    fn matrix_along(&self, p: &JetVec) -> [[Jet; 3]; 3] {
        self.field.hessian_along(p).map(|row| row.map(|x| x * self.sign))
    }

    fn as_constant(&self) -> Option<&PseudoMetric> {
        self.constant.as_ref()
    }

    fn causal_tolerance(&self) -> f64 {
        self.causal_tol
    }
}
