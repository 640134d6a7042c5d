//! Parametric space curves, causal profiling and (pseudo) arc-length
//! reparametrization.

mod family;
mod param;
mod spline;

use std::sync::Arc;

use nalgebra::Vector3;

pub use family::{AngleLaw, Family, HyperbolaBranch, MinkowskiSurface, ProjectionMode};
pub use param::{reparametrize, reparametrize_in, CurvePoint, ParamCurve, ParamKind, ReparamOptions};
pub use spline::QuinticSpline;

use crate::error::{Error, Result};
use crate::jet::{vec_derivative, Jet, JetVec, Real};
use crate::numeric::linspace;
use crate::pseudo_metric::{CausalCharacter, MetricField};

/// Minimum number of samples accepted for sampled curves.
pub const MIN_SAMPLES: usize = 8;

/// Velocities with Euclidean norm at or below this are treated as singular.
pub const REGULARITY_TOL: f64 = 1e-9;

pub const DEFAULT_SAMPLES: usize = 512;

/// Sampled curve data together with its interpolating spline.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    params: Vec<f64>,
    points: Vec<Vector3<f64>>,
    spline: QuinticSpline,
}

impl SampledCurve {
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }
}

#[derive(Debug, Clone)]
pub enum CurveSource {
    Family(Family),
    Sampled(Arc<SampledCurve>),
}

/// A regular parametric curve `t ↦ α(t)` on a closed domain.
#[derive(Debug, Clone)]
pub struct Curve {
    source: CurveSource,
    domain: (f64, f64),
    n_samples: usize,
}

impl Curve {
    pub fn from_family(family: Family, domain: (f64, f64), n_samples: usize) -> Result<Self> {
        if !(domain.0.is_finite() && domain.1.is_finite() && domain.0 < domain.1) {
            return Err(Error::InvalidCurve(format!("bad domain [{}, {}]", domain.0, domain.1)));
        }
        if n_samples < MIN_SAMPLES {
            return Err(Error::InvalidCurve(format!("need at least {MIN_SAMPLES} grid points, got {n_samples}")));
        }
        Ok(Curve { source: CurveSource::Family(family), domain, n_samples })
    }

    /// Interpolates samples `(tᵢ, pᵢ)` with a quintic spline.
    pub fn from_samples(params: Vec<f64>, points: Vec<Vector3<f64>>) -> Result<Self> {
        if params.len() < MIN_SAMPLES {
            return Err(Error::InvalidCurve(format!("need at least {MIN_SAMPLES} samples, got {}", params.len())));
        }
        if params.len() != points.len() {
            return Err(Error::InvalidCurve("parameter and point counts differ".into()));
        }
        if params.iter().any(|t| !t.is_finite()) || points.iter().any(|p| !p.iter().all(|x| x.is_finite())) {
            return Err(Error::InvalidCurve("samples must be finite".into()));
        }
        if params.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidCurve("sample parameters must be strictly increasing".into()));
        }
        let spline = QuinticSpline::interpolate(&params, &points)?;
        let domain = (params[0], params[params.len() - 1]);
        let n_samples = params.len();
        Ok(Curve { source: CurveSource::Sampled(Arc::new(SampledCurve { params, points, spline })), domain, n_samples })
    }

    pub fn source(&self) -> &CurveSource {
        &self.source
    }

    pub fn family(&self) -> Option<&Family> {
        match &self.source {
            CurveSource::Family(f) => Some(f),
            CurveSource::Sampled(_) => None,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn with_samples(mut self, n: usize) -> Result<Self> {
        if n < MIN_SAMPLES {
            return Err(Error::InvalidCurve(format!("need at least {MIN_SAMPLES} grid points")));
        }
        self.n_samples = n;
        Ok(self)
    }

    /// Parameter values of the evaluation grid.
    pub fn grid(&self) -> Vec<f64> {
        match &self.source {
            CurveSource::Sampled(s) => s.params.clone(),
            CurveSource::Family(_) => linspace(self.domain.0, self.domain.1, self.n_samples),
        }
    }

    pub fn eval<T: Real>(&self, t: T) -> [T; 3] {
        match &self.source {
            CurveSource::Family(f) => f.eval(t),
            CurveSource::Sampled(s) => s.spline.eval(t),
        }
    }

    pub fn point(&self, t: f64) -> Vector3<f64> {
        Vector3::from(self.eval(t))
    }

    /// Taylor jet of the curve about `t`.
    pub fn jet(&self, t: f64) -> JetVec {
        self.eval(Jet::variable(t))
    }

    /// Derivative of order `k ≤ 4` with respect to the curve's own parameter.
    pub fn derivative(&self, t: f64, k: usize) -> Vector3<f64> {
        vec_derivative(&self.jet(t), k)
    }

    pub fn samples(&self) -> Vec<(f64, Vector3<f64>)> {
        self.grid().into_iter().map(|t| (t, self.point(t))).collect()
    }
}

/// `(u, v)` in the metric at `p`, computed along jets.
pub(crate) fn jet_inner(metric: &dyn MetricField, p: &JetVec, u: &JetVec, v: &JetVec) -> Jet {
    let g = metric.matrix_along(p);
    let mut acc = Jet::constant(0.0);
    for i in 0..3 {
        for j in 0..3 {
            acc += g[i][j] * u[i] * v[j];
        }
    }
    acc
}

/// Common causal character of the velocity over the curve's grid.
pub fn profile_causal(curve: &Curve, metric: &dyn MetricField) -> Result<CausalCharacter> {
    let grid = curve.grid();
    let mut chars = Vec::with_capacity(grid.len());
    for &t in &grid {
        let p = curve.point(t);
        let v = curve.derivative(t, 1);
        if v.norm() <= REGULARITY_TOL {
            return Err(Error::DegenerateCurve { t });
        }
        let g = metric.matrix_at(&p);
        let q = v.dot(&(g * v));
        let band_scale = v.norm_squared();
        let tol = metric.causal_tolerance();
        let c = if q > tol * band_scale {
            CausalCharacter::Spacelike
        } else if q < -tol * band_scale {
            CausalCharacter::Timelike
        } else {
            CausalCharacter::Lightlike
        };
        chars.push(c);
    }
    let flips: Vec<f64> =
        chars.windows(2).zip(grid.windows(2)).filter(|(c, _)| c[0] != c[1]).map(|(_, t)| 0.5 * (t[0] + t[1])).collect();
    if flips.is_empty() {
        Ok(chars[0])
    } else {
        Err(Error::MixedCausalCharacter { flips })
    }
}
