//! Arc-length and pseudo arc-length reparametrization.

use std::sync::Arc;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{jet_inner, profile_causal, Curve};
use crate::error::{Error, Result};
use crate::jet::{vec_derivative, vec_differentiate, Jet, JetVec};
use crate::numeric::{adaptive_simpson, hermite, linspace, monotone_slopes};
use crate::pseudo_metric::{CausalCharacter, MetricField, PseudoMetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    /// `|(α′, α′)| = 1`.
    ArcLength,
    /// `(α′, α′) = 0` and `(α″, α″) = 1`.
    PseudoArcLength,
    /// The curve's own parameter.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReparamOptions {
    /// Nodes of the cumulative length table.
    pub table_points: usize,
    /// Absolute tolerance for the total length quadrature.
    pub quad_tol: f64,
    /// Number of evenly spaced output samples; defaults to the curve's grid size.
    pub grid_points: Option<usize>,
}

impl Default for ReparamOptions {
    fn default() -> Self {
        ReparamOptions { table_points: 1024, quad_tol: 1e-10, grid_points: None }
    }
}

/// Position and derivatives with respect to the reparametrized parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub s: f64,
    /// Original parameter value.
    pub t: f64,
    pub position: Vector3<f64>,
    pub d1: Vector3<f64>,
    pub d2: Vector3<f64>,
    pub d3: Vector3<f64>,
}

/// A curve reparametrized in a given metric.
#[derive(Debug, Clone)]
pub struct ParamCurve {
    curve: Curve,
    metric: Arc<dyn MetricField>,
    kind: ParamKind,
    causal: CausalCharacter,
    table_t: Vec<f64>,
    table_s: Vec<f64>,
    slopes: Vec<f64>,
    length: f64,
    grid: Vec<f64>,
}

/// Reparametrizes by arc length (non-lightlike curves) or pseudo arc length
/// (lightlike curves) in a constant metric.
pub fn reparametrize(curve: &Curve, metric: &PseudoMetric) -> Result<ParamCurve> {
    reparametrize_in(curve, Arc::new(metric.clone()), ReparamOptions::default())
}

/// Reparametrization in an arbitrary metric field.
pub fn reparametrize_in(curve: &Curve, metric: Arc<dyn MetricField>, opts: ReparamOptions) -> Result<ParamCurve> {
    if opts.table_points < 2 {
        return Err(Error::Invalid("length table needs at least 2 nodes".into()));
    }
    let causal = profile_causal(curve, metric.as_ref())?;
    let kind = if causal == CausalCharacter::Lightlike {
        check_not_straight(curve, metric.as_ref())?;
        ParamKind::PseudoArcLength
    } else {
        ParamKind::ArcLength
    };
    let (t0, t1) = curve.domain();
    let table_t = linspace(t0, t1, opts.table_points);
    let speed = |t: f64| speed_at(curve, metric.as_ref(), kind, t);
    let seg_tol = opts.quad_tol / opts.table_points as f64;
    let mut table_s = Vec::with_capacity(table_t.len());
    table_s.push(0.0);
    for w in table_t.windows(2) {
        let prev = *table_s.last().expect("nonempty");
        table_s.push(prev + adaptive_simpson(speed, w[0], w[1], seg_tol));
    }
    let raw: Vec<f64> = table_t.iter().map(|t| 1.0 / speed(*t)).collect();
    let slopes = monotone_slopes(&table_s, &table_t, &raw);
    let length = *table_s.last().expect("nonempty");
    let n = opts.grid_points.unwrap_or(curve.n_samples());
    let grid = linspace(0.0, length, n);
    Ok(ParamCurve { curve: curve.clone(), metric, kind, causal, table_t, table_s, slopes, length, grid })
}

fn check_not_straight(curve: &Curve, metric: &dyn MetricField) -> Result<()> {
    let grid = curve.grid();
    let mut straight = Vec::new();
    for &t in &grid {
        let p = curve.point(t);
        let a2 = curve.derivative(t, 2);
        let q = a2.dot(&(metric.matrix_at(&p) * a2));
        let scale = a2.norm_squared().max(f64::MIN_POSITIVE);
        if q <= metric.causal_tolerance() * scale || a2.norm() <= 1e-12 {
            straight.push(t);
        }
    }
    if straight.len() == grid.len() {
        Err(Error::StraightLight)
    } else if let Some(t) = straight.first() {
        Err(Error::DegenerateCurve { t: *t })
    } else {
        Ok(())
    }
}

fn speed_at(curve: &Curve, metric: &dyn MetricField, kind: ParamKind, t: f64) -> f64 {
    let p = curve.point(t);
    let g = metric.matrix_at(&p);
    match kind {
        ParamKind::Raw => 1.0,
        ParamKind::ArcLength => {
            let v = curve.derivative(t, 1);
            v.dot(&(g * v)).abs().sqrt()
        }
        ParamKind::PseudoArcLength => {
            let a = curve.derivative(t, 2);
            a.dot(&(g * a)).abs().powf(0.25)
        }
    }
}

impl ParamCurve {
    /// Keeps the curve's own parameter (used for straight lightlike lines).
    pub fn raw(curve: &Curve, metric: Arc<dyn MetricField>) -> Result<Self> {
        let causal = profile_causal(curve, metric.as_ref())?;
        let (t0, t1) = curve.domain();
        Ok(ParamCurve {
            curve: curve.clone(),
            metric,
            kind: ParamKind::Raw,
            causal,
            table_t: vec![t0, t1],
            table_s: vec![t0, t1],
            slopes: vec![1.0, 1.0],
            length: t1 - t0,
            grid: curve.grid(),
        })
    }

    pub fn with_grid_points(mut self, n: usize) -> Result<Self> {
        if n < super::MIN_SAMPLES {
            return Err(Error::InvalidCurve(format!("need at least {} grid points", super::MIN_SAMPLES)));
        }
        let (a, b) = self.domain();
        self.grid = linspace(a, b, n);
        Ok(self)
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn metric(&self) -> &Arc<dyn MetricField> {
        &self.metric
    }

    /// The metric when it is constant.
    pub fn constant_metric(&self) -> Option<&PseudoMetric> {
        self.metric.as_constant()
    }

    pub fn kind(&self) -> ParamKind {
        self.kind
    }

    pub fn causal(&self) -> CausalCharacter {
        self.causal
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Length in the reparametrized parameter.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.table_s[0], self.table_s[self.table_s.len() - 1])
    }

    fn speed(&self, t: f64) -> f64 {
        speed_at(&self.curve, self.metric.as_ref(), self.kind, t)
    }

    fn check_domain(&self, s: f64) -> Result<f64> {
        let (a, b) = self.domain();
        let slack = 1e-12 * (1.0 + (b - a).abs());
        if !(s >= a - slack && s <= b + slack) {
            return Err(Error::OutOfDomain { s, min: a, max: b });
        }
        Ok(s.clamp(a, b))
    }

    /// Original parameter `t` corresponding to `s`.
    pub fn t_of_s(&self, s: f64) -> Result<f64> {
        let s = self.check_domain(s)?;
        if self.kind == ParamKind::Raw {
            return Ok(s);
        }
        let n = self.table_s.len();
        let i = self.table_s.partition_point(|x| *x <= s).saturating_sub(1).min(n - 2);
        let (ta, tb) = (self.table_t[i], self.table_t[i + 1]);
        let mut t = hermite(self.table_s[i], self.table_s[i + 1], ta, tb, self.slopes[i], self.slopes[i + 1], s);
        let (lo, hi) = self.curve.domain();
        let speed = |x: f64| self.speed(x);
        for _ in 0..30 {
            let f = self.table_s[i] + adaptive_simpson(speed, ta, t, 1e-14) - s;
            let step = f / self.speed(t);
            t = (t - step).clamp(lo, hi);
            if step.abs() <= 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        Ok(t)
    }

    /// Reparametrized value of the original parameter `t`.
    pub fn s_of_t(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.curve.domain();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfDomain { s: t, min: lo, max: hi });
        }
        if self.kind == ParamKind::Raw {
            return Ok(t);
        }
        let n = self.table_t.len();
        let i = self.table_t.partition_point(|x| *x <= t).saturating_sub(1).min(n - 2);
        Ok(self.table_s[i] + adaptive_simpson(|x| self.speed(x), self.table_t[i], t, 1e-14))
    }

    /// Jets of position and its first three `s`-derivatives, about `t`.
    fn s_jets(&self, t: f64) -> [JetVec; 4] {
        let a = self.curve.jet(t);
        let a1 = vec_differentiate(&a);
        let m = self.metric.as_ref();
        let sigma = match self.kind {
            ParamKind::Raw => Jet::constant(1.0),
            ParamKind::ArcLength => jet_inner(m, &a, &a1, &a1).abs().powf(0.5),
            ParamKind::PseudoArcLength => {
                let a2 = vec_differentiate(&a1);
                jet_inner(m, &a, &a2, &a2).abs().powf(0.25)
            }
        };
        let u = sigma.recip();
        let x1 = a1.map(|c| c * u);
        let x2 = vec_differentiate(&x1).map(|c| c * u);
        let x3 = vec_differentiate(&x2).map(|c| c * u);
        [a, x1, x2, x3]
    }

    pub fn point(&self, s: f64) -> Result<CurvePoint> {
        let t = self.t_of_s(s)?;
        let j = self.s_jets(t);
        Ok(CurvePoint {
            s,
            t,
            position: vec_derivative(&j[0], 0),
            d1: vec_derivative(&j[1], 0),
            d2: vec_derivative(&j[2], 0),
            d3: vec_derivative(&j[3], 0),
        })
    }

    pub fn position(&self, s: f64) -> Result<Vector3<f64>> {
        Ok(self.curve.point(self.t_of_s(s)?))
    }

    /// Derivative of order 1, 2 or 3 with respect to `s`.
    pub fn derivative(&self, s: f64, order: usize) -> Result<Vector3<f64>> {
        let p = self.point(s)?;
        match order {
            0 => Ok(p.position),
            1 => Ok(p.d1),
            2 => Ok(p.d2),
            3 => Ok(p.d3),
            _ => Err(Error::Invalid(format!("derivative order {order} not available"))),
        }
    }

    /// Points at every grid value.
    pub fn sample(&self) -> Result<Vec<CurvePoint>> {
        self.grid.iter().map(|s| self.point(*s)).collect()
    }
}
