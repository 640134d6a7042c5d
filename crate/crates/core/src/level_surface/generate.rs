//! Curves on level sets: projection of seed samples onto `F = c`, and
//! integration of a frame whose curvatures satisfy the Euclidean criterion.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::field::ScalarField;
use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::pseudo_metric::smallest_axis;

/// `|F − c|` accepted by the projection, relative to `1 + |c|`.
pub const PROJECTION_TOL: f64 = 1e-12;

const MAX_PROJECTION_STEPS: usize = 200;

/// Damped Newton descent along `∇F` onto `F = level`.
pub fn project_to_level(field: &ScalarField, level: f64, start: &Vector3<f64>) -> Result<Vector3<f64>> {
    let tol = PROJECTION_TOL * (1.0 + level.abs());
    let mut p = *start;
    let mut r = field.value(&p) - level;
    for _ in 0..MAX_PROJECTION_STEPS {
        if r.abs() <= tol {
            return Ok(p);
        }
        let g = field.gradient(&p);
        let g2 = g.norm_squared();
        if g2 == 0.0 || !g2.is_finite() {
            return Err(Error::CriticalPoint { point: p.into() });
        }
        let step = g * (r / g2);
        let mut lambda = 1.0;
        loop {
            let q = p - step * lambda;
            let rq = field.value(&q) - level;
            if rq.abs() < r.abs() {
                p = q;
                r = rq;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-8 {
                // stalled at rounding level
                return if r.abs() <= 1e2 * tol { Ok(p) } else { Err(Error::ProjectionFailed { t: f64::NAN }) };
            }
        }
    }
    if r.abs() <= tol {
        Ok(p)
    } else {
        Err(Error::ProjectionFailed { t: f64::NAN })
    }
}

#[derive(Debug, Clone)]
pub struct OnSurfaceCurve {
    pub curve: Curve,
    /// `max |F − c|` at the interpolation nodes.
    pub node_defect: f64,
    /// `max |F − c|` half way between nodes.
    pub midpoint_defect: f64,
}

/// Samples `seed` at `n` uniform parameters, projects every sample onto
/// `F = level` and interpolates with a quintic spline.
pub fn on_surface_curve(field: &ScalarField, level: f64, seed: &Curve, n: usize) -> Result<OnSurfaceCurve> {
    let seed = seed.clone().with_samples(n)?;
    let grid = seed.grid();
    let mut points = Vec::with_capacity(n);
    for &t in &grid {
        let p = project_to_level(field, level, &seed.point(t)).map_err(|e| match e {
            Error::ProjectionFailed { .. } => Error::ProjectionFailed { t },
            other => other,
        })?;
        points.push(p);
    }
    let node_defect = points.iter().fold(0.0f64, |m, p| m.max((field.value(p) - level).abs()));
    let curve = Curve::from_samples(grid.clone(), points)?;
    let midpoint_defect =
        grid.windows(2).map(|w| (field.value(&curve.point(0.5 * (w[0] + w[1]))) - level).abs()).fold(0.0f64, f64::max);
    Ok(OnSurfaceCurve { curve, node_defect, midpoint_defect })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConverseOptions {
    pub length: f64,
    pub steps: usize,
    /// Free coefficient `λ` along `(−b₂, b₁)` in the curvature solution.
    pub twist: f64,
}

impl Default for ConverseOptions {
    fn default() -> Self {
        ConverseOptions { length: 2.0, steps: 2000, twist: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseTrace {
    pub grid: Vec<f64>,
    pub positions: Vec<[f64; 3]>,
    pub kappas: Vec<[f64; 2]>,
    /// `max |F(α(s)) − F(α(0))|`.
    pub level_drift: f64,
}

type State = [Vector3<f64>; 4];

/// Integrates a Euclidean Bishop frame whose curvatures are forced to satisfy
/// `b₀ + b₁κ₁ + b₂κ₂ = 0`, starting tangent to the level set. `F` then stays
/// constant along the resulting curve.
pub fn integrate_level_curve(
    field: &ScalarField,
    start: &Vector3<f64>,
    tangent: &Vector3<f64>,
    opts: &ConverseOptions,
) -> Result<ConverseTrace> {
    if opts.steps == 0 || !(opts.length > 0.0) {
        return Err(Error::Invalid("converse integration needs positive length and steps".into()));
    }
    let t0 = tangent.try_normalize(0.0).ok_or(Error::ZeroVector)?;
    let g0 = field.gradient(start);
    if g0.norm() == 0.0 {
        return Err(Error::CriticalPoint { point: (*start).into() });
    }
    let defect = g0.dot(&t0) / g0.norm();
    if defect.abs() > 1e-10 {
        return Err(Error::NotTangent { defect });
    }
    let e = smallest_axis(&t0);
    let n1 = (e - t0 * e.dot(&t0)).normalize();
    let n2 = t0.cross(&n1);

    let kappa = |y: &State| -> Result<[f64; 2]> {
        let [p, t, n1, n2] = y;
        let g = field.gradient(p);
        let b0 = t.dot(&(field.hessian(p) * t));
        let (b1, b2) = (g.dot(n1), g.dot(n2));
        let d = b1 * b1 + b2 * b2;
        if d == 0.0 {
            return Err(Error::CriticalPoint { point: (*p).into() });
        }
        Ok([-b0 * b1 / d - opts.twist * b2, -b0 * b2 / d + opts.twist * b1])
    };
    let rhs = |y: &State| -> Result<State> {
        let k = kappa(y)?;
        let [_, t, n1, n2] = *y;
        Ok([t, n1 * k[0] + n2 * k[1], -t * k[0], -t * k[1]])
    };
    let axpy = |y: &State, k: &State, h: f64| -> State { std::array::from_fn(|i| y[i] + k[i] * h) };

    let h = opts.length / opts.steps as f64;
    let mut y: State = [*start, t0, n1, n2];
    let f0 = field.value(start);
    let mut grid = vec![0.0];
    let mut positions = vec![(*start).into()];
    let mut kappas = vec![kappa(&y)?];
    let mut drift = 0.0f64;
    for step in 1..=opts.steps {
        let k1 = rhs(&y)?;
        let k2 = rhs(&axpy(&y, &k1, 0.5 * h))?;
        let k3 = rhs(&axpy(&y, &k2, 0.5 * h))?;
        let k4 = rhs(&axpy(&y, &k3, h))?;
        for i in 0..4 {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        let t = y[1].normalize();
        let a = (y[2] - t * y[2].dot(&t)).normalize();
        y[1] = t;
        y[2] = a;
        y[3] = t.cross(&a);
        drift = drift.max((field.value(&y[0]) - f0).abs());
        grid.push(step as f64 * h);
        positions.push(y[0].into());
        kappas.push(kappa(&y)?);
    }
    Ok(ConverseTrace { grid, positions, kappas, level_drift: drift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{AngleLaw, Family};
    use crate::level_surface::Polynomial;
    use std::f64::consts::PI;

    #[test]
    fn projected_seed_is_on_the_quartic() {
        let field = ScalarField::polynomial(Polynomial::quartic_example());
        let seed = Curve::from_family(
            Family::SphereCurve {
                center: [0.0; 3],
                radius: 1.0,
                lon: AngleLaw::linear(0.0, 1.0),
                lat: AngleLaw { c0: 0.0, c1: 0.0, amp: 0.4, freq: 3.0 },
            },
            (0.0, 2.0 * PI),
            64,
        )
        .unwrap();
        let on = on_surface_curve(&field, 3.0, &seed, 1024).unwrap();
        assert!(on.node_defect <= 1e-11);
        assert!(on.midpoint_defect <= 1e-10, "{}", on.midpoint_defect);
    }

    #[test]
    fn converse_integration_stays_on_level() {
        let field = ScalarField::polynomial(Polynomial::quartic_example());
        let start = project_to_level(&field, 3.0, &Vector3::new(1.0, 0.2, 0.3)).unwrap();
        let g = field.gradient(&start);
        let tangent = g.cross(&Vector3::z());
        for twist in [0.0, 0.7] {
            let tr = integrate_level_curve(&field, &start, &tangent, &ConverseOptions { twist, ..Default::default() })
                .unwrap();
            assert!(tr.level_drift <= 1e-6, "{}", tr.level_drift);
        }
        assert!(matches!(
            integrate_level_curve(&field, &start, &g, &ConverseOptions::default()),
            Err(Error::NotTangent { .. })
        ));
    }
}
