//! Analytic curve families.
//!
//! Every family is written once over the [`Real`] trait, so the same code
//! yields positions (`f64`) and exact Taylor jets ([`Jet`](crate::jet::Jet)).

use serde::{Deserialize, Serialize};

use crate::jet::Real;
use crate::level_surface::Polynomial;

fn zero3() -> [f64; 3] {
    [0.0; 3]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperbolaBranch {
    /// `(r cosh t, 0, r sinh t)`; timelike in Minkowski space.
    Timelike,
    /// `(r sinh t, 0, r cosh t)`; spacelike, on the pseudo-hyperbolic space.
    Spacelike,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinkowskiSurface {
    /// `(x, x) = r²`.
    PseudoSphere,
    /// `(x, x) = -r²`.
    PseudoHyperbolic,
    /// `(x, x) = 0`.
    LightCone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionMode {
    /// Move along the gradient line `seed + λ ∇F(seed)`.
    #[default]
    Gradient,
    /// Move along the ray `(1 + λ) seed`.
    Radial,
}

/// Angle law `c₀ + c₁ t + amp · sin(freq · t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct AngleLaw {
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub c1: f64,
    #[serde(default)]
    pub amp: f64,
    #[serde(default)]
    pub freq: f64,
}

impl AngleLaw {
    pub fn linear(c0: f64, c1: f64) -> Self {
        AngleLaw { c0, c1, amp: 0.0, freq: 0.0 }
    }

    fn eval<T: Real>(&self, t: T) -> T {
        let mut v = t * self.c1 + self.c0;
        if self.amp != 0.0 {
            v = v + (t * self.freq).sin() * self.amp;
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// `point + t · direction`.
    Line {
        point: [f64; 3],
        direction: [f64; 3],
    },
    /// Circle of the given radius in the plane `z = center.z`.
    Circle {
        radius: f64,
        #[serde(default = "zero3")]
        center: [f64; 3],
    },
    /// `(a cos t, b sin t, 0) + center`.
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default = "zero3")]
        center: [f64; 3],
    },
    /// `(a cos t, a sin t, b t)`.
    Helix {
        a: f64,
        b: f64,
    },
    Hyperbola {
        r: f64,
        branch: HyperbolaBranch,
    },
    /// `(r sinh t, c t, r cosh t)`: spacelike with timelike principal normal.
    HyperbolicHelix {
        r: f64,
        c: f64,
    },
    /// `(rho cos t, rho sin t, height)`.
    MinkowskiCircle {
        rho: f64,
        height: f64,
    },
    /// `(cos t, sin t, 1)`.
    LightConeCircle,
    /// Parallel of the torus with tube radius `minor` around the circle of
    /// radius `major`, at tube angle `angle`.
    TorusLatitude {
        major: f64,
        minor: f64,
        #[serde(default)]
        angle: f64,
    },
    /// `(c cosh(t/c), t, c sinh(t/c))`: lightlike, with `(α″, α″) = 1/c²`.
    NullCurve {
        c: f64,
    },
    /// `center + r (cos u cos v, sin u cos v, sin v)` with `u = lon(t)`,
    /// `v = lat(t)`.
    SphereCurve {
        #[serde(default = "zero3")]
        center: [f64; 3],
        radius: f64,
        lon: AngleLaw,
        lat: AngleLaw,
    },
    /// Curves on pseudo-spheres, pseudo-hyperbolic spaces and light-cones,
    /// with `u = lon(t)` and `v = lat(t)`:
    /// `r (cosh v cos u, cosh v sin u, sinh v)`,
    /// `r (sinh v cos u, sinh v sin u, cosh v)`, or
    /// `(v cos u, v sin u, v)`, all offset by `center`.
    MinkowskiSphereCurve {
        surface: MinkowskiSurface,
        #[serde(default = "zero3")]
        center: [f64; 3],
        #[serde(default)]
        radius: f64,
        lon: AngleLaw,
        lat: AngleLaw,
    },
    /// Componentwise polynomials, coefficients in ascending powers.
    Polynomial {
        x: Vec<f64>,
        y: Vec<f64>,
        z: Vec<f64>,
    },
    /// `matrix · base(t) + offset`, matrix row-major.
    LinearImage {
        matrix: [[f64; 3]; 3],
        #[serde(default = "zero3")]
        offset: [f64; 3],
        base: Box<Family>,
    },
    /// The point where the line from `seed(t)` along the chosen direction
    /// meets `F = level`.
    Projected {
        field: Polynomial,
        level: f64,
        seed: Box<Family>,
        #[serde(default)]
        mode: ProjectionMode,
    },
}

impl Family {
    pub fn circle(radius: f64) -> Self {
        Family::Circle { radius, center: zero3() }
    }

    pub fn helix(a: f64, b: f64) -> Self {
        Family::Helix { a, b }
    }

    pub fn ellipse(a: f64, b: f64) -> Self {
        Family::Ellipse { a, b, center: zero3() }
    }

    pub fn line(point: [f64; 3], direction: [f64; 3]) -> Self {
        Family::Line { point, direction }
    }

    pub fn polynomial(x: Vec<f64>, y: Vec<f64>, z: Vec<f64>) -> Self {
        Family::Polynomial { x, y, z }
    }

    pub fn linear_image(matrix: [[f64; 3]; 3], offset: [f64; 3], base: Family) -> Self {
        Family::LinearImage { matrix, offset, base: Box::new(base) }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Line { .. } => "line",
            Family::Circle { .. } => "circle",
            Family::Ellipse { .. } => "ellipse",
            Family::Helix { .. } => "helix",
            Family::Hyperbola { .. } => "hyperbola",
            Family::HyperbolicHelix { .. } => "hyperbolic_helix",
            Family::MinkowskiCircle { .. } => "minkowski_circle",
            Family::LightConeCircle => "light_cone_circle",
            Family::TorusLatitude { .. } => "torus_latitude",
            Family::NullCurve { .. } => "null_curve",
            Family::SphereCurve { .. } => "sphere_curve",
            Family::MinkowskiSphereCurve { .. } => "minkowski_sphere_curve",
            Family::Polynomial { .. } => "polynomial",
            Family::LinearImage { .. } => "linear_image",
            Family::Projected { .. } => "projected",
        }
    }

    pub fn eval<T: Real>(&self, t: T) -> [T; 3] {
        let c = T::cst;
        match self {
            Family::Line { point, direction } => std::array::from_fn(|i| t * direction[i] + point[i]),
            Family::Circle { radius, center } => {
                [t.cos() * *radius + center[0], t.sin() * *radius + center[1], c(center[2])]
            }
            Family::Ellipse { a, b, center } => [t.cos() * *a + center[0], t.sin() * *b + center[1], c(center[2])],
            Family::Helix { a, b } => [t.cos() * *a, t.sin() * *a, t * *b],
            Family::Hyperbola { r, branch } => match branch {
                HyperbolaBranch::Timelike => [t.cosh() * *r, c(0.0), t.sinh() * *r],
                HyperbolaBranch::Spacelike => [t.sinh() * *r, c(0.0), t.cosh() * *r],
            },
            Family::HyperbolicHelix { r, c: k } => [t.sinh() * *r, t * *k, t.cosh() * *r],
            Family::MinkowskiCircle { rho, height } => [t.cos() * *rho, t.sin() * *rho, c(*height)],
            Family::LightConeCircle => [t.cos(), t.sin(), c(1.0)],
            Family::TorusLatitude { major, minor, angle } => {
                let rho = major + minor * angle.cos();
                [t.cos() * rho, t.sin() * rho, c(minor * angle.sin())]
            }
            Family::NullCurve { c: k } => {
                let u = t * (1.0 / k);
                [u.cosh() * *k, t, u.sinh() * *k]
            }
            Family::SphereCurve { center, radius, lon, lat } => {
                let u = lon.eval(t);
                let v = lat.eval(t);
                let cv = v.cos();
                [u.cos() * cv * *radius + center[0], u.sin() * cv * *radius + center[1], v.sin() * *radius + center[2]]
            }
            Family::MinkowskiSphereCurve { surface, center, radius, lon, lat } => {
                let u = lon.eval(t);
                let v = lat.eval(t);
                let (rad, height) = match surface {
                    MinkowskiSurface::PseudoSphere => (v.cosh() * *radius, v.sinh() * *radius),
                    MinkowskiSurface::PseudoHyperbolic => (v.sinh() * *radius, v.cosh() * *radius),
                    MinkowskiSurface::LightCone => (v, v),
                };
                [u.cos() * rad + center[0], u.sin() * rad + center[1], height + center[2]]
            }
            Family::Polynomial { x, y, z } => [horner(x, t), horner(y, t), horner(z, t)],
            Family::LinearImage { matrix, offset, base } => {
                let p = base.eval(t);
                std::array::from_fn(|i| p[0] * matrix[i][0] + p[1] * matrix[i][1] + p[2] * matrix[i][2] + offset[i])
            }
            Family::Projected { field, level, seed, mode } => project(field, *level, seed, *mode, t),
        }
    }
}

fn horner<T: Real>(coeffs: &[f64], t: T) -> T {
    let mut acc = T::cst(0.0);
    for c in coeffs.iter().rev() {
        acc = acc * t + *c;
    }
    acc
}

fn dot<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn project<T: Real>(field: &Polynomial, level: f64, seed: &Family, mode: ProjectionMode, t: T) -> [T; 3] {
    let grad: [Polynomial; 3] = std::array::from_fn(|i| field.derivative(i));
    let base = seed.eval(t);
    let dir = match mode {
        ProjectionMode::Gradient => std::array::from_fn(|i| grad[i].eval(&base)),
        ProjectionMode::Radial => base,
    };
    let at = |lam: T| -> [T; 3] { std::array::from_fn(|i| base[i] + dir[i] * lam) };
    let newton = |lam: T| -> T {
        let p = at(lam);
        let g: [T; 3] = std::array::from_fn(|i| grad[i].eval(&p));
        lam - (field.eval(&p) - level) / dot(&g, &dir)
    };

    // Converge the value first, then let each jet iteration double the
    // number of exact Taylor orders.
    let base_v = base.map(|x| x.val());
    let dir_v = dir.map(|x| x.val());
    let mut lam = 0.0f64;
    for _ in 0..100 {
        let p: [f64; 3] = std::array::from_fn(|i| base_v[i] + dir_v[i] * lam);
        let g: [f64; 3] = std::array::from_fn(|i| grad[i].eval(&p));
        let step = (field.eval(&p) - level) / dot(&g, &dir_v);
        lam -= step;
        if step.abs() <= 1e-15 * (1.0 + lam.abs()) {
            break;
        }
    }
    let mut lam_t = T::cst(lam);
    for _ in 0..4 {
        lam_t = newton(lam_t);
    }
    at(lam_t)
}
