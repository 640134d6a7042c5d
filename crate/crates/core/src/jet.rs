//! Truncated Taylor series arithmetic.
//!
//! A [`Jet`] carries the Taylor coefficients `c_k = f^(k)(t0) / k!` of a scalar
//! function about a base point, for `k = 0..JET_LEN`. Propagating jets through
//! the curve families, polynomial fields and metric expressions gives exact
//! derivatives up to fourth order without hand-written chain rules.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use nalgebra::Vector3;

/// Number of stored Taylor coefficients (orders 0 through 4).
pub const JET_LEN: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet(pub [f64; JET_LEN]);

/// A point or vector whose components are jets.
pub type JetVec = [Jet; 3];

const FACTORIAL: [f64; JET_LEN] = [1.0, 1.0, 2.0, 6.0, 24.0];

impl Jet {
    pub const fn constant(v: f64) -> Self {
        Jet([v, 0.0, 0.0, 0.0, 0.0])
    }

    /// The identity function expanded about `t`.
    pub const fn variable(t: f64) -> Self {
        Jet([t, 1.0, 0.0, 0.0, 0.0])
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// The `k`-th derivative at the base point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.0[k] * FACTORIAL[k]
    }

    /// Jet of the derivative function. The top coefficient is lost.
    pub fn differentiate(&self) -> Self {
        let mut out = [0.0; JET_LEN];
        for k in 0..JET_LEN - 1 {
            out[k] = (k + 1) as f64 * self.0[k + 1];
        }
        Jet(out)
    }

    pub fn recip(self) -> Self {
        let a = &self.0;
        let mut b = [0.0; JET_LEN];
        b[0] = 1.0 / a[0];
        for k in 1..JET_LEN {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += a[j] * b[k - j];
            }
            b[k] = -acc * b[0];
        }
        Jet(b)
    }

    /// Real power `a^p`; requires a positive constant term.
    pub fn powf(self, p: f64) -> Self {
        let a = &self.0;
        let mut b = [0.0; JET_LEN];
        b[0] = a[0].powf(p);
        for k in 1..JET_LEN {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += (p * j as f64 - (k - j) as f64) * a[j] * b[k - j];
            }
            b[k] = acc / (k as f64 * a[0]);
        }
        Jet(b)
    }

    pub fn sqrt(self) -> Self {
        let a = &self.0;
        let mut b = [0.0; JET_LEN];
        b[0] = a[0].sqrt();
        for k in 1..JET_LEN {
            let mut acc = a[k];
            for j in 1..k {
                acc -= b[j] * b[k - j];
            }
            b[k] = acc / (2.0 * b[0]);
        }
        Jet(b)
    }

    pub fn exp(self) -> Self {
        let a = &self.0;
        let mut b = [0.0; JET_LEN];
        b[0] = a[0].exp();
        for k in 1..JET_LEN {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * a[j] * b[k - j];
            }
            b[k] = acc / k as f64;
        }
        Jet(b)
    }

    /// Simultaneous sine and cosine.
    pub fn sin_cos(self) -> (Self, Self) {
        let a = &self.0;
        let mut s = [0.0; JET_LEN];
        let mut c = [0.0; JET_LEN];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..JET_LEN {
            let (mut sa, mut ca) = (0.0, 0.0);
            for j in 1..=k {
                sa += j as f64 * a[j] * c[k - j];
                ca += j as f64 * a[j] * s[k - j];
            }
            s[k] = sa / k as f64;
            c[k] = -ca / k as f64;
        }
        (Jet(s), Jet(c))
    }

    pub fn sinh_cosh(self) -> (Self, Self) {
        let a = &self.0;
        let mut s = [0.0; JET_LEN];
        let mut c = [0.0; JET_LEN];
        s[0] = a[0].sinh();
        c[0] = a[0].cosh();
        for k in 1..JET_LEN {
            let (mut sa, mut ca) = (0.0, 0.0);
            for j in 1..=k {
                sa += j as f64 * a[j] * c[k - j];
                ca += j as f64 * a[j] * s[k - j];
            }
            s[k] = sa / k as f64;
            c[k] = ca / k as f64;
        }
        (Jet(s), Jet(c))
    }

    /// `|a|`, with the branch fixed by the sign of the constant term.
    pub fn abs(self) -> Self {
        if self.0[0] < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl Default for Jet {
    fn default() -> Self {
        Jet::constant(0.0)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Jet(out)
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o -= r;
        }
        Jet(out)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.map(|c| -c))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += a[j] * b[k - j];
            }
            out[k] = acc;
        }
        Jet(out)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let (a, b) = (&self.0, &rhs.0);
        let mut c = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            let mut acc = a[k];
            for j in 1..=k {
                acc -= b[j] * c[k - j];
            }
            c[k] = acc / b[0];
        }
        Jet(c)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.0[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.0[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        Jet(self.0.map(|c| c * rhs))
    }
}

/// Scalar arithmetic shared by `f64` and [`Jet`], so curve families and
/// polynomial fields are written once and evaluated either way.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn val(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;

    fn powi(self, n: u32) -> Self {
        let mut out = Self::cst(1.0);
        for _ in 0..n {
            out = out * self;
        }
        out
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn val(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, n: u32) -> Self {
        f64::powi(self, n as i32)
    }
}

impl Real for Jet {
    fn cst(v: f64) -> Self {
        Jet::constant(v)
    }
    fn val(&self) -> f64 {
        self.value()
    }
    fn sin(self) -> Self {
        self.sin_cos().0
    }
    fn cos(self) -> Self {
        self.sin_cos().1
    }
    fn sinh(self) -> Self {
        self.sinh_cosh().0
    }
    fn cosh(self) -> Self {
        self.sinh_cosh().1
    }
    fn exp(self) -> Self {
        Jet::exp(self)
    }
    fn sqrt(self) -> Self {
        Jet::sqrt(self)
    }
}

/// The `k`-th derivative of a jet-valued vector as an ordinary vector.
pub fn vec_derivative(v: &JetVec, k: usize) -> Vector3<f64> {
    Vector3::new(v[0].derivative(k), v[1].derivative(k), v[2].derivative(k))
}

pub fn vec_differentiate(v: &JetVec) -> JetVec {
    [v[0].differentiate(), v[1].differentiate(), v[2].differentiate()]
}

pub fn vec_constant(v: &Vector3<f64>) -> JetVec {
    [Jet::constant(v.x), Jet::constant(v.y), Jet::constant(v.z)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn check(j: Jet, derivs: [f64; JET_LEN]) {
        for (k, d) in derivs.iter().enumerate() {
            assert_relative_eq!(j.derivative(k), *d, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let t = 0.7;
        let x = Jet::variable(t);
        let (s, c) = (t.sin(), t.cos());
        check(x.sin(), [s, c, -s, -c, s]);
        check(x.cos(), [c, -s, -c, s, c]);
        let e = t.exp();
        check(x.exp(), [e; 5]);
        let (sh, ch) = (t.sinh(), t.cosh());
        check(x.sinh(), [sh, ch, sh, ch, sh]);
        check(
            x.sqrt(),
            [t.sqrt(), 0.5 * t.powf(-0.5), -0.25 * t.powf(-1.5), 0.375 * t.powf(-2.5), -0.9375 * t.powf(-3.5)],
        );
        check(x.recip(), [1.0 / t, -1.0 / t.powi(2), 2.0 / t.powi(3), -6.0 / t.powi(4), 24.0 / t.powi(5)]);
        check(
            x.powf(0.25),
            [
                t.powf(0.25),
                0.25 * t.powf(-0.75),
                0.25 * -0.75 * t.powf(-1.75),
                0.25 * -0.75 * -1.75 * t.powf(-2.75),
                0.25 * -0.75 * -1.75 * -2.75 * t.powf(-3.75),
            ],
        );
    }

    #[test]
    fn division_inverts_multiplication() {
        let x = Jet::variable(1.3);
        let a = x.sin() + x * x;
        let b = x.exp() + 2.0;
        let q = (a * b) / b;
        for k in 0..JET_LEN {
            assert_relative_eq!(q.0[k], a.0[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn differentiate_shifts_orders() {
        let x = Jet::variable(0.4);
        let f = x.powi(4);
        let d = f.differentiate();
        assert_relative_eq!(d.derivative(0), 4.0 * 0.4f64.powi(3), epsilon = 1e-14);
        assert_relative_eq!(d.derivative(2), 24.0 * 0.4, epsilon = 1e-12);
    }
}
