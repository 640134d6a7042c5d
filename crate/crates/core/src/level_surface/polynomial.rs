//! Sparse trivariate polynomials with symbolic differentiation.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::jet::Real;

/// One monomial `coeff · x^i y^j z^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub powers: [u32; 3],
    pub coeff: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Term>", into = "Vec<Term>")]
pub struct Polynomial {
    terms: BTreeMap<[u32; 3], f64>,
}

impl From<Vec<Term>> for Polynomial {
    fn from(terms: Vec<Term>) -> Self {
        Polynomial::from_terms(terms.into_iter().map(|t| (t.powers, t.coeff)))
    }
}

impl From<Polynomial> for Vec<Term> {
    fn from(p: Polynomial) -> Self {
        p.terms.into_iter().map(|(powers, coeff)| Term { powers, coeff }).collect()
    }
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms([([0, 0, 0], c)])
    }

    pub fn from_terms<I: IntoIterator<Item = ([u32; 3], f64)>>(terms: I) -> Self {
        let mut p = Self::default();
        for (powers, c) in terms {
            p.add_term(powers, c);
        }
        p
    }

    pub fn add_term(&mut self, powers: [u32; 3], coeff: f64) {
        let entry = self.terms.entry(powers).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&powers);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ([u32; 3], f64)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, *v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|p| p.iter().sum()).max().unwrap_or(0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_terms(self.terms().map(|(p, c)| (p, c * s)))
    }

    pub fn add(&self, other: &Polynomial) -> Self {
        let mut out = self.clone();
        for (p, c) in other.terms() {
            out.add_term(p, c);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Self {
        let mut out = Polynomial::zero();
        for (pa, ca) in self.terms() {
            for (pb, cb) in other.terms() {
                out.add_term([pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]], ca * cb);
            }
        }
        out
    }

    /// Partial derivative along coordinate `axis`.
    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = Polynomial::zero();
        for (mut p, c) in self.terms() {
            if p[axis] == 0 {
                continue;
            }
            let k = p[axis];
            p[axis] -= 1;
            out.add_term(p, c * k as f64);
        }
        out
    }

    pub fn eval<T: Real>(&self, x: &[T; 3]) -> T {
        if self.terms.is_empty() {
            return T::cst(0.0);
        }
        let max_pow: [u32; 3] = std::array::from_fn(|axis| self.terms.keys().map(|p| p[axis]).max().unwrap_or(0));
        let powers: [Vec<T>; 3] = std::array::from_fn(|axis| {
            let mut v = Vec::with_capacity(max_pow[axis] as usize + 1);
            v.push(T::cst(1.0));
            for k in 1..=max_pow[axis] as usize {
                let prev = v[k - 1];
                v.push(prev * x[axis]);
            }
            v
        });
        let mut acc = T::cst(0.0);
        for (p, c) in self.terms() {
            let m = powers[0][p[0] as usize] * powers[1][p[1] as usize] * powers[2][p[2] as usize];
            acc = acc + m * c;
        }
        acc
    }

    pub fn eval_at(&self, p: &Vector3<f64>) -> f64 {
        self.eval(&[p.x, p.y, p.z])
    }

    /// The linear polynomial `x_axis`.
    pub fn coordinate(axis: usize) -> Self {
        let mut p = [0u32; 3];
        p[axis] = 1;
        Self::from_terms([(p, 1.0)])
    }

    /// `⟨B (x - P), x - P⟩`.
    pub fn quadric(b: &Matrix3<f64>, center: &Vector3<f64>) -> Self {
        let shifted: [Polynomial; 3] =
            std::array::from_fn(|i| Polynomial::coordinate(i).add(&Polynomial::constant(-center[i])));
        let mut out = Polynomial::zero();
        for i in 0..3 {
            for j in 0..3 {
                let bij = 0.5 * (b[(i, j)] + b[(j, i)]);
                if bij != 0.0 {
                    out = out.add(&shifted[i].mul(&shifted[j]).scaled(bij));
                }
            }
        }
        out
    }

    /// `⟨x, x⟩`.
    pub fn sphere() -> Self {
        Self::quadric(&Matrix3::identity(), &Vector3::zeros())
    }

    /// `(x² + y² + z² + R² − a²)² − 4R²(x² + y²)`; its zero set is the torus
    /// with tube radius `a` around a circle of radius `R` in the xy-plane.
    pub fn torus(major: f64, minor: f64) -> Self {
        let r2 = Polynomial::sphere();
        let q = r2.add(&Polynomial::constant(major * major - minor * minor));
        let rho2 = Polynomial::from_terms([([2, 0, 0], 1.0), ([0, 2, 0], 1.0)]);
        q.mul(&q).add(&rho2.scaled(-4.0 * major * major))
    }

    /// `x⁴ + y⁴ + z⁴ + x² + y² + z²`.
    pub fn quartic_example() -> Self {
        Self::from_terms([
            ([4, 0, 0], 1.0),
            ([0, 4, 0], 1.0),
            ([0, 0, 4], 1.0),
            ([2, 0, 0], 1.0),
            ([0, 2, 0], 1.0),
            ([0, 0, 2], 1.0),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;
    use approx::assert_relative_eq;

    #[test]
    fn derivative_of_monomials() {
        let p = Polynomial::from_terms([([3, 1, 0], 2.0), ([0, 0, 2], -1.0)]);
        let dx = p.derivative(0);
        assert_eq!(dx, Polynomial::from_terms([([2, 1, 0], 6.0)]));
        let dz = p.derivative(2);
        assert_eq!(dz, Polynomial::from_terms([([0, 0, 1], -2.0)]));
        assert!(p.derivative(1).derivative(1).is_zero());
    }

    #[test]
    fn quadric_expansion_matches_direct_form() {
        let b = Matrix3::new(0.25, 0.1, 0.0, 0.1, 1.0, -0.2, 0.0, -0.2, -1.0);
        let c = Vector3::new(0.5, -1.0, 2.0);
        let q = Polynomial::quadric(&b, &c);
        let x = Vector3::new(1.3, 0.2, -0.7);
        let d = x - c;
        assert_relative_eq!(q.eval_at(&x), d.dot(&(b * d)), epsilon = 1e-13);
    }

    #[test]
    fn torus_vanishes_on_latitude_circle() {
        let f = Polynomial::torus(2.0, 0.5);
        for t in [0.0, 0.4, 2.0, 5.5] {
            let p = Vector3::new(2.5 * f64::cos(t), 2.5 * f64::sin(t), 0.0);
            assert!(f.eval_at(&p).abs() < 1e-12);
        }
    }

    #[test]
    fn jet_evaluation_matches_derivative_polynomials() {
        let f = Polynomial::quartic_example();
        // along the line x = (t, 2t, -t) about t = 0.3
        let t = Jet::variable(0.3);
        let x = [t, t * 2.0, -t];
        let jf = f.eval(&x);
        // d/dt f = grad f · (1, 2, -1)
        let p = Vector3::new(0.3, 0.6, -0.3);
        let dir = Vector3::new(1.0, 2.0, -1.0);
        let grad = Vector3::new(f.derivative(0).eval_at(&p), f.derivative(1).eval_at(&p), f.derivative(2).eval_at(&p));
        assert_relative_eq!(jf.derivative(1), grad.dot(&dir), epsilon = 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let f = Polynomial::torus(2.0, 0.5);
        let s = serde_json::to_string(&f).unwrap();
        let back: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(f, back);
        assert!(serde_json::from_str::<Polynomial>(r#"[{"powers":[1,0,0],"coeff":1,"x":2}]"#).is_err());
    }
}
