//! Quintic B-spline interpolation of sampled space curves.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::jet::Real;

const DEGREE: usize = 5;
const ORDER: usize = DEGREE + 1;

/// Interpolating quintic B-spline through `(tᵢ, pᵢ)` with knots placed by
/// averaging consecutive parameter values.
#[derive(Debug, Clone)]
pub struct QuinticSpline {
    knots: Vec<f64>,
    coeffs: Vec<Vector3<f64>>,
}

impl QuinticSpline {
    pub fn interpolate(params: &[f64], points: &[Vector3<f64>]) -> Result<Self> {
        let n = params.len();
        if n != points.len() {
            return Err(Error::InvalidCurve("parameter and point counts differ".into()));
        }
        if n < ORDER {
            return Err(Error::InvalidCurve(format!("quintic interpolation needs at least {ORDER} samples, got {n}")));
        }
        let mut knots = Vec::with_capacity(n + ORDER);
        knots.extend(std::iter::repeat_n(params[0], ORDER));
        for j in 1..n - DEGREE {
            let avg = params[j..j + DEGREE].iter().sum::<f64>() / DEGREE as f64;
            knots.push(avg);
        }
        knots.extend(std::iter::repeat_n(params[n - 1], ORDER));

        // Collocation matrix is banded and totally positive: eliminate
        // without pivoting.
        let mut rows: Vec<(usize, [f64; ORDER])> = Vec::with_capacity(n);
        for &t in params {
            let span = find_span(&knots, n, t);
            rows.push((span - DEGREE, basis_functions(&knots, span, t)));
        }
        let lo = rows.iter().enumerate().map(|(i, (c0, _))| i.saturating_sub(*c0)).max().unwrap_or(0);
        let width = lo + ORDER;
        // band[i][k] holds column (i - lo + k).
        let mut band = vec![vec![0.0; width]; n];
        for (i, (c0, vals)) in rows.iter().enumerate() {
            for (k, v) in vals.iter().enumerate() {
                let col = c0 + k;
                let off = col + lo - i;
                band[i][off] = *v;
            }
        }
        let mut rhs: Vec<Vector3<f64>> = points.to_vec();
        for i in 0..n {
            let pivot = band[i][lo];
            if pivot.abs() < 1e-300 {
                return Err(Error::InvalidCurve("spline collocation matrix is singular".into()));
            }
            for r in i + 1..(i + lo + 1).min(n) {
                let off_r = i + lo - r;
                let factor = band[r][off_r] / pivot;
                if factor == 0.0 {
                    continue;
                }
                for c in i..(i + width - lo).min(n) {
                    let v = band[i][c + lo - i];
                    band[r][c + lo - r] -= factor * v;
                }
                let ri = rhs[i];
                rhs[r] -= ri * factor;
            }
        }
        let mut coeffs = vec![Vector3::zeros(); n];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            for c in i + 1..(i + width - lo).min(n) {
                acc -= coeffs[c] * band[i][c + lo - i];
            }
            coeffs[i] = acc / band[i][lo];
        }
        Ok(QuinticSpline { knots, coeffs })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    /// de Boor evaluation; works for jets as well as plain values.
    pub fn eval<T: Real>(&self, t: T) -> [T; 3] {
        let n = self.coeffs.len();
        let span = find_span(&self.knots, n, t.val());
        let mut d: [[T; 3]; ORDER] = std::array::from_fn(|j| {
            let c = self.coeffs[span - DEGREE + j];
            [T::cst(c.x), T::cst(c.y), T::cst(c.z)]
        });
        for r in 1..=DEGREE {
            for j in (r..=DEGREE).rev() {
                let i = span - DEGREE + j;
                let left = self.knots[i];
                let right = self.knots[i + ORDER - r];
                let alpha = (t - left) * (1.0 / (right - left));
                for c in 0..3 {
                    d[j][c] = d[j - 1][c] + (d[j][c] - d[j - 1][c]) * alpha;
                }
            }
        }
        d[DEGREE]
    }
}

fn find_span(knots: &[f64], n_coeffs: usize, t: f64) -> usize {
    let hi = n_coeffs - 1;
    if t >= knots[hi + 1] {
        return hi;
    }
    if t <= knots[DEGREE] {
        return DEGREE;
    }
    // Largest span with knots[span] <= t.
    let idx = knots[DEGREE..=hi + 1].partition_point(|k| *k <= t);
    (DEGREE + idx - 1).clamp(DEGREE, hi)
}

fn basis_functions(knots: &[f64], span: usize, t: f64) -> [f64; ORDER] {
    let mut n = [0.0; ORDER];
    let mut left = [0.0; ORDER];
    let mut right = [0.0; ORDER];
    n[0] = 1.0;
    for j in 1..=DEGREE {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            let temp = n[r] / (right[r + 1] + left[j - r]);
            n[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j] = saved;
    }
    n
}
