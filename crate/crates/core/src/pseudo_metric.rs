//! Constant symmetric bilinear forms on R³ and the causal geometry they induce.
//!
//! A [`PseudoMetric`] is any non-degenerate symmetric 3×3 matrix `G`; vectors
//! are paired as `(u, v) = uᵀ G v`. The Euclidean metric has index 0 and the
//! standard Minkowski metric `diag(1, 1, -1)` has index 1.
//!
//! Position-dependent metrics (Hessian metrics of scalar fields) implement the
//! [`MetricField`] trait and hand out a [`PseudoMetric`] per point.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, JetVec};

/// Default width of the lightlike band, relative to the squared Euclidean norm.
pub const DEFAULT_CAUSAL_TOLERANCE: f64 = 1e-9;

const DEGENERACY_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Lightlike,
}

impl CausalCharacter {
    /// `+1`, `-1` or `0`: the sign of `(v, v)`.
    pub fn sign(self) -> f64 {
        match self {
            CausalCharacter::Spacelike => 1.0,
            CausalCharacter::Timelike => -1.0,
            CausalCharacter::Lightlike => 0.0,
        }
    }
}

/// Causal character of a 2-dimensional subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlaneCharacter {
    Spacelike,
    Timelike,
    Lightlike,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoMetric {
    matrix: Matrix3<f64>,
    inverse: Matrix3<f64>,
    /// Eigenvalues in descending order.
    eigenvalues: Vector3<f64>,
    index: usize,
    causal_tol: f64,
}

impl PseudoMetric {
    pub fn euclidean() -> Self {
        Self::diagonal([1.0, 1.0, 1.0]).expect("identity is non-degenerate")
    }

    /// `diag(1, 1, -1)`.
    pub fn minkowski() -> Self {
        Self::diagonal([1.0, 1.0, -1.0]).expect("minkowski is non-degenerate")
    }

    pub fn diagonal(d: [f64; 3]) -> Result<Self> {
        Self::from_matrix(Matrix3::from_diagonal(&Vector3::from(d)))
    }

    /// Builds a metric from a symmetric matrix. Asymmetry beyond rounding
    /// noise and near-singular matrices are rejected.
    pub fn from_matrix(matrix: Matrix3<f64>) -> Result<Self> {
        let scale = matrix.amax();
        if !scale.is_finite() {
            return Err(Error::Invalid("metric matrix has non-finite entries".into()));
        }
        if (matrix - matrix.transpose()).amax() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NonSymmetricMetric);
        }
        let matrix = (matrix + matrix.transpose()) * 0.5;
        let eig = SymmetricEigen::new(matrix);
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        let max_abs = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let min_abs = ev.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
        if max_abs == 0.0 || min_abs < DEGENERACY_RATIO * max_abs {
            return Err(Error::DegenerateMetric { min_abs, max_abs });
        }
        let inverse = matrix.try_inverse().ok_or(Error::DegenerateMetric { min_abs, max_abs })?;
        let index = ev.iter().filter(|x| **x < 0.0).count();
        Ok(PseudoMetric {
            matrix,
            inverse,
            eigenvalues: Vector3::new(ev[0], ev[1], ev[2]),
            index,
            causal_tol: DEFAULT_CAUSAL_TOLERANCE,
        })
    }

    /// Row-major 9-element form, as used in configuration files.
    pub fn from_row_major(entries: &[f64]) -> Result<Self> {
        if entries.len() != 9 {
            return Err(Error::Invalid(format!("metric needs 9 entries, got {}", entries.len())));
        }
        Self::from_matrix(Matrix3::from_row_slice(entries))
    }

    pub fn with_causal_tolerance(mut self, tol: f64) -> Self {
        self.causal_tol = tol;
        self
    }

    /// The metric `-G`; index `k` becomes `3 - k`.
    pub fn negated(&self) -> Self {
        PseudoMetric {
            matrix: -self.matrix,
            inverse: -self.inverse,
            eigenvalues: Vector3::new(-self.eigenvalues[2], -self.eigenvalues[1], -self.eigenvalues[0]),
            index: 3 - self.index,
            causal_tol: self.causal_tol,
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &Matrix3<f64> {
        &self.inverse
    }

    pub fn eigenvalues(&self) -> &Vector3<f64> {
        &self.eigenvalues
    }

    /// Number of negative eigenvalues.
    pub fn index(&self) -> usize {
        self.index
    }

    /// Signs of the eigenvalues, largest eigenvalue first.
    pub fn signature(&self) -> [i8; 3] {
        self.eigenvalues.map(|l| if l > 0.0 { 1i8 } else { -1 }).into()
    }

    pub fn causal_tolerance(&self) -> f64 {
        self.causal_tol
    }

    pub fn is_euclidean_like(&self) -> bool {
        self.index == 0
    }

    pub fn inner(&self, u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
        u.dot(&(self.matrix * v))
    }

    pub fn norm_sq(&self, v: &Vector3<f64>) -> f64 {
        self.inner(v, v)
    }

    /// `sqrt(|(v, v)|)`.
    pub fn pseudo_norm(&self, v: &Vector3<f64>) -> f64 {
        self.norm_sq(v).abs().sqrt()
    }

    pub fn classify_vector(&self, v: &Vector3<f64>) -> Result<CausalCharacter> {
        let e2 = v.norm_squared();
        if e2 == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.classify_value(self.norm_sq(v), e2))
    }

    /// Classifies a precomputed self-product `q = (v, v)` of a vector whose
    /// squared Euclidean norm is `euclid_sq`.
    pub fn classify_value(&self, q: f64, euclid_sq: f64) -> CausalCharacter {
        let band = self.causal_tol * euclid_sq;
        if q > band {
            CausalCharacter::Spacelike
        } else if q < -band {
            CausalCharacter::Timelike
        } else {
            CausalCharacter::Lightlike
        }
    }

    /// Vector product: the unique `w` with `(w, x) = det(u, v, x)` for all `x`.
    pub fn cross(&self, u: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
        self.inverse * u.cross(v)
    }

    pub fn classify_plane(&self, u: &Vector3<f64>, v: &Vector3<f64>) -> Result<PlaneCharacter> {
        let (p, q) = euclidean_plane_basis(u, v)?;
        let gram = Matrix2::new(self.inner(&p, &p), self.inner(&p, &q), self.inner(&q, &p), self.inner(&q, &q));
        let (l1, l2) = sym2_eigenvalues(&gram);
        let band = self.causal_tol * self.spectral_radius();
        Ok(if l1.abs() <= band || l2.abs() <= band {
            PlaneCharacter::Lightlike
        } else if l1 > 0.0 && l2 > 0.0 {
            PlaneCharacter::Spacelike
        } else if l1 < 0.0 && l2 < 0.0 {
            // Only reachable for index >= 2; the negated form is spacelike.
            PlaneCharacter::Spacelike
        } else {
            PlaneCharacter::Timelike
        })
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.amax()
    }

    /// Euclidean-orthonormal basis of the metric-orthogonal complement of `v`.
    pub fn orthogonal_complement(&self, v: &Vector3<f64>) -> Result<(Vector3<f64>, Vector3<f64>)> {
        let covector = self.matrix * v;
        if covector.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        let n = covector.normalize();
        let seed = smallest_axis(&n);
        let p = (seed - n * n.dot(&seed)).normalize();
        let q = n.cross(&p);
        Ok((p, q))
    }

    /// `v / sqrt(|(v, v)|)`, or `None` for (numerically) null vectors.
    pub fn normalize(&self, v: &Vector3<f64>) -> Option<Vector3<f64>> {
        let q = self.norm_sq(v);
        if q.abs() <= self.causal_tol * v.norm_squared() || v.norm_squared() == 0.0 {
            None
        } else {
            Some(v / q.abs().sqrt())
        }
    }

    /// Removes from `v` its component along the non-null vector `e`.
    pub fn project_out(&self, v: &Vector3<f64>, e: &Vector3<f64>) -> Vector3<f64> {
        v - e * (self.inner(v, e) / self.norm_sq(e))
    }

    /// Lightlike partner of a lightlike `k`: the unique lightlike `b` with
    /// `(k, b) = -1` that is orthogonal to the non-null vector `w`, where
    /// `w` itself is orthogonal to `k`.
    pub fn null_partner(&self, k: &Vector3<f64>, w: &Vector3<f64>) -> Vector3<f64> {
        let v0 = self.matrix * k;
        let v1 = self.project_out(&v0, w);
        let v = -v1 / self.inner(&v1, k);
        v + k * (0.5 * self.norm_sq(&v))
    }

    /// Lightlike directions inside `span{u, v}`, Euclidean-normalized.
    /// A timelike plane has two, a lightlike plane one (returned twice).
    pub fn null_directions(&self, u: &Vector3<f64>, v: &Vector3<f64>) -> Result<[Vector3<f64>; 2]> {
        let (p, q) = euclidean_plane_basis(u, v)?;
        let gram = Matrix2::new(self.inner(&p, &p), self.inner(&p, &q), self.inner(&q, &p), self.inner(&q, &q));
        let eig = gram.symmetric_eigen();
        let (mut ip, mut im) = (0usize, 1usize);
        if eig.eigenvalues[0] < eig.eigenvalues[1] {
            std::mem::swap(&mut ip, &mut im);
        }
        let (lp, lm) = (eig.eigenvalues[ip], eig.eigenvalues[im]);
        let band = self.causal_tol * self.spectral_radius();
        let vec_of = |c: nalgebra::Vector2<f64>| p * c[0] + q * c[1];
        let ep = vec_of(eig.eigenvectors.column(ip).into_owned());
        let em = vec_of(eig.eigenvectors.column(im).into_owned());
        if lm.abs() <= band {
            return Ok([em.normalize(), em.normalize()]);
        }
        if lp.abs() <= band {
            return Ok([ep.normalize(), ep.normalize()]);
        }
        if lp > 0.0 && lm < 0.0 {
            let a = ep / lp.sqrt();
            let b = em / (-lm).sqrt();
            Ok([(a + b).normalize(), (a - b).normalize()])
        } else {
            Err(Error::NoLightlikeTangent)
        }
    }
}

/// Euclidean-orthonormal basis of `span{u, v}`.
pub(crate) fn euclidean_plane_basis(u: &Vector3<f64>, v: &Vector3<f64>) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 || u.cross(v).norm() <= 1e-12 * nu * nv {
        return Err(Error::DependentVectors);
    }
    let p = u / nu;
    let q = (v - p * p.dot(v)).normalize();
    Ok((p, q))
}

fn sym2_eigenvalues(m: &Matrix2<f64>) -> (f64, f64) {
    let mean = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let half_diff = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let r = (half_diff * half_diff + m[(0, 1)] * m[(1, 0)]).sqrt();
    (mean + r, mean - r)
}

/// Canonical basis vector least aligned with `v`.
pub(crate) fn smallest_axis(v: &Vector3<f64>) -> Vector3<f64> {
    let a = v.abs();
    if a.x <= a.y && a.x <= a.z {
        Vector3::x()
    } else if a.y <= a.z {
        Vector3::y()
    } else {
        Vector3::z()
    }
}

/// Christoffel symbols `Γ^k_ij`, stored as one symmetric matrix per `k`.
pub type Christoffel = [Matrix3<f64>; 3];

/// Contraction `Γ^k_ij u^i v^j`.
pub fn contract_christoffel(gamma: &Christoffel, u: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
    Vector3::new(u.dot(&(gamma[0] * v)), u.dot(&(gamma[1] * v)), u.dot(&(gamma[2] * v)))
}

/// A (possibly position-dependent) metric on a region of R³ with constant
/// index, together with its Levi-Civita connection.
pub trait MetricField: std::fmt::Debug + Send + Sync {
    /// The metric at `p`.
    fn metric_at(&self, p: &Vector3<f64>) -> Result<PseudoMetric>;

    fn matrix_at(&self, p: &Vector3<f64>) -> Matrix3<f64>;

    fn christoffel_at(&self, p: &Vector3<f64>) -> Christoffel;

    /// Metric entries along a jet-valued position. Entry `(i, j)`.
    fn matrix_along(&self, p: &JetVec) -> [[Jet; 3]; 3];

    /// The constant metric, when the field is flat.
    fn as_constant(&self) -> Option<&PseudoMetric>;

    fn causal_tolerance(&self) -> f64;
}

impl MetricField for PseudoMetric {
    fn metric_at(&self, _p: &Vector3<f64>) -> Result<PseudoMetric> {
        Ok(self.clone())
    }

    fn matrix_at(&self, _p: &Vector3<f64>) -> Matrix3<f64> {
        self.matrix
    }

    fn christoffel_at(&self, _p: &Vector3<f64>) -> Christoffel {
        [Matrix3::zeros(); 3]
    }

    fn matrix_along(&self, _p: &JetVec) -> [[Jet; 3]; 3] {
        let m = &self.matrix;
        std::array::from_fn(|i| std::array::from_fn(|j| Jet::constant(m[(i, j)])))
    }

    fn as_constant(&self) -> Option<&PseudoMetric> {
        Some(self)
    }

    fn causal_tolerance(&self) -> f64 {
        self.causal_tol
    }
}
