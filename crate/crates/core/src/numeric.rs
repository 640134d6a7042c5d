//! Small numerical kernels shared across modules.

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&mut f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Fritsch–Carlson limited slopes for monotone cubic Hermite interpolation of
/// increasing data `(x, y)`. `raw` are the preferred slopes at the nodes.
pub fn monotone_slopes(x: &[f64], y: &[f64], raw: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = raw.to_vec();
    for i in 0..n.saturating_sub(1) {
        let delta = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        if delta <= 0.0 {
            d[i] = 0.0;
            d[i + 1] = 0.0;
            continue;
        }
        let a = d[i] / delta;
        let b = d[i + 1] / delta;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            d[i] = tau * a * delta;
            d[i + 1] = tau * b * delta;
        }
    }
    d
}

/// Cubic Hermite interpolation on one interval.
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let u = (x - x0) / h;
    let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
    let h10 = u * (1.0 - u) * (1.0 - u);
    let h01 = u * u * (3.0 - 2.0 * u);
    let h11 = u * u * (u - 1.0);
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Sixth-order finite-difference first derivative of uniformly spaced
/// samples; one-sided stencils at the three ends of each side.
pub fn fd_derivative<V>(values: &[V], h: f64) -> Vec<V>
where
    V: Copy + std::ops::Add<Output = V> + std::ops::Sub<Output = V> + std::ops::Mul<f64, Output = V>,
{
    const STENCILS: [[f64; 7]; 4] = [
        [-147.0, 360.0, -450.0, 400.0, -225.0, 72.0, -10.0],
        [-10.0, -77.0, 150.0, -100.0, 50.0, -15.0, 2.0],
        [2.0, -24.0, -35.0, 80.0, -30.0, 8.0, -1.0],
        [-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0],
    ];
    let n = values.len();
    assert!(n >= 7, "finite differences need at least 7 samples");
    let f = values;
    let scale = 1.0 / (60.0 * h);
    (0..n)
        .map(|i| {
            if i >= 3 && i + 3 < n {
                weighted(&f[i - 3..i + 4], &STENCILS[3]) * scale
            } else if i < 3 {
                weighted(&f[..7], &STENCILS[i]) * scale
            } else {
                // mirrored stencil, negated
                let c = STENCILS[n - 1 - i];
                let mirrored: [f64; 7] = std::array::from_fn(|k| -c[6 - k]);
                weighted(&f[n - 7..], &mirrored) * scale
            }
        })
        .collect()
}

fn weighted<V>(f: &[V], c: &[f64; 7]) -> V
where
    V: Copy + std::ops::Add<Output = V> + std::ops::Mul<f64, Output = V>,
{
    let mut acc = f[0] * c[0];
    for k in 1..7 {
        acc = acc + f[k] * c[k];
    }
    acc
}

/// Trapezoid rule over a grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
            v[n - 1] = b;
            v
        }
    }
}
