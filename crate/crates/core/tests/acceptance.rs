//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Every bound below is absolute unless stated otherwise.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use framekit::characterize::{
    detect_quadric, detect_sphere, light_cone_relation, lightlike_ruling, lightlike_sphere_test, DetectOptions,
    FitTolerances, MembershipReport, QuadricKind, Verdict,
};
use framekit::curves::{AngleLaw, MinkowskiSurface, ProjectionMode};
use framekit::frames::{bishop, frenet, holonomy, null_frame, regauge, BishopGauge, FrameField};
use framekit::level_surface::{
    hessian_metric, integrate_level_curve, level_residual_euclidean, level_residual_hessian, normal_curvature,
    project_to_level, tangent_character, ConverseOptions, LevelResidualReport, LevelTolerances, Polynomial,
    ScalarField,
};
use framekit::{CausalCharacter, Curve, Family, MetricField, ParamCurve, PseudoMetric, Result};
use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SAMPLES: usize = 512;

/// Measurements of one criterion; fails if any bound is exceeded.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
    worst: Vec<(String, f64, f64)>,
}

impl Tally {
    fn le(&mut self, what: &str, value: f64, bound: f64) {
        self.checks += 1;
        if !(value <= bound) {
            self.failures.push(format!("{what}: {value:.3e} > {bound:.1e}"));
        }
        match self.worst.iter_mut().find(|w| w.0 == what_key(what)) {
            Some(w) => {
                if value.is_nan() || value > w.1 {
                    w.1 = value;
                }
            }
            None => self.worst.push((what_key(what), value, bound)),
        }
    }

    fn ge(&mut self, what: &str, value: f64, bound: f64) {
        self.checks += 1;
        if !(value >= bound) {
            self.failures.push(format!("{what}: {value:.3e} < {bound:.1e}"));
        }
    }

    fn ok(&mut self, what: &str, cond: bool) {
        self.checks += 1;
        if !cond {
            self.failures.push(what.to_string());
        }
    }

    fn summary(&self) -> String {
        let worst: Vec<String> = self.worst.iter().map(|(k, v, b)| format!("{k} {v:.2e} (<= {b:.0e})")).collect();
        format!("{} checks; {}", self.checks, worst.join(", "))
    }
}

/// Groups measurements by the text before the first `[`.
fn what_key(what: &str) -> String {
    what.split('[').next().unwrap_or(what).trim().to_string()
}

/// Frame-level invariants accumulated across the whole suite.
#[derive(Default)]
struct Invariants {
    frames: usize,
    gram_drift: f64,
    bishop_frames: usize,
    parallel_defect: f64,
}

impl Invariants {
    fn track(&mut self, ff: &FrameField) -> Result<()> {
        self.frames += 1;
        self.gram_drift = self.gram_drift.max(ff.gram_drift());
        if ff.kind() == framekit::frames::FrameKind::Bishop {
            self.bishop_frames += 1;
            self.parallel_defect = self.parallel_defect.max(ff.relatively_parallel_defect()?);
        }
        Ok(())
    }
}

fn curve(f: Family, dom: (f64, f64)) -> Result<Curve> {
    Curve::from_family(f, dom, SAMPLES)
}

fn param(c: &Curve, g: &PseudoMetric) -> Result<Arc<ParamCurve>> {
    Ok(Arc::new(framekit::reparametrize(c, g)?))
}

fn bishop_of(c: &Curve, g: &PseudoMetric, inv: &mut Invariants) -> Result<FrameField> {
    let ff = bishop(&param(c, g)?, BishopGauge::default())?;
    inv.track(&ff)?;
    Ok(ff)
}

fn hinted(center: Vector3<f64>) -> DetectOptions {
    DetectOptions { center_hint: Some(center), ..Default::default() }
}

fn center_error(r: &MembershipReport, truth: &Vector3<f64>) -> f64 {
    r.center_vector().map_or(f64::INFINITY, |c| (c - truth).norm())
}

fn sphere_curve(center: Vector3<f64>, radius: f64, lon: AngleLaw, lat: AngleLaw) -> Family {
    Family::SphereCurve { center: center.into(), radius, lon, lat }
}

fn minkowski_curve(
    surface: MinkowskiSurface,
    center: Vector3<f64>,
    radius: f64,
    lon: AngleLaw,
    lat: AngleLaw,
) -> Family {
    Family::MinkowskiSphereCurve { surface, center: center.into(), radius, lon, lat }
}

fn offset() -> Vector3<f64> {
    Vector3::new(0.3, -0.2, 0.1)
}

fn euclidean_spheres(inv: &mut Invariants) -> Result<Tally> {
    let mut t = Tally::default();
    let p = offset();
    for r in [0.5, 1.0, 2.0, 5.0] {
        let cases = [
            ("great circle", sphere_curve(p, r, AngleLaw::linear(0.2, 1.0), AngleLaw::default()), (0.0, 6.0), false),
            (
                "small circle",
                sphere_curve(p, r, AngleLaw::linear(0.0, 1.0), AngleLaw::linear(0.6, 0.0)),
                (0.0, 6.0),
                true,
            ),
            (
                "spiral",
                sphere_curve(p, r, AngleLaw::linear(0.0, 1.0), AngleLaw::linear(-1.2, 2.4 / (4.0 * PI))),
                (0.0, 4.0 * PI),
                false,
            ),
        ];
        for (name, fam, dom, needs_center) in cases {
            let ff = bishop_of(&curve(fam, dom)?, &PseudoMetric::euclidean(), inv)?;
            let opts = if needs_center { hinted(p) } else { DetectOptions::default() };
            let rep = detect_sphere(&ff, &opts)?;
            t.ok(&format!("{name} r={r}: verdict {:?}", rep.verdict), rep.verdict == Verdict::Sphere);
            let rerr = (rep.radius.unwrap_or(f64::NAN) - r).abs() / r;
            t.le(&format!("relative radius error [{name} r={r}]"), rerr, 1e-3);
            t.le(&format!("center error [{name} r={r}]"), center_error(&rep, &p), 1e-3);
        }
    }
    Ok(t)
}

fn minkowski_spheres(inv: &mut Invariants) -> Result<Tally> {
    let mut t = Tally::default();
    let g = PseudoMetric::minkowski();
    let p = offset();
    for r in [0.7, 2.0] {
        let cases = [
            (
                "timelike on S",
                minkowski_curve(
                    MinkowskiSurface::PseudoSphere,
                    p,
                    r,
                    AngleLaw { amp: 0.3, freq: 1.0, ..Default::default() },
                    AngleLaw::linear(0.0, 1.0),
                ),
                (-1.0, 1.0),
                Verdict::PseudoSphere,
                CausalCharacter::Timelike,
            ),
            (
                "spacelike on S",
                minkowski_curve(
                    MinkowskiSurface::PseudoSphere,
                    p,
                    r,
                    AngleLaw::linear(0.0, 1.0),
                    AngleLaw { amp: 0.3, freq: 2.0, ..Default::default() },
                ),
                (0.0, 6.0),
                Verdict::PseudoSphere,
                CausalCharacter::Spacelike,
            ),
            (
                "spacelike on H",
                minkowski_curve(
                    MinkowskiSurface::PseudoHyperbolic,
                    p,
                    r,
                    AngleLaw::linear(0.0, 1.0),
                    AngleLaw { c0: 1.0, amp: 0.2, freq: 2.0, ..Default::default() },
                ),
                (0.0, 6.0),
                Verdict::PseudoHyperbolic,
                CausalCharacter::Spacelike,
            ),
        ];
        for (name, fam, dom, verdict, causal) in cases {
            let c = curve(fam, dom)?;
            let pc = param(&c, &g)?;
            t.ok(&format!("{name} r={r}: causal character {:?}", pc.causal()), pc.causal() == causal);
            let ff = bishop(&pc, BishopGauge::default())?;
            inv.track(&ff)?;
            let rep = detect_sphere(&ff, &DetectOptions::default())?;
            t.ok(&format!("{name} r={r}: verdict {:?}", rep.verdict), rep.verdict == verdict);
            let rerr = (rep.radius.unwrap_or(f64::NAN) - r).abs() / r;
            t.le(&format!("relative radius error [{name} r={r}]"), rerr, 1e-3);
            t.le(&format!("center error [{name} r={r}]"), center_error(&rep, &p), 1e-3);
        }
    }
    let cones = [
        ("light-cone circle", Family::LightConeCircle, (0.0, 6.0), Some(Vector3::zeros()), Vector3::zeros()),
        (
            "wavy light-cone curve",
            minkowski_curve(
                MinkowskiSurface::LightCone,
                p,
                0.0,
                AngleLaw::linear(0.0, 1.0),
                AngleLaw { c0: 1.0, amp: 0.3, freq: 2.0, ..Default::default() },
            ),
            (0.0, 6.0),
            None,
            p,
        ),
    ];
    for (name, fam, dom, hint, truth) in cones {
        let ff = bishop_of(&curve(fam, dom)?, &g, inv)?;
        let opts = DetectOptions { center_hint: hint, ..Default::default() };
        let rep = detect_sphere(&ff, &opts)?;
        t.ok(&format!("{name}: verdict {:?}", rep.verdict), rep.verdict == Verdict::LightCone);
        let a = rep.a.unwrap_or([f64::NAN; 2]);
        t.le(
            &format!("light-cone relation / max(|a1|,1) [{name}]"),
            light_cone_relation(a) / a[0].abs().max(1.0),
            1e-5,
        );
        t.le(&format!("center error [{name}]"), center_error(&rep, &truth), 1e-3);
    }
    Ok(t)
}

/// Phase `atan2(κ₂, κ₁)`, unwrapped along the grid.
fn unwrapped_phase(coeffs: &[[f64; 3]]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        let mut th = c[1].atan2(c[0]);
        if let Some(prev) = out.last() {
            th += TAU * ((prev - th) / TAU).round();
        }
        out.push(th);
    }
    out
}

fn helix_consistency(inv: &mut Invariants) -> Result<Tally> {
    let mut t = Tally::default();
    let g = PseudoMetric::euclidean();
    for (a, b) in [(1.0f64, 1.0f64), (1.5, 0.5), (0.5, 2.0), (2.0, 0.3), (1.0, -0.7)] {
        let w2 = a * a + b * b;
        let dom = if (a, b) == (1.0, 1.0) { (0.0, 4.0 * PI / w2.sqrt()) } else { (0.0, 10.0) };
        let c = curve(Family::helix(a, b), dom)?;
        let pc = param(&c, &g)?;
        let ff = bishop(&pc, BishopGauge::default())?;
        inv.track(&ff)?;
        let fr = frenet(&pc)?;
        inv.track(&fr)?;
        let kappa = a / w2;
        for (kb, kf) in ff.coeffs().iter().zip(fr.coeffs()) {
            t.le(
                &format!("|k1^2+k2^2-k^2| [a={a} b={b}]"),
                (kb[0] * kb[0] + kb[1] * kb[1] - kf[0] * kf[0]).abs(),
                1e-6,
            );
            t.le(&format!("|k - k_exact| [a={a} b={b}]"), (kf[0] - kappa).abs(), 1e-6);
        }
        let th = unwrapped_phase(ff.coeffs());
        let s = ff.grid();
        for i in 1..s.len() - 1 {
            let dth = (th[i + 1] - th[i - 1]) / (s[i + 1] - s[i - 1]);
            t.le(&format!("|theta' - tau| [a={a} b={b}]"), (dth - fr.coeffs()[i][1]).abs(), 1e-4);
        }
        if (a, b) == (1.0, 1.0) {
            t.le("|arc length - 4 pi|", (pc.length() - 4.0 * PI).abs(), 1e-6);
            t.le("|holonomy - 2 pi|", (holonomy(&ff)? - TAU).abs(), 1e-4);
            t.le("|phase turn - 2 pi|", (th[th.len() - 1] - th[0] - TAU).abs(), 1e-4);
        }
    }
    Ok(t)
}

fn minkowski_conics(inv: &mut Invariants) -> Result<Tally> {
    let mut t = Tally::default();
    let g = PseudoMetric::minkowski();
    let (r, c) = (1.2, 0.8);
    let (ha, hb) = (2.0, 1.0);
    // (t′, t′) in arc length, with the locus it selects
    let cases = [
        ("timelike normal", Family::HyperbolicHelix { r, c }, (-1.5, 1.5), -r / (r * r + c * c)),
        ("spacelike normal", Family::helix(ha, hb), (0.0, 8.0), ha / (ha * ha - hb * hb)),
        (
            "lightlike normal",
            Family::polynomial(vec![0.0, 0.0, 0.5], vec![0.0, 1.0], vec![0.0, 0.0, 0.5]),
            (-2.0, 2.0),
            0.0,
        ),
    ];
    for (name, fam, dom, signed_kappa) in cases {
        let pc = param(&curve(fam, dom)?, &g)?;
        t.ok(&format!("{name}: spacelike tangent"), pc.causal() == CausalCharacter::Spacelike);
        let ff = bishop(&pc, BishopGauge::default())?;
        inv.track(&ff)?;
        let [_, e1, e2] = ff.signs();
        t.ok(&format!("{name}: Lorentzian normal plane"), e1 * e2 < 0.0);
        let tt = signed_kappa.signum() * signed_kappa * signed_kappa;
        for k in ff.coeffs() {
            let (k1, k2) = (k[0], k[1]);
            t.le(&format!("conic defect [{name}]"), (e1 * k1 * k1 + e2 * k2 * k2 - tt).abs(), 1e-5);
            if tt == 0.0 {
                t.le(&format!("||k1|-|k2|| [{name}]"), (k1.abs() - k2.abs()).abs(), 1e-5);
            }
        }
    }
    Ok(t)
}

fn null_frames(inv: &mut Invariants) -> Result<Tally> {
    let mut t = Tally::default();
    let g = PseudoMetric::minkowski();
    let raw = |c: &Curve, g: &PseudoMetric| -> Result<Arc<ParamCurve>> {
        Ok(Arc::new(ParamCurve::raw(c, Arc::new(g.clone()) as Arc<dyn MetricField>)?))
    };

    for dir in [[1.0, 0.0, 1.0], [0.6, 0.8, 1.0], [0.0, -2.0, 2.0]] {
        let c = curve(Family::line([0.1, 0.2, -0.3], dir), (-3.0, 3.0))?;
        let ff = null_frame(&raw(&c, &g)?)?;
        inv.track(&ff)?;
        let k1 = ff.coeffs().iter().fold(0.0f64, |m, k| m.max(k[0].abs()));
        t.le(&format!("max |k1| on lightlike line [{dir:?}]"), k1, 1e-8);
    }

    for (name, fam, dom) in [
        ("null curve c=1", Family::NullCurve { c: 1.0 }, (-2.0, 2.0)),
        ("null curve c=0.5", Family::NullCurve { c: 0.5 }, (-1.5, 1.5)),
        ("null helix", Family::helix(1.0, 1.0), (0.0, 6.0)),
    ] {
        let pc = param(&curve(fam, dom)?, &g)?;
        let ff = null_frame(&pc)?;
        inv.track(&ff)?;
        for (s, k) in ff.grid().iter().zip(ff.coeffs()) {
            t.le(&format!("|k1^2 - 1| [{name}]"), (k[0] * k[0] - 1.0).abs(), 1e-6);
            // measured independently from the reparametrized curve
            let acc = pc.derivative(*s, 2)?;
            t.le(&format!("|(a'',a'') - 1| [{name}]"), (g.norm_sq(&acc) - 1.0).abs(), 1e-6);
        }
    }

    let p = offset();
    let surfaces = [
        (1.0, Vector3::new(1.0, 0.0, 0.0)),
        (
            4.0,
            Vector3::new(
                2.0 * 1.3_f64.cosh() * 0.4_f64.cos(),
                2.0 * 1.3_f64.cosh() * 0.4_f64.sin(),
                2.0 * 1.3_f64.sinh(),
            ),
        ),
        (0.0, Vector3::new(0.6, 0.8, 1.0)),
    ];
    for (rho, w) in surfaces {
        for which in 0..2 {
            let line = lightlike_ruling(&p, rho, &(p + w), &g, which, (-10.0, 10.0), 2001)?;
            let defect =
                line.grid().iter().map(|s| (g.norm_sq(&(line.point(*s) - p)) - rho).abs()).fold(0.0f64, f64::max);
            t.le(&format!("ruling membership defect [rho={rho} which={which}]"), defect, 1e-9);
            let ff = null_frame(&raw(&line, &g)?)?;
            let rep = lightlike_sphere_test(&ff, Some((p, rho)), &FitTolerances::default())?;
            t.ok(
                &format!("ruling rho={rho}: verdict {:?}", rep.verdict),
                rep.verdict == if rho == 0.0 { Verdict::LightCone } else { Verdict::PseudoSphere },
            );
        }
    }

    // (0,0,t) is timelike in diag(1,1,-1): all Bishop curvatures vanish, yet
    // (α − P, α − P) = |P_xy|² − (t − P_z)² is never constant.
    let axis = curve(Family::line([0.0; 3], [0.0, 0.0, 1.0]), (-3.0, 3.0))?;
    let ff = bishop_of(&axis, &g, inv)?;
    let k1 = ff.coeffs().iter().fold(0.0f64, |m, k| m.max(k[0].abs()));
    t.le("max |k1| on the axis (Minkowski)", k1, 1e-8);
    let candidates = candidate_surfaces();
    let mut all_fail = true;
    for (pp, _) in &candidates {
        let vals: Vec<f64> = ff.positions().iter().map(|x| g.norm_sq(&(x - pp))).collect();
        let spread =
            vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - vals.iter().cloned().fold(f64::INFINITY, f64::min);
        all_fail &= spread > 1e-3;
    }
    t.ok("axis lies on none of the tested pseudo-spheres (Minkowski)", all_fail);
    let rep = detect_sphere(&ff, &DetectOptions::default())?;
    t.ok(
        &format!("axis detect_sphere verdict {:?}", rep.verdict),
        rep.verdict != Verdict::PseudoSphere
            && rep.verdict != Verdict::PseudoHyperbolic
            && rep.verdict != Verdict::LightCone,
    );

    // a Lorentz metric in which the axis is lightlike
    let null_coords = PseudoMetric::from_matrix(Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0))?;
    let ff = null_frame(&raw(&axis, &null_coords)?)?;
    inv.track(&ff)?;
    let k1 = ff.coeffs().iter().fold(0.0f64, |m, k| m.max(k[0].abs()));
    t.le("max |k1| on the axis (lightlike metric)", k1, 1e-8);
    let mut all_fail = true;
    for (pp, rho) in &candidates {
        let rep = lightlike_sphere_test(&ff, Some((*pp, *rho)), &FitTolerances::default())?;
        all_fail &= rep.verdict == Verdict::None;
    }
    t.ok("axis fails direct membership for every tested candidate", all_fail);
    Ok(t)
}

/// Centers off the plane `y = 0` and a spread of levels, including the light-cone.
fn candidate_surfaces() -> Vec<(Vector3<f64>, f64)> {
    let mut out = Vec::new();
    for cx in [-1.0, 0.0, 0.5] {
        for cy in [-0.7, 0.4, 1.5] {
            for cz in [-1.0, 0.0, 2.0] {
                for rho in [-1.0, 0.0, 0.5, 4.0] {
                    out.push((Vector3::new(cx, cy, cz), rho));
                }
            }
        }
    }
    out
}

fn quadrics(inv: &mut Invariants) -> Result<Tally> {
    let mut t = Tally::default();
    let p = offset();
    let spiral = AngleLaw::linear(-1.0, 2.0 / 6.0);
    let cases: Vec<(&str, Family, Matrix3<f64>, QuadricKind, f64)> = vec![
        (
            "ellipsoid",
            Family::linear_image(
                [[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
                p.into(),
                sphere_curve(Vector3::zeros(), 1.0, AngleLaw::linear(0.0, 1.0), spiral),
            ),
            Matrix3::from_diagonal(&Vector3::new(0.25, 1.0, 1.0)),
            QuadricKind::Ellipsoid,
            1.0,
        ),
        (
            "one-sheeted",
            minkowski_curve(
                MinkowskiSurface::PseudoSphere,
                p,
                1.5,
                AngleLaw::linear(0.0, 1.0),
                AngleLaw { amp: 0.3, freq: 2.0, ..Default::default() },
            ),
            Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0)),
            QuadricKind::OneSheetedHyperboloid,
            2.25,
        ),
        (
            "one-sheeted waist",
            Family::Circle { radius: 1.5, center: p.into() },
            Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0)),
            QuadricKind::OneSheetedHyperboloid,
            2.25,
        ),
        (
            "two-sheeted",
            minkowski_curve(
                MinkowskiSurface::PseudoHyperbolic,
                p,
                1.5,
                AngleLaw::linear(0.0, 1.0),
                AngleLaw { c0: 1.0, amp: 0.2, freq: 2.0, ..Default::default() },
            ),
            Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0)),
            QuadricKind::TwoSheetedHyperboloid,
            -2.25,
        ),
        (
            "two-sheeted, index 2",
            minkowski_curve(
                MinkowskiSurface::PseudoHyperbolic,
                p,
                1.5,
                AngleLaw::linear(0.0, 1.0),
                AngleLaw { c0: 1.0, amp: 0.2, freq: 2.0, ..Default::default() },
            ),
            Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0)),
            QuadricKind::TwoSheetedHyperboloid,
            2.25,
        ),
    ];
    for (name, fam, b, kind, rho) in cases {
        let c = curve(fam, (0.0, 6.0))?;
        let rep = detect_quadric(&c, &b, &p, &DetectOptions::default())?;
        t.ok(
            &format!("{name}: {:?}/{:?}", rep.verdict, rep.quadric_kind),
            rep.verdict == Verdict::Quadric && rep.quadric_kind == Some(kind),
        );
        t.le(&format!("residual [{name}]"), rep.residual, 1e-4);
        t.le(&format!("|rho error| [{name}]"), (rep.rho.unwrap_or(f64::NAN) - rho).abs(), 1e-4);
        let direct = c.samples().iter().map(|(_, x)| ((x - p).dot(&(b * (x - p))) - rho).abs()).fold(0.0f64, f64::max);
        t.le(&format!("oracle membership [{name}]"), direct, 1e-12);
    }

    for r in [0.5, 2.0] {
        let c = curve(sphere_curve(p, r, AngleLaw::linear(0.0, 1.0), spiral), (0.0, 6.0))?;
        let q = detect_quadric(&c, &Matrix3::identity(), &p, &DetectOptions::default())?;
        let ff = bishop_of(&c, &PseudoMetric::euclidean(), inv)?;
        let s = detect_sphere(&ff, &DetectOptions::default())?;
        t.ok(
            &format!("B = I r={r}: {:?}/{:?} vs {:?}", q.verdict, q.quadric_kind, s.verdict),
            q.verdict == Verdict::Quadric
                && q.quadric_kind == Some(QuadricKind::Ellipsoid)
                && s.verdict == Verdict::Sphere,
        );
        let dr = (q.radius.unwrap_or(f64::NAN) - s.radius.unwrap_or(f64::NAN)).abs();
        t.le(&format!("|r_quadric - r_sphere| [r={r}]"), dr, 1e-9);
    }
    Ok(t)
}

fn quartic() -> ScalarField {
    ScalarField::polynomial(Polynomial::quartic_example())
}

fn torus() -> ScalarField {
    ScalarField::polynomial(Polynomial::torus(2.0, 0.5))
}

fn level_fixtures() -> Result<Vec<(&'static str, ScalarField, f64, Curve)>> {
    let projected = |field: Polynomial, level: f64, seed: Family, mode| Family::Projected {
        field,
        level,
        seed: Box::new(seed),
        mode,
    };
    let wavy = |radius: f64, amp: f64| {
        sphere_curve(
            Vector3::zeros(),
            radius,
            AngleLaw::linear(0.0, 1.0),
            AngleLaw { amp, freq: 3.0, ..Default::default() },
        )
    };
    Ok(vec![
        (
            "quartic",
            quartic(),
            3.0,
            curve(projected(Polynomial::quartic_example(), 3.0, wavy(1.0, 0.3), ProjectionMode::Radial), (0.0, TAU))?,
        ),
        (
            "quartic, gradient projection",
            quartic(),
            3.0,
            curve(
                projected(
                    Polynomial::quartic_example(),
                    3.0,
                    sphere_curve(Vector3::zeros(), 1.1, AngleLaw::linear(0.3, 1.0), AngleLaw::linear(-0.9, 0.25)),
                    ProjectionMode::Gradient,
                ),
                (0.0, 6.0),
            )?,
        ),
        (
            "torus",
            torus(),
            0.0,
            curve(projected(Polynomial::torus(2.0, 0.5), 0.0, wavy(2.5, 0.08), ProjectionMode::Gradient), (0.0, TAU))?,
        ),
        (
            "torus parallel",
            torus(),
            0.0,
            curve(Family::TorusLatitude { major: 2.0, minor: 0.5, angle: 0.4 }, (0.0, TAU))?,
        ),
    ])
}

fn level_surfaces() -> Result<Tally> {
    let mut t = Tally::default();
    let tol = LevelTolerances::default();
    for (name, field, level, c) in level_fixtures()? {
        let membership = c.samples().iter().map(|(_, x)| (field.value(x) - level).abs()).fold(0.0f64, f64::max);
        t.le(&format!("|F - c| on samples [{name}]"), membership, 1e-10);
        let reports: [LevelResidualReport; 2] =
            [level_residual_hessian(&field, &c, &tol)?, level_residual_euclidean(&field, &c, &tol)?];
        for rep in &reports {
            let label = format!("{:?}", rep.criterion).to_lowercase();
            t.ok(&format!("{name} {label}: on surface"), rep.on_surface);
            t.le(&format!("max residual [{name} {label}]"), rep.max_residual, 1e-4);
            t.le(&format!("coefficient consistency [{name} {label}]"), rep.derivative_consistency, 1e-4);
            t.le(&format!("anchor tangency [{name} {label}]"), rep.anchor_tangency.abs(), 1e-4);
        }
    }

    let sphere = ScalarField::polynomial(Polynomial::sphere());
    for (a, b) in [(1.0, 1.0), (1.5, 0.4)] {
        // started off the symmetric point t = 0, where the anchor tangency vanishes
        let helix = curve(Family::helix(a, b), (1.0, 11.0))?;
        for rep in [level_residual_hessian(&sphere, &helix, &tol)?, level_residual_euclidean(&sphere, &helix, &tol)?] {
            let label = format!("{:?}", rep.criterion).to_lowercase();
            t.ok(&format!("helix a={a} b={b} {label}: rejected"), !rep.on_surface);
            t.ge(
                &format!("off-surface failure [helix a={a} b={b} {label}]"),
                rep.max_residual.max(rep.anchor_tangency.abs()),
                1e-1,
            );
        }
    }

    let starts = [("quartic", quartic(), Vector3::new(1.0, 0.2, 0.3)), ("torus", torus(), Vector3::new(2.4, 0.3, 0.2))];
    for (name, field, guess) in starts {
        let level = if name == "torus" { 0.0 } else { 3.0 };
        let start = project_to_level(&field, level, &guess)?;
        let tangent = field.gradient(&start).cross(&Vector3::z());
        for twist in [0.0, 0.7, -1.5] {
            let tr = integrate_level_curve(&field, &start, &tangent, &ConverseOptions { twist, ..Default::default() })?;
            t.le(&format!("converse level drift [{name} twist={twist}]"), tr.level_drift, 1e-6);
        }
    }
    Ok(t)
}

fn structural(inv: &mut Invariants) -> Result<Tally> {
    let mut t = Tally::default();
    let p = offset();

    let gauge_cases = [
        (
            PseudoMetric::euclidean(),
            sphere_curve(p, 2.0, AngleLaw::linear(0.0, 1.0), AngleLaw::linear(-1.0, 0.3)),
            (0.0, 6.0),
        ),
        (
            PseudoMetric::minkowski(),
            minkowski_curve(
                MinkowskiSurface::PseudoSphere,
                p,
                1.0,
                AngleLaw::linear(0.0, 1.0),
                AngleLaw { amp: 0.3, freq: 2.0, ..Default::default() },
            ),
            (0.0, 6.0),
        ),
        (
            PseudoMetric::minkowski(),
            minkowski_curve(
                MinkowskiSurface::PseudoSphere,
                p,
                1.0,
                AngleLaw { amp: 0.3, freq: 1.0, ..Default::default() },
                AngleLaw::linear(0.0, 1.0),
            ),
            (-1.0, 1.0),
        ),
    ];
    for (g, fam, dom) in gauge_cases {
        let c = curve(fam, dom)?;
        let pc = param(&c, &g)?;
        let base = bishop(&pc, BishopGauge::default())?;
        inv.track(&base)?;
        let r0 = detect_sphere(&base, &DetectOptions::default())?;
        for angle in [0.3, -0.7, 1.1] {
            let rotated = regauge(&base, angle)?;
            inv.track(&rotated)?;
            let ri = detect_sphere(&rotated, &DetectOptions::default())?;
            t.ok(&format!("gauge {angle}: verdict {:?} vs {:?}", ri.verdict, r0.verdict), ri.verdict == r0.verdict);
            let dr = (ri.radius.unwrap_or(f64::NAN) - r0.radius.unwrap_or(f64::NAN)).abs();
            t.le("gauge radius change", dr, 1e-6);
            t.le("gauge center change", (ri.center_vector().unwrap() - r0.center_vector().unwrap()).norm(), 1e-6);
            let started = bishop(&pc, BishopGauge::with_normal(rotated.triads()[0][1]))?;
            inv.track(&started)?;
            let rs = detect_sphere(&started, &DetectOptions::default())?;
            t.ok("initial-normal gauge verdict", rs.verdict == r0.verdict);
            t.le("gauge radius change", (rs.radius.unwrap_or(f64::NAN) - r0.radius.unwrap_or(f64::NAN)).abs(), 1e-6);
        }
    }

    for (name, field, _, c) in level_fixtures()? {
        let probes: Vec<Vector3<f64>> = c.samples().into_iter().map(|(_, x)| x).collect();
        let hm = hessian_metric(field, &probes)?;
        for x in probes.iter().step_by(8) {
            t.le(&format!("metric compatibility [{name}]"), hm.compatibility_defect(x)?, 1e-8);
        }
    }

    let (agree, total, asymptotic) = asymptotic_equivalence()?;
    t.ok(&format!("normal curvature vs lightlike agreement {agree}/{total}"), agree == total && total >= 1000);
    t.ok(&format!("lightlike probes exercised ({asymptotic})"), asymptotic >= 100);

    t.le(&format!("Gram drift over {} frames", inv.frames), inv.gram_drift, 1e-6);
    t.le(&format!("relatively parallel defect over {} Bishop frames", inv.bishop_frames), inv.parallel_defect, 1e-6);
    Ok(t)
}

/// Random tangent vectors on an indefinite level set: a third uniform, a third
/// exactly lightlike, a third lightlike plus a perturbation straddling the band.
fn asymptotic_equivalence() -> Result<(usize, usize, usize)> {
    let field = ScalarField::polynomial(Polynomial::from_terms([
        ([2, 0, 0], 1.0),
        ([0, 2, 0], 1.0),
        ([0, 0, 2], -1.0),
        ([4, 0, 0], 0.1),
    ]));
    let mut rng = ChaCha8Rng::seed_from_u64(20241015);
    let mut points = Vec::new();
    while points.len() < 50 {
        let guess = Vector3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-1.5..1.5));
        if let Ok(x) = project_to_level(&field, 1.0, &guess) {
            points.push(x);
        }
    }
    let hm = hessian_metric(field.clone(), &points)?;
    let (mut agree, mut total, mut asymptotic) = (0, 0, 0);
    for i in 0..1000 {
        let x = points[i % points.len()];
        let n = field.gradient(&x).normalize();
        let e = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let u = (e - n * e.dot(&n)).normalize();
        let w = n.cross(&u);
        let v = match i % 3 {
            0 => {
                let phi: f64 = rng.random_range(0.0..TAU);
                u * phi.cos() + w * phi.sin()
            }
            kind => {
                let nulls = hm.metric_at(&x)?.null_directions(&u, &w)?;
                let base = nulls[rng.random_range(0..2)];
                if kind == 1 {
                    base
                } else {
                    let eps = 10f64.powf(rng.random_range(-13.0..-6.0)) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    base + (u * base.dot(&w) - w * base.dot(&u)) * eps
                }
            }
        };
        let kn = normal_curvature(&field, &x, &v)?;
        let ch = tangent_character(&hm, &x, &v)?;
        let band = hm.causal_tolerance() / field.gradient(&x).norm() * v.norm_squared();
        let zero = kn.abs() <= band;
        total += 1;
        asymptotic += usize::from(zero);
        agree += usize::from(zero == (ch == CausalCharacter::Lightlike));
    }
    Ok((agree, total, asymptotic))
}

type Criterion = fn(&mut Invariants) -> Result<Tally>;

fn main() -> ExitCode {
    let started = Instant::now();
    let mut inv = Invariants::default();
    let criteria: [(&str, Criterion); 8] = [
        ("Euclidean sphere criterion", euclidean_spheres),
        ("Minkowski sphere and light-cone criteria", minkowski_spheres),
        ("helix curvature and phase consistency", helix_consistency),
        ("normal development conics", minkowski_conics),
        ("null frames and lightlike rulings", null_frames),
        ("quadric membership", quadrics),
        ("level-surface criteria", |_| level_surfaces()),
        ("structural invariants", structural),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = run(&mut inv);
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(t) if t.failures.is_empty() => {
                println!("PASS {}: {name} [{secs:.2}s] {}", i + 1, t.summary());
            }
            Ok(t) => {
                failed += 1;
                println!("FAIL {}: {name} [{secs:.2}s] {}", i + 1, t.summary());
                for f in t.failures.iter().take(10) {
                    println!("    {f}");
                }
            }
            Err(e) => {
                failed += 1;
                println!("FAIL {}: {name} [{secs:.2}s] error: {e}", i + 1);
            }
        }
    }
    println!("{} of 8 criteria passed in {:.1}s", 8 - failed, started.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
