use std::collections::BTreeMap;
use std::sync::Arc;

use framekit::characterize::{
    detect_quadric, detect_sphere, fit_line_with, lightlike_ruling_directions, lightlike_sphere_test,
    normal_development, DetectOptions, FitTolerances, NormalDevelopment,
};
use framekit::curves::{reparametrize_in, ReparamOptions};
use framekit::frames::{bishop, frenet, holonomy, null_frame, BishopGauge, FrameField, FrameKind};
use framekit::io::{self, CurveSpec, FrameTable};
use framekit::level_surface::{
    hessian_metric, level_residual_euclidean, level_residual_hessian, normal_curvature, tangent_character,
    LevelResidualReport, LevelTolerances, ScalarField,
};
use framekit::{profile_causal, CausalCharacter, Curve, Error, Family, MetricField, ParamCurve, PseudoMetric, Result};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Command, Common, CriterionChoice, Format, FrameChoice};

/// Deterministic report; wall time is reported separately.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub inputs: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub causal: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame_kind: Option<String>,
    pub result: Value,
}

pub struct Emitted {
    pub report: RunReport,
    pub csv: Option<String>,
    pub svg: Option<String>,
}

impl Emitted {
    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(io::to_json(&self.report)? + "\n"),
            Format::Csv => self.csv.clone().ok_or_else(|| unsupported(self.report.command, "csv")),
            Format::Svg => self.svg.clone().ok_or_else(|| unsupported(self.report.command, "svg")),
        }
    }
}

fn unsupported(command: &str, format: &str) -> Error {
    Error::Invalid(format!("{command} does not produce {format} output"))
}

fn report(command: &'static str, inputs: BTreeMap<String, Value>) -> RunReport {
    RunReport {
        tool: "framekit",
        version: env!("CARGO_PKG_VERSION"),
        command,
        inputs,
        causal: None,
        frame_kind: None,
        result: Value::Null,
    }
}

fn common_inputs(c: &Common) -> BTreeMap<String, Value> {
    let mut m = BTreeMap::new();
    m.insert("metric".into(), json!(c.metric));
    m.insert("curve".into(), json!(c.curve.display().to_string()));
    if let Some(t) = c.tol_causal {
        m.insert("tol_causal".into(), json!(t));
    }
    if let Some(t) = c.tol_fit {
        m.insert("tol_fit".into(), json!(t));
    }
    m
}

fn load_metric(spec: &str, tol_causal: Option<f64>) -> Result<PseudoMetric> {
    let m = io::parse_metric(spec)?;
    Ok(match tol_causal {
        Some(t) if !(t >= 0.0) => return Err(Error::Invalid("--tol-causal must be non-negative".into())),
        Some(t) => m.with_causal_tolerance(t),
        None => m,
    })
}

fn fit_tolerances(c: &Common) -> Result<FitTolerances> {
    let mut tol = FitTolerances::default();
    if let Some(t) = c.tol_fit {
        if !(t > 0.0) {
            return Err(Error::Invalid("--tol-fit must be positive".into()));
        }
        tol.fit = t;
    }
    Ok(tol)
}

fn causal_name(c: CausalCharacter) -> String {
    format!("{c:?}").to_lowercase()
}

/// Index 2 and 3 metrics are negated so that frames see index 0 or 1.
fn working_metric(m: &PseudoMetric, notes: &mut Vec<String>) -> PseudoMetric {
    if m.index() >= 2 {
        notes.push(format!("metric of index {} negated before framing", m.index()));
        m.negated()
    } else {
        m.clone()
    }
}

fn param_curve(curve: &Curve, metric: &PseudoMetric) -> Result<Arc<ParamCurve>> {
    let field: Arc<dyn MetricField> = Arc::new(metric.clone());
    match reparametrize_in(curve, field.clone(), ReparamOptions::default()) {
        Ok(pc) => Ok(Arc::new(pc)),
        Err(Error::StraightLight) => Ok(Arc::new(ParamCurve::raw(curve, field)?)),
        Err(e) => Err(e),
    }
}

fn build_frame(curve: &Curve, metric: &PseudoMetric, choice: FrameChoice, angle: f64) -> Result<FrameField> {
    let pc = param_curve(curve, metric)?;
    let lightlike = pc.causal() == CausalCharacter::Lightlike;
    match (choice, lightlike) {
        (FrameChoice::Auto | FrameChoice::Null, true) => null_frame(&pc),
        (FrameChoice::Null, false) => Err(Error::NotLightlike),
        (FrameChoice::Frenet, _) => frenet(&pc),
        (FrameChoice::Auto | FrameChoice::Bishop, _) => bishop(&pc, BishopGauge::with_angle(angle)),
    }
}

fn max_abs_columns(rows: &[[f64; 3]]) -> [f64; 3] {
    let mut m = [0.0f64; 3];
    for r in rows {
        for k in 0..3 {
            m[k] = m[k].max(r[k].abs());
        }
    }
    m
}

pub fn run(command: &Command) -> Result<(Emitted, Format, Option<std::path::PathBuf>)> {
    match command {
        Command::Frame { common, kind, gauge_angle } => {
            Ok((cmd_frame(common, *kind, *gauge_angle)?, common.format, common.out.clone()))
        }
        Command::Develop { common, gauge_angle } => {
            Ok((cmd_develop(common, *gauge_angle)?, common.format, common.out.clone()))
        }
        Command::Detect { common, gauge_angle, quadric_b, center, rho } => Ok((
            cmd_detect(common, *gauge_angle, quadric_b.as_deref(), center.as_deref(), *rho)?,
            common.format,
            common.out.clone(),
        )),
        Command::LevelCheck { common, field, criterion } => {
            Ok((cmd_level_check(common, field, *criterion)?, common.format, common.out.clone()))
        }
        Command::Ruling { metric, center, rho, point, which, half_length, tol_causal, out, format } => {
            Ok((cmd_ruling(metric, center, *rho, point, *which, *half_length, *tol_causal)?, *format, out.clone()))
        }
    }
}

fn cmd_frame(c: &Common, kind: FrameChoice, angle: f64) -> Result<Emitted> {
    let mut inputs = common_inputs(c);
    inputs.insert("kind".into(), json!(format!("{kind:?}").to_lowercase()));
    inputs.insert("gauge_angle".into(), json!(angle));
    let metric = load_metric(&c.metric, c.tol_causal)?;
    let curve = io::read_curve(&c.curve)?;
    let causal = profile_causal(&curve, &metric)?;
    let mut notes = Vec::new();
    let work = working_metric(&metric, &mut notes);
    let ff = build_frame(&curve, &work, kind, angle)?;
    let table = FrameTable::from(&ff);
    let mut result = json!({
        "points": ff.len(),
        "length": ff.param_curve().length(),
        "parametrization": format!("{:?}", ff.param_curve().kind()).to_lowercase(),
        "signs": ff.signs(),
        "coeff_names": table.coeff_names,
        "max_abs_coeffs": max_abs_columns(ff.coeffs()),
        "gram_drift": ff.gram_drift(),
        "notes": notes,
    });
    if let Ok(r) = ff.motion_residual() {
        result["motion_residual"] = json!(r);
    }
    if let Some(case) = ff.frenet_case() {
        result["frenet_case"] = json!(format!("{case:?}").to_lowercase());
        if let Ok(h) = holonomy(&ff) {
            result["torsion_integral"] = json!(h);
        }
    }
    let csv = table.to_csv();
    result["frame"] = serde_json::to_value(&table).map_err(|e| Error::Format(e.to_string()))?;
    let mut rep = report("frame", inputs);
    rep.causal = Some(causal_name(causal));
    rep.frame_kind = Some(ff.kind().name().into());
    rep.result = result;
    Ok(Emitted { report: rep, csv: Some(csv), svg: None })
}

fn bishop_frame(c: &Common, angle: f64, notes: &mut Vec<String>) -> Result<(FrameField, CausalCharacter)> {
    let metric = load_metric(&c.metric, c.tol_causal)?;
    let curve = io::read_curve(&c.curve)?;
    let causal = profile_causal(&curve, &metric)?;
    let work = working_metric(&metric, notes);
    let ff = build_frame(&curve, &work, FrameChoice::Bishop, angle)?;
    Ok((ff, causal))
}

fn development_csv(nd: &NormalDevelopment) -> String {
    let mut out = String::from("s,kappa1,kappa2\n");
    for (s, p) in nd.grid.iter().zip(&nd.points) {
        out.push_str(&format!("{s},{},{}\n", p[0], p[1]));
    }
    out
}

fn cmd_develop(c: &Common, angle: f64) -> Result<Emitted> {
    let mut inputs = common_inputs(c);
    inputs.insert("gauge_angle".into(), json!(angle));
    let mut notes = Vec::new();
    let (ff, causal) = bishop_frame(c, angle, &mut notes)?;
    let nd = normal_development(&ff)?;
    let fit = fit_line_with(&nd, &fit_tolerances(c)?)?;
    let mut rep = report("develop", inputs);
    rep.causal = Some(causal_name(causal));
    rep.frame_kind = Some("bishop".into());
    rep.result = json!({
        "signs": nd.signs,
        "plane_signature": nd.plane_signature,
        "grid": nd.grid,
        "points": nd.points,
        "line_fit": fit,
        "notes": notes,
    });
    let svg = io::development_svg(&nd, Some(&fit));
    Ok(Emitted { report: rep, csv: Some(development_csv(&nd)), svg: Some(svg) })
}

fn cmd_detect(
    c: &Common,
    angle: f64,
    quadric_b: Option<&str>,
    center: Option<&str>,
    rho: Option<f64>,
) -> Result<Emitted> {
    let mut inputs = common_inputs(c);
    inputs.insert("gauge_angle".into(), json!(angle));
    if let Some(b) = quadric_b {
        inputs.insert("quadric_b".into(), json!(b));
    }
    if let Some(p) = center {
        inputs.insert("center".into(), json!(p));
    }
    if let Some(r) = rho {
        inputs.insert("rho".into(), json!(r));
    }
    let center = center.map(io::parse_vector).transpose()?;
    let mut opts = DetectOptions { tol: fit_tolerances(c)?, center_hint: center };
    let curve = io::read_curve(&c.curve)?;
    let mut rep = report("detect", inputs);

    if let Some(spec) = quadric_b {
        let b = io::parse_matrix(spec)?;
        let p = center.unwrap_or_else(Vector3::zeros);
        opts.center_hint = Some(p);
        let r = detect_quadric(&curve, &b, &p, &opts)?;
        rep.result = serde_json::to_value(&r).map_err(|e| Error::Format(e.to_string()))?;
        return Ok(Emitted { report: rep, csv: None, svg: None });
    }

    let metric = load_metric(&c.metric, c.tol_causal)?;
    let causal = profile_causal(&curve, &metric)?;
    rep.causal = Some(causal_name(causal));
    let mut notes = Vec::new();
    let work = working_metric(&metric, &mut notes);
    if causal == CausalCharacter::Lightlike {
        let ff = build_frame(&curve, &work, FrameChoice::Null, 0.0)?;
        let candidate = match (center, rho) {
            (Some(p), Some(r)) => Some((p, r)),
            (None, None) => None,
            _ => return Err(Error::Invalid("--center and --rho must be given together for lightlike curves".into())),
        };
        let mut r = lightlike_sphere_test(&ff, candidate, &opts.tol)?;
        r.notes.extend(notes);
        rep.frame_kind = Some("null".into());
        rep.result = serde_json::to_value(&r).map_err(|e| Error::Format(e.to_string()))?;
        return Ok(Emitted { report: rep, csv: None, svg: None });
    }
    let ff = build_frame(&curve, &work, FrameChoice::Bishop, angle)?;
    let mut r = detect_sphere(&ff, &opts)?;
    r.notes.extend(notes);
    let nd = normal_development(&ff)?;
    let fit = fit_line_with(&nd, &opts.tol)?;
    rep.frame_kind = Some("bishop".into());
    rep.result = serde_json::to_value(&r).map_err(|e| Error::Format(e.to_string()))?;
    Ok(Emitted { report: rep, csv: Some(development_csv(&nd)), svg: Some(io::development_svg(&nd, Some(&fit))) })
}

/// Seed for randomized probes, from `FRAMEKIT_SEED`.
pub fn probe_seed() -> Result<u64> {
    match std::env::var("FRAMEKIT_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Error::Invalid(format!("FRAMEKIT_SEED must be an integer, got {s:?}"))),
        Err(_) => Ok(0),
    }
}

const PROBES: usize = 32;

fn least_aligned_axis(n: &Vector3<f64>) -> Vector3<f64> {
    let i = n.iamin();
    Vector3::ith(i, 1.0)
}

/// Random tangent directions along the curve: vanishing normal curvature
/// must coincide with lightlike directions of the Hessian metric.
fn asymptotic_probe(field: &ScalarField, curve: &Curve, seed: u64) -> Value {
    let samples = curve.samples();
    let probes: Vec<Vector3<f64>> = samples.iter().map(|(_, p)| *p).collect();
    let Ok(hm) = hessian_metric(field.clone(), &probes) else {
        return json!({"seed": seed, "skipped": "Hessian metric unavailable on the curve"});
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut checked, mut agree, mut asymptotic) = (0usize, 0usize, 0usize);
    for _ in 0..PROBES {
        let (_, p) = samples[rng.random_range(0..samples.len())];
        let g = field.gradient(&p);
        let Some(n) = g.try_normalize(0.0) else { continue };
        let a = least_aligned_axis(&n);
        let u = (a - n * a.dot(&n)).normalize();
        let w = n.cross(&u);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let v = u * phi.cos() + w * phi.sin();
        let (Ok(kn), Ok(ch)) = (normal_curvature(field, &p, &v), tangent_character(&hm, &p, &v)) else {
            continue;
        };
        checked += 1;
        let band = hm.causal_tolerance() / g.norm() * v.norm_squared();
        let zero = kn.abs() <= band;
        if zero {
            asymptotic += 1;
        }
        if zero == (ch == CausalCharacter::Lightlike) {
            agree += 1;
        }
    }
    json!({"seed": seed, "probes": checked, "agreements": agree, "asymptotic": asymptotic})
}

fn level_rows(out: &mut String, r: &LevelResidualReport) {
    let name = format!("{:?}", r.criterion).to_lowercase();
    for i in 0..r.grid.len() {
        let c = r.coefficients[i];
        let k = r.kappas[i];
        out.push_str(&format!(
            "{name},{},{},{},{},{},{},{}\n",
            r.grid[i], k[0], k[1], c[0], c[1], c[2], r.residuals[i]
        ));
    }
}

fn cmd_level_check(c: &Common, field_spec: &str, criterion: CriterionChoice) -> Result<Emitted> {
    let mut inputs = common_inputs(c);
    inputs.remove("metric");
    inputs.insert("field".into(), json!(field_spec));
    inputs.insert("criterion".into(), json!(format!("{criterion:?}").to_lowercase()));
    let field = io::read_field(field_spec)?;
    let curve = io::read_curve(&c.curve)?;
    let mut tol = LevelTolerances::default();
    if let Some(t) = c.tol_fit {
        if !(t > 0.0) {
            return Err(Error::Invalid("--tol-fit must be positive".into()));
        }
        tol.residual = t;
        tol.tangency = t;
    }
    let mut reports = Vec::new();
    if matches!(criterion, CriterionChoice::Hessian | CriterionChoice::Both) {
        reports.push(level_residual_hessian(&field, &curve, &tol)?);
    }
    if matches!(criterion, CriterionChoice::Euclidean | CriterionChoice::Both) {
        reports.push(level_residual_euclidean(&field, &curve, &tol)?);
    }
    let seed = probe_seed()?;
    let on_surface = reports.iter().all(|r| r.on_surface);
    let mut csv = String::from("criterion,s,kappa1,kappa2,c0,c1,c2,residual\n");
    for r in &reports {
        level_rows(&mut csv, r);
    }
    let mut rep = report("level-check", inputs);
    rep.frame_kind = Some(FrameKind::Bishop.name().into());
    rep.result = json!({
        "on_surface": on_surface,
        "reports": reports,
        "asymptotic_probe": asymptotic_probe(&field, &curve, seed),
    });
    Ok(Emitted { report: rep, csv: Some(csv), svg: None })
}

const RULING_SAMPLES: usize = 64;

fn cmd_ruling(
    metric: &str,
    center: &str,
    rho: f64,
    point: &str,
    which: usize,
    half_length: f64,
    tol_causal: Option<f64>,
) -> Result<Emitted> {
    let mut inputs = BTreeMap::new();
    inputs.insert("metric".into(), json!(metric));
    inputs.insert("center".into(), json!(center));
    inputs.insert("rho".into(), json!(rho));
    inputs.insert("point".into(), json!(point));
    inputs.insert("which".into(), json!(which));
    inputs.insert("half_length".into(), json!(half_length));
    if which > 1 {
        return Err(Error::Invalid("--which must be 0 or 1".into()));
    }
    if !(half_length > 0.0) {
        return Err(Error::Invalid("--half-length must be positive".into()));
    }
    let m = load_metric(metric, tol_causal)?;
    let p = io::parse_vector(center)?;
    let p0 = io::parse_vector(point)?;
    let dirs = lightlike_ruling_directions(&p, rho, &p0, &m)?;
    let spec = CurveSpec {
        curve: Family::line(p0.into(), dirs[which].into()),
        domain: [-half_length, half_length],
        samples: RULING_SAMPLES,
    };
    let curve = spec.build()?;
    let defect = curve.samples().iter().map(|(_, x)| (m.norm_sq(&(x - p)) - rho).abs()).fold(0.0f64, f64::max);
    let mut rep = report("ruling", inputs);
    rep.causal = Some("lightlike".into());
    rep.result = json!({
        "directions": dirs.map(<[f64; 3]>::from),
        "curve": spec,
        "max_membership_defect": defect,
    });
    Ok(Emitted { report: rep, csv: Some(io::write_curve_csv(&curve)), svg: None })
}
