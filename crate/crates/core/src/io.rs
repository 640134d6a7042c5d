//! File formats: curve and field specifications, frame tables, metric
//! strings and normal-development plots.
//!
//! Floats are written in shortest round-trip form, so exported tables
//! re-import bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::characterize::{LineFit, NormalDevelopment, PlaneSignature};
use crate::curves::{Curve, Family, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::frames::FrameField;
use crate::level_surface::{Polynomial, ScalarField};
use crate::pseudo_metric::PseudoMetric;

/// JSON description of an analytic curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub curve: Family,
    pub domain: [f64; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

impl CurveSpec {
    pub fn build(&self) -> Result<Curve> {
        Curve::from_family(self.curve.clone(), (self.domain[0], self.domain[1]), self.samples)
    }
}

fn read_text(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

pub fn parse_curve_json(text: &str) -> Result<Curve> {
    let spec: CurveSpec = serde_json::from_str(text).map_err(|e| Error::Format(format!("curve JSON: {e}")))?;
    spec.build()
}

/// Sampled curve with header `t,x,y,z`.
pub fn parse_curve_csv(text: &str) -> Result<Curve> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let names: Vec<&str> = headers.iter().collect();
    if names != ["t", "x", "y", "z"] {
        return Err(Error::Format(format!("curve CSV header must be t,x,y,z, got {}", names.join(","))));
    }
    let mut params = Vec::new();
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let v = parse_row(&rec, 4)?;
        params.push(v[0]);
        points.push(Vector3::new(v[1], v[2], v[3]));
    }
    Curve::from_samples(params, points)
}

/// Reads a curve from `.csv` samples or a JSON specification.
pub fn read_curve(path: &Path) -> Result<Curve> {
    let text = read_text(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        parse_curve_csv(&text)
    } else {
        parse_curve_json(&text)
    }
}

pub fn write_curve_csv(curve: &Curve) -> String {
    let mut out = String::from("t,x,y,z\n");
    for (t, p) in curve.samples() {
        let _ = writeln!(out, "{t},{},{},{}", p.x, p.y, p.z);
    }
    out
}

/// Polynomial field as a list of `{"powers": [i, j, k], "coeff": c}`.
pub fn parse_field_json(text: &str) -> Result<ScalarField> {
    let poly: Polynomial = serde_json::from_str(text).map_err(|e| Error::Format(format!("field JSON: {e}")))?;
    if poly.is_zero() {
        return Err(Error::Format("field has no nonzero terms".into()));
    }
    Ok(ScalarField::polynomial(poly))
}

/// Field from a file, or one of `sphere`, `quartic`, `torus:R,a`.
pub fn read_field(spec: &str) -> Result<ScalarField> {
    match spec {
        "sphere" => Ok(ScalarField::polynomial(Polynomial::sphere())),
        "quartic" => Ok(ScalarField::polynomial(Polynomial::quartic_example())),
        _ => {
            if let Some(rest) = spec.strip_prefix("torus:") {
                let v = parse_numbers(rest, 2)?;
                return Ok(ScalarField::polynomial(Polynomial::torus(v[0], v[1])));
            }
            parse_field_json(&read_text(Path::new(spec))?)
        }
    }
}

/// `euclidean`, `minkowski`, `diag:a,b,c`, `matrix:` followed by nine
/// row-major entries, or a JSON file holding a 3×3 array.
pub fn parse_metric(spec: &str) -> Result<PseudoMetric> {
    match spec {
        "euclidean" => Ok(PseudoMetric::euclidean()),
        "minkowski" => Ok(PseudoMetric::minkowski()),
        _ => {
            if let Some(rest) = spec.strip_prefix("diag:") {
                let v = parse_numbers(rest, 3)?;
                return PseudoMetric::diagonal([v[0], v[1], v[2]]);
            }
            let m = parse_matrix(spec)?;
            PseudoMetric::from_matrix(m)
        }
    }
}

/// `matrix:` with nine entries, `diag:a,b,c`, or a JSON 3×3 array file.
pub fn parse_matrix(spec: &str) -> Result<Matrix3<f64>> {
    if let Some(rest) = spec.strip_prefix("matrix:") {
        let v = parse_numbers(rest, 9)?;
        return Ok(Matrix3::from_row_slice(&v));
    }
    if let Some(rest) = spec.strip_prefix("diag:") {
        let v = parse_numbers(rest, 3)?;
        return Ok(Matrix3::from_diagonal(&Vector3::new(v[0], v[1], v[2])));
    }
    let text = read_text(Path::new(spec))?;
    let rows: [[f64; 3]; 3] = serde_json::from_str(&text).map_err(|e| Error::Format(format!("matrix JSON: {e}")))?;
    Ok(Matrix3::from_fn(|i, j| rows[i][j]))
}

pub fn parse_numbers(text: &str, n: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Format(format!("bad number {s:?}"))))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(Error::Format(format!("expected {n} numbers, got {}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Format("numbers must be finite".into()));
    }
    Ok(v)
}

pub fn parse_vector(text: &str) -> Result<Vector3<f64>> {
    let v = parse_numbers(text, 3)?;
    Ok(Vector3::new(v[0], v[1], v[2]))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(format!("CSV: {e}"))
}

fn parse_row(rec: &csv::StringRecord, n: usize) -> Result<Vec<f64>> {
    if rec.len() != n {
        return Err(Error::Format(format!("expected {n} columns, got {}", rec.len())));
    }
    rec.iter().map(|s| s.parse::<f64>().map_err(|_| Error::Format(format!("bad number {s:?}")))).collect()
}

/// Plain-data copy of a frame field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameTable {
    pub kind: String,
    pub coeff_names: Vec<String>,
    /// Diagonal of the prescribed Gram matrix.
    pub signs: [f64; 3],
    pub grid: Vec<f64>,
    pub positions: Vec<[f64; 3]>,
    pub triads: Vec<[[f64; 3]; 3]>,
    pub coeffs: Vec<[f64; 3]>,
}

impl From<&FrameField> for FrameTable {
    fn from(ff: &FrameField) -> Self {
        let mut names: Vec<String> = ff.coeff_names().iter().map(|s| s.to_string()).collect();
        while names.len() < 3 {
            names.push("unused".into());
        }
        FrameTable {
            kind: ff.kind().name().into(),
            coeff_names: names,
            signs: ff.signs(),
            grid: ff.grid().to_vec(),
            positions: ff.positions().iter().map(|p| (*p).into()).collect(),
            triads: ff.triads().iter().map(|e| [e[0].into(), e[1].into(), e[2].into()]).collect(),
            coeffs: ff.coeffs().to_vec(),
        }
    }
}

const LEGS: [&str; 3] = ["t", "e1", "e2"];

impl FrameTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let s = self.signs;
        let _ = writeln!(out, "# kind={} signs={},{},{}", self.kind, s[0], s[1], s[2]);
        out.push_str("s,x,y,z");
        for leg in LEGS {
            for c in ["x", "y", "z"] {
                let _ = write!(out, ",{leg}_{c}");
            }
        }
        for name in &self.coeff_names {
            let _ = write!(out, ",{name}");
        }
        out.push('\n');
        for i in 0..self.grid.len() {
            let _ = write!(out, "{}", self.grid[i]);
            let p = self.positions[i];
            let _ = write!(out, ",{},{},{}", p[0], p[1], p[2]);
            for leg in &self.triads[i] {
                let _ = write!(out, ",{},{},{}", leg[0], leg[1], leg[2]);
            }
            let c = self.coeffs[i];
            let _ = writeln!(out, ",{},{},{}", c[0], c[1], c[2]);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let first = text.lines().next().unwrap_or_default();
        let meta = first
            .strip_prefix("# ")
            .ok_or_else(|| Error::Format("frame CSV must start with a '# kind=... signs=...' line".into()))?;
        let mut kind = None;
        let mut signs = None;
        for item in meta.split_whitespace() {
            if let Some(k) = item.strip_prefix("kind=") {
                kind = Some(k.to_string());
            } else if let Some(v) = item.strip_prefix("signs=") {
                let v = parse_numbers(v, 3)?;
                signs = Some([v[0], v[1], v[2]]);
            } else {
                return Err(Error::Format(format!("unknown frame metadata {item:?}")));
            }
        }
        let (kind, signs) = match (kind, signs) {
            (Some(k), Some(s)) => (k, s),
            _ => return Err(Error::Format("frame metadata needs kind and signs".into())),
        };
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(csv_err)?.clone();
        if headers.len() != 16 {
            return Err(Error::Format(format!("frame CSV needs 16 columns, got {}", headers.len())));
        }
        let coeff_names = headers.iter().skip(13).map(|s| s.to_string()).collect();
        let mut table = FrameTable {
            kind,
            coeff_names,
            signs,
            grid: Vec::new(),
            positions: Vec::new(),
            triads: Vec::new(),
            coeffs: Vec::new(),
        };
        for rec in rdr.records() {
            let v = parse_row(&rec.map_err(csv_err)?, 16)?;
            table.grid.push(v[0]);
            table.positions.push([v[1], v[2], v[3]]);
            table.triads.push([[v[4], v[5], v[6]], [v[7], v[8], v[9]], [v[10], v[11], v[12]]]);
            table.coeffs.push([v[13], v[14], v[15]]);
        }
        Ok(table)
    }
}

/// Deterministic pretty JSON.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))
}

const SVG_SIZE: f64 = 480.0;
const SVG_MARGIN: f64 = 30.0;

/// Static plot of the normal development, with the fitted line and, for a
/// Lorentzian normal plane, the null lines and reference hyperbolas.
pub fn development_svg(nd: &NormalDevelopment, fit: Option<&LineFit>) -> String {
    let ext = nd.max_abs().max(1e-12) * 1.2;
    let map = |x: f64, y: f64| -> (f64, f64) {
        let span = SVG_SIZE - 2.0 * SVG_MARGIN;
        (SVG_MARGIN + (x + ext) / (2.0 * ext) * span, SVG_MARGIN + (ext - y) / (2.0 * ext) * span)
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = SVG_SIZE
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (ax0, ay) = map(-ext, 0.0);
    let (ax1, _) = map(ext, 0.0);
    let (ox, oy0) = map(0.0, ext);
    let (_, oy1) = map(0.0, -ext);
    let _ = writeln!(
        out,
        r##"<g stroke="#999" stroke-width="1"><line x1="{ax0:.2}" y1="{ay:.2}" x2="{ax1:.2}" y2="{ay:.2}"/><line x1="{ox:.2}" y1="{oy0:.2}" x2="{ox:.2}" y2="{oy1:.2}"/></g>"##
    );
    if nd.plane_signature == PlaneSignature::Lorentzian {
        let (e1, e2) = (nd.signs[1], nd.signs[2]);
        let mut refs = String::new();
        for sgn in [1.0, -1.0] {
            let (x0, y0) = map(-ext, -sgn * ext);
            let (x1, y1) = map(ext, sgn * ext);
            let _ = write!(refs, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}"/>"#);
        }
        // e1·x² + e2·y² = ±q for q = (ext/2)²
        let q = (0.5 * ext).powi(2);
        for level in [q, -q] {
            for branch in [1.0, -1.0] {
                let mut pts = Vec::new();
                for k in 0..=100 {
                    let u = -ext + 2.0 * ext * k as f64 / 100.0;
                    // solve for the coordinate that carries the sign of `level`
                    let (x, y) = if level * e1 > 0.0 {
                        ((level / e1 - e2 / e1 * u * u).abs().sqrt() * branch, u)
                    } else {
                        (u, (level / e2 - e1 / e2 * u * u).abs().sqrt() * branch)
                    };
                    if x.abs() <= ext && y.abs() <= ext {
                        let (px, py) = map(x, y);
                        pts.push(format!("{px:.2},{py:.2}"));
                    }
                }
                let _ = write!(refs, r#"<polyline fill="none" points="{}"/>"#, pts.join(" "));
            }
        }
        let _ = writeln!(out, r##"<g stroke="#c9c" stroke-width="1" stroke-dasharray="4 3">{refs}</g>"##);
    }
    if let Some(fit) = fit {
        let [c0, c1, c2] = fit.coefficients;
        let (x0, y0, x1, y1) = if c2.abs() >= c1.abs() {
            (-ext, -(c0 - c1 * ext) / c2, ext, -(c0 + c1 * ext) / c2)
        } else {
            (-(c0 - c2 * ext) / c1, -ext, -(c0 + c2 * ext) / c1, ext)
        };
        let (px0, py0) = map(x0, y0);
        let (px1, py1) = map(x1, y1);
        let _ = writeln!(
            out,
            r##"<line stroke="#d33" stroke-width="1.5" x1="{px0:.2}" y1="{py0:.2}" x2="{px1:.2}" y2="{py1:.2}"/>"##
        );
    }
    let pts: Vec<String> = nd
        .points
        .iter()
        .map(|p| {
            let (x, y) = map(p[0], p[1]);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ = writeln!(out, r##"<polyline fill="none" stroke="#236" stroke-width="2" points="{}"/>"##, pts.join(" "));
    for p in nd.points.first().into_iter() {
        let (x, y) = map(p[0], p[1]);
        let _ = writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="#236"/>"##);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characterize::{fit_line, normal_development};
    use crate::curves::reparametrize;
    use crate::frames::{bishop, BishopGauge};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn helix_frame() -> FrameField {
        let c = Curve::from_family(Family::helix(1.3, 0.7), (0.0, 5.0), 64).unwrap();
        let pc = Arc::new(reparametrize(&c, &PseudoMetric::euclidean()).unwrap());
        bishop(&pc, BishopGauge::with_angle(0.3)).unwrap()
    }

    #[test]
    fn frame_csv_round_trip_is_bit_exact() {
        let table = FrameTable::from(&helix_frame());
        let back = FrameTable::from_csv(&table.to_csv()).unwrap();
        assert_eq!(back, table);
        for (a, b) in back.coeffs.iter().zip(&table.coeffs) {
            for k in 0..3 {
                assert_eq!(a[k].to_bits(), b[k].to_bits());
            }
        }
        let json = to_json(&table).unwrap();
        let back: FrameTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn curve_formats() {
        let c = parse_curve_json(
            r#"{"curve": {"family": "circle", "params": {"radius": 2.0, "center": [0, 0, 0]}}, "domain": [0, 6.283185307179586], "samples": 64}"#,
        )
        .unwrap();
        assert_eq!(c.n_samples(), 64);
        let back = parse_curve_csv(&write_curve_csv(&c)).unwrap();
        assert!((back.point(1.0) - c.point(1.0)).norm() < 1e-9);
        assert!(parse_curve_json(
            r#"{"curve": {"family": "circle", "params": {"radius": 2.0}}, "domain": [0, 1], "extra": 1}"#
        )
        .is_err());
        assert!(parse_curve_csv("t,x,y\n0,1,2\n").is_err());
    }

    #[test]
    fn metric_and_field_strings() {
        assert_eq!(parse_metric("minkowski").unwrap().index(), 1);
        assert_eq!(parse_metric("diag:1,-1,-1").unwrap().index(), 2);
        assert!(parse_metric("diag:1,0,1").is_err());
        assert!(parse_metric("matrix:1,2,0,0,1,0,0,0,1").is_err());
        let f =
            parse_field_json(r#"[{"powers": [2, 0, 0], "coeff": 1.0}, {"powers": [0, 0, 1], "coeff": -1.0}]"#).unwrap();
        assert_eq!(f.value(&Vector3::new(2.0, 0.0, 1.0)), 3.0);
        assert!(parse_field_json(r#"[{"powers": [2, 0, 0], "coef": 1.0}]"#).is_err());
        assert!(read_field("torus:2,0.5").is_ok());
    }

    #[test]
    fn svg_is_self_contained() {
        let c = Curve::from_family(Family::LightConeCircle, (0.0, 2.0 * PI), 64).unwrap();
        let pc = Arc::new(reparametrize(&c, &PseudoMetric::minkowski()).unwrap());
        let ff = bishop(&pc, BishopGauge::default()).unwrap();
        let nd = normal_development(&ff).unwrap();
        let svg = development_svg(&nd, Some(&fit_line(&nd).unwrap()));
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("stroke-dasharray"));
    }
}
