//! Scene and plan file formats, strict parsing, and SVG rendering.
//!
//! Scene files are JSON with a fixed schema (unknown fields rejected);
//! numbers are converted to binary floating point exactly once, here at the
//! boundary. Plan files and SVG output are deterministic: fixed field order
//! and 12 significant digits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    classify_point, validate_scene, Point, PolygonKind, PolygonSpec, RegionClass, Scene,
    SceneError,
};
use crate::search::PlanResult;

/// Serialized polygon kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindField {
    Obstacle,
    Risk,
}

impl From<KindField> for PolygonKind {
    fn from(k: KindField) -> PolygonKind {
        match k {
            KindField::Obstacle => PolygonKind::Obstacle,
            KindField::Risk => PolygonKind::Risk,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenePolygon {
    pub kind: KindField,
    pub vertices: Vec<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostField {
    pub f: CostKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    Exp,
}

/// The scene file schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: u32,
    pub polygons: Vec<ScenePolygon>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostField>,
}

/// A scene file resolved into validated domain values.
#[derive(Clone, Debug)]
pub struct LoadedScene {
    pub scene: Scene,
    pub start: Option<Point>,
    pub goal: Option<Point>,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown field: {message}")]
    UnknownField { message: String },
    #[error("schema error: {message}")]
    Schema { message: String },
    #[error("unsupported file version {version}, expected 1")]
    UnsupportedVersion { version: u32 },
    #[error("{context}: non-finite number")]
    NonFiniteNumber { context: String },
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("{which} point [{x}, {y}] classifies {class:?}; it must be safe")]
    InvalidQuery { which: &'static str, x: f64, y: f64, class: RegionClass },
}

impl ParseError {
    /// Stable machine-readable code for diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "SyntaxError",
            ParseError::UnknownField { .. } => "UnknownField",
            ParseError::Schema { .. } => "SchemaError",
            ParseError::UnsupportedVersion { .. } => "UnsupportedVersion",
            ParseError::NonFiniteNumber { .. } => "NonFiniteNumber",
            ParseError::Scene(SceneError::TooFewVertices { .. }) => "TooFewVertices",
            ParseError::Scene(SceneError::NonFiniteVertex { .. }) => "NonFiniteNumber",
            ParseError::Scene(SceneError::NonSimplePolygon { .. }) => "NonSimplePolygon",
            ParseError::Scene(SceneError::ZeroArea { .. }) => "ZeroArea",
            ParseError::Scene(SceneError::InteriorOverlap { .. }) => "InteriorOverlap",
            ParseError::InvalidQuery { .. } => "InvalidQuery",
        }
    }
}

fn classify_json_error(err: serde_json::Error) -> ParseError {
    let message = err.to_string();
    if err.is_syntax() || err.is_eof() {
        ParseError::Syntax { line: err.line(), column: err.column(), message }
    } else if message.contains("unknown field") {
        ParseError::UnknownField { message }
    } else {
        ParseError::Schema { message }
    }
}

/// Parse and fully validate a scene file. All violations are reported
/// together; nothing escapes a failed validation.
pub fn parse_scene(text: &str) -> Result<SceneFile, Vec<ParseError>> {
    load_scene(text).map(|(file, _)| file)
}

/// Parse a scene file and resolve it into a validated [`Scene`].
pub fn load_scene(text: &str) -> Result<(SceneFile, LoadedScene), Vec<ParseError>> {
    let file: SceneFile =
        serde_json::from_str(text).map_err(|e| vec![classify_json_error(e)])?;
    let loaded = resolve_scene(&file)?;
    Ok((file, loaded))
}

/// Validate an already-deserialized [`SceneFile`].
pub fn resolve_scene(file: &SceneFile) -> Result<LoadedScene, Vec<ParseError>> {
    let mut errors = Vec::new();
    if file.version != 1 {
        errors.push(ParseError::UnsupportedVersion { version: file.version });
    }
    let mut specs = Vec::with_capacity(file.polygons.len());
    for (i, poly) in file.polygons.iter().enumerate() {
        if poly.vertices.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            errors.push(ParseError::NonFiniteNumber { context: format!("polygon {i}") });
            continue;
        }
        specs.push(PolygonSpec::new(
            poly.kind.into(),
            poly.vertices.iter().map(|v| Point::new(v[0], v[1])).collect(),
        ));
    }
    let scene = if errors.is_empty() {
        match validate_scene(&specs) {
            Ok(scene) => Some(scene),
            Err(errs) => {
                errors.extend(errs.into_iter().map(ParseError::Scene));
                None
            }
        }
    } else {
        None
    };

    let mut point_of = |which: &'static str, raw: &Option<[f64; 2]>| -> Option<Point> {
        let raw = (*raw)?;
        if !raw[0].is_finite() || !raw[1].is_finite() {
            errors.push(ParseError::NonFiniteNumber { context: which.to_string() });
            return None;
        }
        Some(Point::new(raw[0], raw[1]))
    };
    let start = point_of("start", &file.start);
    let goal = point_of("goal", &file.goal);

    if let Some(scene) = &scene {
        for (which, p) in [("start", start), ("goal", goal)] {
            if let Some(p) = p {
                let class = classify_point(scene, p);
                if class != RegionClass::Safe {
                    errors.push(ParseError::InvalidQuery { which, x: p.x, y: p.y, class });
                }
            }
        }
    }

    match (errors.is_empty(), scene) {
        (true, Some(scene)) => Ok(LoadedScene { scene, start, goal }),
        (true, None) => unreachable!("no errors implies a validated scene"),
        (false, _) => Err(errors),
    }
}

/// Serialize a scene back to text (12 significant digits, fixed field order).
pub fn write_scene(file: &SceneFile) -> String {
    let rounded = SceneFile {
        version: file.version,
        polygons: file
            .polygons
            .iter()
            .map(|p| ScenePolygon {
                kind: p.kind,
                vertices: p.vertices.iter().map(|v| [round_sig(v[0]), round_sig(v[1])]).collect(),
            })
            .collect(),
        start: file.start.map(|p| [round_sig(p[0]), round_sig(p[1])]),
        goal: file.goal.map(|p| [round_sig(p[0]), round_sig(p[1])]),
        cost: file.cost,
    };
    let mut text = serde_json::to_string_pretty(&rounded).expect("scene files always serialize");
    text.push('\n');
    text
}

/// The plan file schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    pub cost: f64,
    pub polyline: Vec<[f64; 2]>,
    pub exposure_profile: Vec<[f64; 2]>,
    pub stats: PlanFileStats,
}

/// Deterministic counters only; wall times stay out of files.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFileStats {
    pub nodes: u64,
    pub edges: u64,
    pub labels_created: u64,
    pub labels_expanded: u64,
    pub labels_dominated: u64,
}

/// Serialize a plan result deterministically: fixed field order, 12
/// significant digits, byte-identical for identical inputs.
pub fn write_plan(result: &PlanResult) -> String {
    let file = PlanFile {
        cost: round_sig(result.cost),
        polyline: result.polyline.iter().map(|p| [round_sig(p.x), round_sig(p.y)]).collect(),
        exposure_profile: result
            .exposure_profile
            .iter()
            .map(|p| [round_sig(p.position), round_sig(p.lambda)])
            .collect(),
        stats: PlanFileStats {
            nodes: result.stats.nodes as u64,
            edges: result.stats.edges as u64,
            labels_created: result.stats.labels_created,
            labels_expanded: result.stats.labels_expanded,
            labels_dominated: result.stats.labels_dominated,
        },
    };
    let mut text = serde_json::to_string_pretty(&file).expect("plan files always serialize");
    text.push('\n');
    text
}

/// Parse a plan file.
pub fn parse_plan(text: &str) -> Result<PlanFile, Vec<ParseError>> {
    let file: PlanFile = serde_json::from_str(text).map_err(|e| vec![classify_json_error(e)])?;
    let mut errors = Vec::new();
    if !file.cost.is_finite() {
        errors.push(ParseError::NonFiniteNumber { context: "cost".to_string() });
    }
    for (i, p) in file.polyline.iter().enumerate() {
        if !p[0].is_finite() || !p[1].is_finite() {
            errors.push(ParseError::NonFiniteNumber { context: format!("polyline[{i}]") });
        }
    }
    if errors.is_empty() {
        Ok(file)
    } else {
        Err(errors)
    }
}

/// Round to 12 significant digits; normalizes negative zero.
pub(crate) fn round_sig(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    if !v.is_finite() {
        return v;
    }
    let mag = v.abs().log10().floor() as i32;
    let factor = 10f64.powi(11 - mag);
    if factor.is_finite() && factor > 0.0 {
        let r = (v * factor).round() / factor;
        if r == 0.0 {
            0.0
        } else {
            r
        }
    } else {
        v
    }
}

fn fmt_num(v: f64) -> String {
    format!("{}", round_sig(v))
}

/// Render a scene (and optionally a planned path and its query endpoints) as
/// a deterministic SVG 1.1 document. Obstacles are filled red, risk regions
/// purple, the path is stroked green and the endpoints are marked.
pub fn render_svg(
    scene: &Scene,
    polyline: Option<&[Point]>,
    query: Option<(Point, Point)>,
) -> String {
    // Bounds cover the scene plus everything drawn, with a 5% margin.
    let mut covered: Vec<Point> = Vec::new();
    if let Some((lo, hi)) = scene.bounds() {
        covered.push(lo);
        covered.push(hi);
    }
    covered.extend(polyline.into_iter().flatten());
    if let Some((s, g)) = query {
        covered.push(s);
        covered.push(g);
    }
    if covered.is_empty() {
        covered.push(Point::new(0.0, 0.0));
        covered.push(Point::new(1.0, 1.0));
    }
    let mut min = Point::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in covered {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    }
    let span = (max.x - min.x).max(max.y - min.y).max(1e-9);
    let margin = 0.05 * span;
    let (x0, y0) = (min.x - margin, min.y - margin);
    let (w, h) = (max.x - min.x + 2.0 * margin, max.y - min.y + 2.0 * margin);
    let stroke = 0.006 * span;
    let marker = 0.012 * span;

    // Scene y grows upward, SVG y downward: emit mirrored y coordinates.
    let flip = |p: Point| (p.x, -p.y);
    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" viewBox=\"{} {} {} {}\">\n",
        fmt_num(x0),
        fmt_num(-(y0 + h)),
        fmt_num(w),
        fmt_num(h)
    ));
    svg.push_str("<rect x=\"-1e9\" y=\"-1e9\" width=\"2e9\" height=\"2e9\" fill=\"white\"/>\n");
    for poly in scene.polygons() {
        let fill = match poly.kind() {
            PolygonKind::Obstacle => "red",
            PolygonKind::Risk => "purple",
        };
        let points: Vec<String> = poly
            .vertices()
            .iter()
            .map(|&p| {
                let (x, y) = flip(p);
                format!("{},{}", fmt_num(x), fmt_num(y))
            })
            .collect();
        svg.push_str(&format!(
            "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.55\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
            points.join(" "),
            fill,
            fill,
            fmt_num(stroke)
        ));
    }
    if let Some(path) = polyline {
        let points: Vec<String> = path
            .iter()
            .map(|&p| {
                let (x, y) = flip(p);
                format!("{},{}", fmt_num(x), fmt_num(y))
            })
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"green\" stroke-width=\"{}\"/>\n",
            points.join(" "),
            fmt_num(1.5 * stroke)
        ));
    }
    let endpoints = query.or_else(|| {
        polyline.and_then(|p| match (p.first(), p.last()) {
            (Some(&s), Some(&g)) => Some((s, g)),
            _ => None,
        })
    });
    if let Some((s, g)) = endpoints {
        for (p, fill) in [(s, "green"), (g, "black")] {
            let (x, y) = flip(p);
            svg.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>\n",
                fmt_num(x),
                fmt_num(y),
                fmt_num(marker),
                fill
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}
