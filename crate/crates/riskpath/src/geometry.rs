//! Polygonal scenes and region classification.
//!
//! A scene is a set of simple, pairwise interior-disjoint polygons, each
//! tagged as an obstacle or a risk zone. The plane splits into three regions:
//!
//! * **Forbidden** — the open interiors of obstacle polygons. Paths may touch
//!   the boundary of an obstacle but never enter it.
//! * **Risk** — the open interiors of risk polygons, plus every boundary
//!   point shared between a risk polygon and an obstacle polygon.
//! * **Safe** — everything else. In particular an *unshared* polygon
//!   boundary is safe, which is what makes grazing along a risk boundary
//!   free of exposure.
//!
//! Classification is discrete, so it is decided by exact sign predicates on
//! the input coordinates (no tolerance band). Continuous quantities —
//! intersection parameters and run lengths along a segment — are computed in
//! floating point and snapped with a relative tolerance of [`SNAP_TOL`].

use std::fmt;

use robust::{orient2d, Coord};
use thiserror::Error;

/// Relative tolerance for snapping intersection parameters along a segment.
/// Runs shorter than `SNAP_TOL * |ab|` are merged into their neighbours.
pub const SNAP_TOL: f64 = 1e-9;

/// A point of the plane, in scene units.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Interpolate between `self` and `other`; exact at the endpoints.
    pub(crate) fn lerp(self, other: Point, t: f64) -> Point {
        if t == 0.0 {
            self
        } else if t == 1.0 {
            other
        } else {
            Point::new(self.x + t * (other.x - self.x), self.y + t * (other.y - self.y))
        }
    }

    /// Bit pattern key for exact deduplication.
    pub(crate) fn bits(self) -> (u64, u64) {
        (self.x.to_bits(), self.y.to_bits())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// What a polygon contributes to the scene.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolygonKind {
    Obstacle,
    Risk,
}

/// The trichotomy of the plane induced by a scene.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionClass {
    Safe,
    Risk,
    Forbidden,
}

/// Raw polygon input for [`validate_scene`].
#[derive(Clone, Debug)]
pub struct PolygonSpec {
    pub kind: PolygonKind,
    pub vertices: Vec<Point>,
}

impl PolygonSpec {
    pub fn new(kind: PolygonKind, vertices: Vec<Point>) -> Self {
        PolygonSpec { kind, vertices }
    }
}

/// A validated simple polygon, stored counter-clockwise.
#[derive(Clone, Debug)]
pub struct Polygon {
    kind: PolygonKind,
    vertices: Vec<Point>,
    min: Point,
    max: Point,
}

/// Exact position of a point relative to one polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Location {
    Interior,
    Boundary,
    Exterior,
}

impl Polygon {
    pub fn kind(&self) -> PolygonKind {
        self.kind
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Edges in order, each as (from, to), closing back to the first vertex.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub(crate) fn bounding_box(&self) -> (Point, Point) {
        (self.min, self.max)
    }

    fn bbox_contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Exact point location: boundary test on every edge, then ray-crossing
    /// parity with exact orientation signs.
    pub(crate) fn locate(&self, p: Point) -> Location {
        if !self.bbox_contains(p) {
            return Location::Exterior;
        }
        let mut inside = false;
        let n = self.vertices.len();
        for i in 0..n {
            let u = self.vertices[i];
            let v = self.vertices[(i + 1) % n];
            if on_segment(u, v, p) {
                return Location::Boundary;
            }
            // Half-open crossing rule: count edges whose y-span strictly
            // brackets p.y, using the exact side of the edge line.
            if (u.y > p.y) != (v.y > p.y) {
                let o = orient(u, v, p);
                let crosses = if v.y > u.y { o > 0.0 } else { o < 0.0 };
                if crosses {
                    inside = !inside;
                }
            }
        }
        if inside {
            Location::Interior
        } else {
            Location::Exterior
        }
    }
}

/// A non-fatal oddity noticed during validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SceneWarning {
    /// Two risk polygons share a border segment. By the literal region
    /// definitions that seam is safe — it lies in neither interior and is
    /// not an obstacle border — so crossing it resets exposure for an
    /// instant, which may not be what the scene author intended.
    RiskRiskSharedBorder { first: usize, second: usize },
}

impl fmt::Display for SceneWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SceneWarning::RiskRiskSharedBorder { first, second } => write!(
                f,
                "risk polygons {first} and {second} share a border; the seam is safe and \
                 crossing it resets exposure"
            ),
        }
    }
}

/// A validated scene of interior-disjoint polygons.
#[derive(Clone, Debug, Default)]
pub struct Scene {
    polygons: Vec<Polygon>,
    vertex_count: usize,
    min: Point,
    max: Point,
    diameter: f64,
    warnings: Vec<SceneWarning>,
}

impl Scene {
    /// A scene with no polygons: the whole plane is safe.
    pub fn empty() -> Scene {
        Scene::default()
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    /// Total vertex count over all polygons.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn polygon_count(&self) -> usize {
        self.polygons.len()
    }

    /// Diagonal of the bounding box of all polygons; 0 for an empty scene.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Bounding box of all polygons, if any.
    pub fn bounds(&self) -> Option<(Point, Point)> {
        if self.polygons.is_empty() {
            None
        } else {
            Some((self.min, self.max))
        }
    }

    /// Non-fatal oddities noticed during validation.
    pub fn warnings(&self) -> &[SceneWarning] {
        &self.warnings
    }

    fn obstacles(&self) -> impl Iterator<Item = &Polygon> {
        self.polygons.iter().filter(|p| p.kind == PolygonKind::Obstacle)
    }
}

/// A violation found by [`validate_scene`]. Indices refer to the input order.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SceneError {
    #[error("polygon {polygon}: has {count} vertices, need at least 3")]
    TooFewVertices { polygon: usize, count: usize },
    #[error("polygon {polygon}: non-finite vertex coordinate")]
    NonFiniteVertex { polygon: usize },
    #[error("polygon {polygon}: boundary self-intersects or repeats a vertex")]
    NonSimplePolygon { polygon: usize },
    #[error("polygon {polygon}: encloses zero area")]
    ZeroArea { polygon: usize },
    #[error("polygons {first} and {second}: interiors overlap")]
    InteriorOverlap { first: usize, second: usize },
}

/// Validate raw polygons into a [`Scene`].
///
/// Reports the complete list of violations; the only silent repair is
/// normalizing vertex order to counter-clockwise.
pub fn validate_scene(polygons: &[PolygonSpec]) -> Result<Scene, Vec<SceneError>> {
    let mut errors = Vec::new();
    let mut valid: Vec<(usize, Polygon)> = Vec::new();

    for (idx, spec) in polygons.iter().enumerate() {
        match check_polygon(idx, spec) {
            Ok(poly) => valid.push((idx, poly)),
            Err(mut errs) => errors.append(&mut errs),
        }
    }

    for i in 0..valid.len() {
        for j in (i + 1)..valid.len() {
            if interiors_overlap(&valid[i].1, &valid[j].1) {
                errors.push(SceneError::InteriorOverlap {
                    first: valid[i].0,
                    second: valid[j].0,
                });
            }
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }

    let mut warnings = Vec::new();
    for i in 0..valid.len() {
        for j in (i + 1)..valid.len() {
            let (a, b) = (&valid[i].1, &valid[j].1);
            if a.kind == PolygonKind::Risk
                && b.kind == PolygonKind::Risk
                && a.edges().any(|(u, v)| edge_overlaps_some_edge(u, v, b))
            {
                warnings.push(SceneWarning::RiskRiskSharedBorder {
                    first: valid[i].0,
                    second: valid[j].0,
                });
            }
        }
    }

    let polygons: Vec<Polygon> = valid.into_iter().map(|(_, p)| p).collect();
    let vertex_count = polygons.iter().map(|p| p.vertices.len()).sum();
    let (mut min, mut max) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in &polygons {
        min.x = min.x.min(p.min.x);
        min.y = min.y.min(p.min.y);
        max.x = max.x.max(p.max.x);
        max.y = max.y.max(p.max.y);
    }
    let diameter = if polygons.is_empty() { 0.0 } else { min.distance(max) };
    if polygons.is_empty() {
        min = Point::default();
        max = Point::default();
    }
    Ok(Scene { polygons, vertex_count, min, max, diameter, warnings })
}

fn check_polygon(idx: usize, spec: &PolygonSpec) -> Result<Polygon, Vec<SceneError>> {
    let mut errors = Vec::new();
    let verts = &spec.vertices;

    if verts.iter().any(|p| !p.is_finite()) {
        errors.push(SceneError::NonFiniteVertex { polygon: idx });
        return Err(errors);
    }
    if verts.len() < 3 {
        errors.push(SceneError::TooFewVertices { polygon: idx, count: verts.len() });
        return Err(errors);
    }
    if !is_simple(verts) {
        errors.push(SceneError::NonSimplePolygon { polygon: idx });
        return Err(errors);
    }
    let area = signed_area(verts);
    if area == 0.0 {
        errors.push(SceneError::ZeroArea { polygon: idx });
        return Err(errors);
    }

    let mut vertices = verts.clone();
    if area < 0.0 {
        vertices.reverse();
    }
    let mut min = Point::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &vertices {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    }
    Ok(Polygon { kind: spec.kind, vertices, min, max })
}

/// Twice-signed shoelace area, halved. Positive for counter-clockwise order.
fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    acc / 2.0
}

fn is_simple(vertices: &[Point]) -> bool {
    let n = vertices.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if vertices[i] == vertices[j] {
                return false;
            }
        }
    }
    for i in 0..n {
        let (a1, b1) = (vertices[i], vertices[(i + 1) % n]);
        for j in (i + 1)..n {
            let (a2, b2) = (vertices[j], vertices[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Adjacent edges may only meet at their shared vertex; a
                // collinear spike puts one endpoint on the other edge.
                if on_segment(a1, b1, if j == i + 1 { b2 } else { a2 })
                    || on_segment(a2, b2, if j == i + 1 { a1 } else { b1 })
                {
                    return false;
                }
            } else if segments_intersect(a1, b1, a2, b2) {
                return false;
            }
        }
    }
    true
}

/// Do two closed segments share any point? Exact.
fn segments_intersect(a1: Point, b1: Point, a2: Point, b2: Point) -> bool {
    let o1 = orient(a1, b1, a2);
    let o2 = orient(a1, b1, b2);
    let o3 = orient(a2, b2, a1);
    let o4 = orient(a2, b2, b1);
    if opposite_signs(o1, o2) && opposite_signs(o3, o4) {
        return true;
    }
    (o1 == 0.0 && on_segment(a1, b1, a2))
        || (o2 == 0.0 && on_segment(a1, b1, b2))
        || (o3 == 0.0 && on_segment(a2, b2, a1))
        || (o4 == 0.0 && on_segment(a2, b2, b1))
}

fn opposite_signs(o1: f64, o2: f64) -> bool {
    (o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)
}

/// Do the open interiors of two simple polygons intersect?
///
/// Decides by: proper boundary crossings; vertices or edge midpoints of one
/// strictly inside the other; and coincident boundaries. Edge midpoints are
/// only probed when the edge does not overlap an edge of the other polygon
/// collinearly, so legal shared borders are never misreported.
fn interiors_overlap(a: &Polygon, b: &Polygon) -> bool {
    if a.max.x < b.min.x || b.max.x < a.min.x || a.max.y < b.min.y || b.max.y < a.min.y {
        return false;
    }
    for (u1, v1) in a.edges() {
        for (u2, v2) in b.edges() {
            let o1 = orient(u1, v1, u2);
            let o2 = orient(u1, v1, v2);
            let o3 = orient(u2, v2, u1);
            let o4 = orient(u2, v2, v1);
            if opposite_signs(o1, o2) && opposite_signs(o3, o4) {
                return true;
            }
        }
    }
    if probe_interior(a, b) || probe_interior(b, a) {
        return true;
    }
    coincident_boundary(a, b)
}

fn probe_interior(a: &Polygon, b: &Polygon) -> bool {
    for &v in &a.vertices {
        if b.locate(v) == Location::Interior {
            return true;
        }
    }
    for (u, v) in a.edges() {
        if edge_overlaps_some_edge(u, v, b) {
            continue;
        }
        let mid = u.lerp(v, 0.5);
        if b.locate(mid) == Location::Interior {
            return true;
        }
    }
    false
}

fn edge_overlaps_some_edge(u: Point, v: Point, b: &Polygon) -> bool {
    for (p, q) in b.edges() {
        if orient(p, q, u) == 0.0 && orient(p, q, v) == 0.0 {
            // Same line; do the segments share more than a point?
            let (ulo, uhi) = (project(p, q, u), project(p, q, v));
            let (lo, hi) = (ulo.min(uhi), ulo.max(uhi));
            if hi > 0.0 && lo < 1.0 {
                return true;
            }
        }
    }
    false
}

fn coincident_boundary(a: &Polygon, b: &Polygon) -> bool {
    a.vertices.iter().all(|&v| b.locate(v) == Location::Boundary)
        && a.edges().all(|(u, v)| edge_overlaps_some_edge(u, v, b))
}

/// Exact orientation sign of the triangle (a, b, c): positive when
/// counter-clockwise, negative when clockwise, zero when collinear. The
/// magnitude approximates twice the signed area.
pub(crate) fn orient(a: Point, b: Point, c: Point) -> f64 {
    orient2d(
        Coord { x: a.x, y: a.y },
        Coord { x: b.x, y: b.y },
        Coord { x: c.x, y: c.y },
    )
}

/// Exact test: does `p` lie on the closed segment [a, b]?
pub(crate) fn on_segment(a: Point, b: Point, p: Point) -> bool {
    orient(a, b, p) == 0.0
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

/// Parameter of the projection of `p` onto the line through `a`, `b`.
fn project(a: Point, b: Point, p: Point) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    ((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy)
}

/// Classify one point against the scene regions.
///
/// Forbidden iff inside some obstacle; risk iff inside some risk polygon or
/// on a boundary point shared by an obstacle and a risk polygon; safe
/// otherwise. Unshared boundaries are safe.
pub fn classify_point(scene: &Scene, p: Point) -> RegionClass {
    let mut interior_risk = false;
    let mut on_risk_border = false;
    let mut on_obstacle_border = false;
    for poly in scene.polygons() {
        match (poly.locate(p), poly.kind) {
            (Location::Interior, PolygonKind::Obstacle) => return RegionClass::Forbidden,
            (Location::Interior, PolygonKind::Risk) => interior_risk = true,
            (Location::Boundary, PolygonKind::Obstacle) => on_obstacle_border = true,
            (Location::Boundary, PolygonKind::Risk) => on_risk_border = true,
            (Location::Exterior, _) => {}
        }
    }
    if interior_risk || (on_risk_border && on_obstacle_border) {
        RegionClass::Risk
    } else {
        RegionClass::Safe
    }
}

/// Class of one run of a classified segment. Forbidden runs are rejected
/// before a polyline is ever produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RunClass {
    Safe,
    Risk,
}

/// One event along a classified segment.
#[derive(Clone, Debug)]
pub enum SegmentEvent {
    /// A maximal subsegment whose relative interior is uniformly one class.
    Run { class: RunClass, length: f64, from: Point, to: Point },
    /// An isolated safe point strictly between two risk runs. It has zero
    /// length but resets exposure.
    SafeTouch { at: Point, parameter: f64 },
}

impl SegmentEvent {
    pub fn length(&self) -> f64 {
        match self {
            SegmentEvent::Run { length, .. } => *length,
            SegmentEvent::SafeTouch { .. } => 0.0,
        }
    }
}

/// A straight segment partitioned into classified runs and safe touches.
#[derive(Clone, Debug)]
pub struct ClassifiedPolyline {
    pub origin: Point,
    pub destination: Point,
    pub events: Vec<SegmentEvent>,
}

impl ClassifiedPolyline {
    /// Total run length (equals |origin destination| up to rounding).
    pub fn length(&self) -> f64 {
        self.events.iter().map(|e| e.length()).sum()
    }

    /// The same partition traversed in the opposite direction.
    pub fn reversed(&self) -> ClassifiedPolyline {
        ClassifiedPolyline {
            origin: self.destination,
            destination: self.origin,
            events: reverse_events(&self.events),
        }
    }
}

/// Reverse an event list, swapping run endpoints and mirroring parameters.
pub fn reverse_events(events: &[SegmentEvent]) -> Vec<SegmentEvent> {
    events
        .iter()
        .rev()
        .map(|e| match e {
            SegmentEvent::Run { class, length, from, to } => SegmentEvent::Run {
                class: *class,
                length: *length,
                from: *to,
                to: *from,
            },
            SegmentEvent::SafeTouch { at, parameter } => SegmentEvent::SafeTouch {
                at: *at,
                parameter: 1.0 - parameter,
            },
        })
        .collect()
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("segment crosses the interior of an obstacle near {at}")]
    ForbiddenIntersection { at: Point },
    #[error("degenerate segment: endpoints coincide at {at}")]
    DegenerateSegment { at: Point },
}

/// A snapped parameter where the segment meets polygon boundaries, with the
/// kinds of polygons whose border contains the point.
#[derive(Clone, Copy, Debug)]
struct BreakPoint {
    t: f64,
    on_risk: bool,
    on_obstacle: bool,
}

/// A maximal parameter interval where the segment runs along a polygon edge.
#[derive(Clone, Copy, Debug)]
struct Cover {
    t0: f64,
    t1: f64,
    kind: PolygonKind,
}

struct Crossings {
    /// Sorted, deduplicated parameters including 0 and 1.
    params: Vec<BreakPoint>,
    covers: Vec<Cover>,
}

fn collect_crossings<'a>(
    polygons: impl Iterator<Item = &'a Polygon>,
    a: Point,
    b: Point,
) -> Crossings {
    let seg_min = Point::new(a.x.min(b.x), a.y.min(b.y));
    let seg_max = Point::new(a.x.max(b.x), a.y.max(b.y));
    let mut raw: Vec<(f64, Option<PolygonKind>)> = vec![(0.0, None), (1.0, None)];
    let mut covers = Vec::new();

    for poly in polygons {
        let (pmin, pmax) = poly.bounding_box();
        if pmax.x < seg_min.x || seg_max.x < pmin.x || pmax.y < seg_min.y || seg_max.y < pmin.y {
            continue;
        }
        let kind = poly.kind();
        for (u, v) in poly.edges() {
            let ou = orient(a, b, u);
            let ov = orient(a, b, v);
            if ou == 0.0 && ov == 0.0 {
                // Edge collinear with the segment line: record the overlap.
                let tu = project(a, b, u);
                let tv = project(a, b, v);
                let (lo, hi) = (tu.min(tv).max(0.0), tu.max(tv).min(1.0));
                if hi < lo {
                    continue;
                }
                if hi - lo > SNAP_TOL {
                    covers.push(Cover { t0: lo, t1: hi, kind });
                }
                raw.push((lo, Some(kind)));
                raw.push((hi, Some(kind)));
            } else if ou == 0.0 {
                if on_segment(a, b, u) {
                    raw.push((project(a, b, u).clamp(0.0, 1.0), Some(kind)));
                }
            } else if ov == 0.0 {
                if on_segment(a, b, v) {
                    raw.push((project(a, b, v).clamp(0.0, 1.0), Some(kind)));
                }
            } else if opposite_signs(ou, ov) {
                let oa = orient(u, v, a);
                let ob = orient(u, v, b);
                if oa == 0.0 {
                    if on_segment(u, v, a) {
                        raw.push((0.0, Some(kind)));
                    }
                } else if ob == 0.0 {
                    if on_segment(u, v, b) {
                        raw.push((1.0, Some(kind)));
                    }
                } else if opposite_signs(oa, ob) {
                    let t = (oa / (oa - ob)).clamp(0.0, 1.0);
                    raw.push((t, Some(kind)));
                }
            }
        }
    }

    raw.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut params: Vec<BreakPoint> = Vec::new();
    for (t, kind) in raw {
        let absorbed = match params.last_mut() {
            Some(last) if t - last.t <= SNAP_TOL => Some(last),
            _ => None,
        };
        let bp = match absorbed {
            Some(last) => last,
            None => {
                params.push(BreakPoint { t, on_risk: false, on_obstacle: false });
                params.last_mut().unwrap()
            }
        };
        match kind {
            Some(PolygonKind::Risk) => bp.on_risk = true,
            Some(PolygonKind::Obstacle) => bp.on_obstacle = true,
            None => {}
        }
    }
    // Pin the cluster representatives at the endpoints.
    if let Some(first) = params.first_mut() {
        first.t = 0.0;
    }
    if let Some(last) = params.last_mut() {
        if last.t >= 1.0 - SNAP_TOL {
            last.t = 1.0;
        } else {
            params.push(BreakPoint { t: 1.0, on_risk: false, on_obstacle: false });
        }
    }
    Crossings { params, covers }
}

/// Kinds of collinear covers spanning a run, if any.
fn run_cover(covers: &[Cover], t0: f64, t1: f64) -> Option<(bool, bool)> {
    let mut on_risk = false;
    let mut on_obstacle = false;
    let mut covered = false;
    for c in covers {
        if c.t0 <= t0 + SNAP_TOL && t1 <= c.t1 + SNAP_TOL {
            covered = true;
            match c.kind {
                PolygonKind::Risk => on_risk = true,
                PolygonKind::Obstacle => on_obstacle = true,
            }
        }
    }
    covered.then_some((on_risk, on_obstacle))
}

/// Partition the segment [a, b] into classified runs and safe touches.
///
/// Exposure semantics of the result: the run sequence covers the segment in
/// order, adjacent runs differ in class, and a [`SegmentEvent::SafeTouch`]
/// marks an isolated safe point between two risk runs (it resets exposure).
/// Fails with [`GeometryError::ForbiddenIntersection`] when any open piece of
/// the segment lies inside an obstacle.
pub fn partition_segment(scene: &Scene, a: Point, b: Point) -> Result<ClassifiedPolyline, GeometryError> {
    if a == b {
        return Err(GeometryError::DegenerateSegment { at: a });
    }
    let crossings = collect_crossings(scene.polygons().iter(), a, b);
    let seg_len = a.distance(b);

    // Classify each run between consecutive parameters; remember which
    // parameter starts each run so junction provenance stays aligned.
    let mut runs: Vec<(usize, f64, f64, RunClass)> = Vec::new();
    for (start_idx, w) in crossings.params.windows(2).enumerate() {
        let (t0, t1) = (w[0].t, w[1].t);
        if t1 <= t0 {
            continue;
        }
        let class = match run_cover(&crossings.covers, t0, t1) {
            // The run lies on polygon borders: risk only when both an
            // obstacle and a risk border contain it.
            Some((on_risk, on_obstacle)) => {
                if on_risk && on_obstacle {
                    RunClass::Risk
                } else {
                    RunClass::Safe
                }
            }
            None => {
                let mid = a.lerp(b, 0.5 * (t0 + t1));
                match classify_point(scene, mid) {
                    RegionClass::Forbidden => {
                        return Err(GeometryError::ForbiddenIntersection { at: mid })
                    }
                    RegionClass::Risk => RunClass::Risk,
                    RegionClass::Safe => RunClass::Safe,
                }
            }
        };
        runs.push((start_idx, t0, t1, class));
    }
    debug_assert!(!runs.is_empty());

    // Merge runs across junctions and emit safe touches. The class of a
    // junction point follows its boundary provenance: a point on both an
    // obstacle and a risk border is risk, any other boundary point is safe.
    // Provenance comes from the edges generating the breakpoint plus any
    // collinear cover spanning it.
    let mut events: Vec<SegmentEvent> = Vec::new();
    let mut cur = runs[0];
    for &next in runs.iter().skip(1) {
        let junction = &crossings.params[next.0];
        debug_assert_eq!(junction.t, next.1);
        let mut on_risk = junction.on_risk;
        let mut on_obstacle = junction.on_obstacle;
        for c in &crossings.covers {
            if c.t0 <= junction.t + SNAP_TOL && junction.t <= c.t1 + SNAP_TOL {
                match c.kind {
                    PolygonKind::Risk => on_risk = true,
                    PolygonKind::Obstacle => on_obstacle = true,
                }
            }
        }
        let junction_class = if on_risk && on_obstacle {
            RegionClass::Risk
        } else if on_risk || on_obstacle {
            RegionClass::Safe
        } else {
            classify_point(scene, a.lerp(b, junction.t))
        };
        if cur.3 == next.3 {
            if cur.3 == RunClass::Risk && junction_class == RegionClass::Safe {
                push_run(&mut events, a, b, seg_len, cur);
                events.push(SegmentEvent::SafeTouch {
                    at: a.lerp(b, junction.t),
                    parameter: junction.t,
                });
                cur = next;
            } else {
                cur.2 = next.2;
            }
        } else {
            push_run(&mut events, a, b, seg_len, cur);
            cur = next;
        }
    }
    push_run(&mut events, a, b, seg_len, cur);

    Ok(ClassifiedPolyline { origin: a, destination: b, events })
}

fn push_run(
    events: &mut Vec<SegmentEvent>,
    a: Point,
    b: Point,
    seg_len: f64,
    run: (usize, f64, f64, RunClass),
) {
    let (_, t0, t1, class) = run;
    events.push(SegmentEvent::Run {
        class,
        length: (t1 - t0) * seg_len,
        from: a.lerp(b, t0),
        to: a.lerp(b, t1),
    });
}

/// Is the open segment (a, b) disjoint from every obstacle interior?
///
/// Crossing risk regions does not block visibility, and neither does sliding
/// collinearly along an obstacle boundary.
pub fn segment_visible(scene: &Scene, a: Point, b: Point) -> bool {
    if a == b {
        return true;
    }
    let crossings = collect_crossings(scene.obstacles(), a, b);
    for w in crossings.params.windows(2) {
        let (t0, t1) = (w[0].t, w[1].t);
        if t1 <= t0 || run_cover(&crossings.covers, t0, t1).is_some() {
            continue;
        }
        let mid = a.lerp(b, 0.5 * (t0 + t1));
        if scene.obstacles().any(|p| p.locate(mid) == Location::Interior) {
            return false;
        }
    }
    true
}
