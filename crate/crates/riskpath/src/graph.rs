//! The approximation graph: dense boundary samples plus polygon vertices
//! plus the query endpoints, connected by visibility edges.
//!
//! Sampling is uniform per edge with dyadic refinement — the sample set at
//! level `k` is a subset of the set at level `k + 1` — so planner costs are
//! non-increasing under refinement and convergence studies are monotone.

use std::collections::HashMap;
use std::time::Instant;

use thiserror::Error;

use crate::cost::{summarize_edge, CostFunction, EdgeSummary};
use crate::geometry::{
    classify_point, partition_segment, Point, PolygonKind, RegionClass, Scene, SegmentEvent,
};

/// Boundary sampling density: consecutive samples on a risk-polygon edge are
/// at most `delta / 2^level` apart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingParams {
    pub delta: f64,
    pub level: u32,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("sampling spacing must be positive and finite, got {delta}")]
    InvalidDelta { delta: f64 },
    #[error("{which} point {point} classifies {class:?}; queries must be safe")]
    InvalidQuery { which: QueryEnd, point: Point, class: RegionClass },
    #[error("start and goal coincide at {at}")]
    DegenerateQuery { at: Point },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryEnd {
    Start,
    Goal,
}

impl std::fmt::Display for QueryEnd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QueryEnd::Start => write!(f, "start"),
            QueryEnd::Goal => write!(f, "goal"),
        }
    }
}

impl SamplingParams {
    pub fn new(delta: f64, level: u32) -> Result<Self, BuildError> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(BuildError::InvalidDelta { delta });
        }
        Ok(SamplingParams { delta, level })
    }

    /// Default spacing for a scene: diameter / 64 at level 0 (unit spacing
    /// for an empty scene, where no samples are generated anyway).
    pub fn for_scene(scene: &Scene) -> Self {
        let d = scene.diameter();
        SamplingParams { delta: if d > 0.0 { d / 64.0 } else { 1.0 }, level: 0 }
    }

    pub fn effective_spacing(&self) -> f64 {
        self.delta / (1u64 << self.level.min(63)) as f64
    }

    /// The same base spacing one dyadic level finer.
    pub fn refined(&self, level: u32) -> Self {
        SamplingParams { delta: self.delta, level }
    }
}

/// Sample points along every risk-polygon edge, at most the effective
/// spacing apart, endpoints included, deduplicated across shared borders.
///
/// Each edge is cut into `ceil(len / delta) · 2^level` equal pieces, so the
/// sample set at one level nests inside every finer level.
pub fn sample_boundary(scene: &Scene, params: &SamplingParams) -> Vec<Point> {
    let mut seen: HashMap<(u64, u64), ()> = HashMap::new();
    let mut samples = Vec::new();
    for poly in scene.polygons() {
        if poly.kind() != PolygonKind::Risk {
            continue;
        }
        for (u, v) in poly.edges() {
            // Canonical direction so both sides of a shared edge generate
            // bit-identical points.
            let (a, b) = if (u.x, u.y) <= (v.x, v.y) { (u, v) } else { (v, u) };
            let len = a.distance(b);
            let base = (len / params.delta).ceil().max(1.0) as u64;
            let pieces = base.saturating_mul(1u64 << params.level.min(63));
            for i in 0..=pieces {
                let p = a.lerp(b, i as f64 / pieces as f64);
                if seen.insert(p.bits(), ()).is_none() {
                    samples.push(p);
                }
            }
        }
    }
    samples
}

/// Where a graph node came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeProvenance {
    Vertex,
    Sample,
    Query,
}

pub type NodeId = usize;

#[derive(Clone, Debug)]
pub struct GraphNode {
    pub position: Point,
    pub class: RegionClass,
    pub provenance: NodeProvenance,
}

/// One undirected visibility edge. The classified events are stored in the
/// `a → b` direction; summaries are stored per direction because the leading
/// and trailing risk runs swap under reversal.
#[derive(Clone, Debug)]
pub struct EdgeRecord {
    pub a: NodeId,
    pub b: NodeId,
    pub forward: EdgeSummary,
    pub backward: EdgeSummary,
    pub events: Vec<SegmentEvent>,
}

impl EdgeRecord {
    /// Summary for traversal out of `from`.
    pub fn summary_from(&self, from: NodeId) -> &EdgeSummary {
        if from == self.a {
            &self.forward
        } else {
            debug_assert_eq!(from, self.b);
            &self.backward
        }
    }

    /// Events oriented for traversal out of `from`.
    pub fn events_from(&self, from: NodeId) -> Vec<SegmentEvent> {
        if from == self.a {
            self.events.clone()
        } else {
            crate::geometry::reverse_events(&self.events)
        }
    }
}

/// The finished plan graph: immutable, deterministic node ordering.
#[derive(Clone, Debug)]
pub struct PlanGraph {
    scene: Scene,
    nodes: Vec<GraphNode>,
    edges: Vec<EdgeRecord>,
    adjacency: Vec<Vec<(usize, NodeId)>>,
    start: NodeId,
    goal: NodeId,
    cost_fn: CostFunction,
    build_time: std::time::Duration,
}

impl PlanGraph {
    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn start(&self) -> NodeId {
        self.start
    }

    pub fn goal(&self) -> NodeId {
        self.goal
    }

    pub fn cost_fn(&self) -> &CostFunction {
        &self.cost_fn
    }

    pub fn build_time(&self) -> std::time::Duration {
        self.build_time
    }

    /// Neighbors of `u` as (edge, other endpoint), in insertion order.
    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = (&EdgeRecord, NodeId)> {
        self.adjacency[u].iter().map(move |&(e, v)| (&self.edges[e], v))
    }

    /// Strip all edges; used by tests to model disconnected graphs.
    #[cfg(test)]
    pub(crate) fn disconnected(mut self) -> Self {
        self.edges.clear();
        for adj in &mut self.adjacency {
            adj.clear();
        }
        self
    }
}

/// Build the visibility graph over polygon vertices, boundary samples and
/// the two query endpoints. Both query points must classify safe.
pub fn build_graph(
    scene: &Scene,
    start: Point,
    goal: Point,
    params: &SamplingParams,
    f: &CostFunction,
) -> Result<PlanGraph, BuildError> {
    let t0 = Instant::now();
    for (which, p) in [(QueryEnd::Start, start), (QueryEnd::Goal, goal)] {
        let class = classify_point(scene, p);
        if class != RegionClass::Safe {
            return Err(BuildError::InvalidQuery { which, point: p, class });
        }
    }
    if start == goal {
        return Err(BuildError::DegenerateQuery { at: start });
    }

    let mut nodes: Vec<GraphNode> = Vec::new();
    let mut index: HashMap<(u64, u64), NodeId> = HashMap::new();
    let mut add = |p: Point, provenance: NodeProvenance, nodes: &mut Vec<GraphNode>| -> Option<NodeId> {
        if let Some(&id) = index.get(&p.bits()) {
            return Some(id);
        }
        let class = classify_point(scene, p);
        if class == RegionClass::Forbidden {
            return None;
        }
        let id = nodes.len();
        nodes.push(GraphNode { position: p, class, provenance });
        index.insert(p.bits(), id);
        Some(id)
    };

    for poly in scene.polygons() {
        for &v in poly.vertices() {
            add(v, NodeProvenance::Vertex, &mut nodes);
        }
    }
    for p in sample_boundary(scene, params) {
        add(p, NodeProvenance::Sample, &mut nodes);
    }
    let start_id = add(start, NodeProvenance::Query, &mut nodes)
        .expect("start classifies safe, never forbidden");
    let goal_id =
        add(goal, NodeProvenance::Query, &mut nodes).expect("goal classifies safe, never forbidden");

    let mut edges: Vec<EdgeRecord> = Vec::new();
    let mut adjacency: Vec<Vec<(usize, NodeId)>> = vec![Vec::new(); nodes.len()];
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            // A partition succeeds exactly when no open piece of the segment
            // crosses an obstacle interior, i.e. when the pair is visible.
            let Ok(cpl) = partition_segment(scene, nodes[i].position, nodes[j].position) else {
                continue;
            };
            let forward = summarize_edge(&cpl);
            let backward = summarize_edge(&cpl.reversed());
            let e = edges.len();
            edges.push(EdgeRecord { a: i, b: j, forward, backward, events: cpl.events });
            adjacency[i].push((e, j));
            adjacency[j].push((e, i));
        }
    }

    Ok(PlanGraph {
        scene: scene.clone(),
        nodes,
        edges,
        adjacency,
        start: start_id,
        goal: goal_id,
        cost_fn: f.clone(),
        build_time: t0.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{validate_scene, PolygonSpec};

    fn rect(kind: PolygonKind, x0: f64, y0: f64, x1: f64, y1: f64) -> PolygonSpec {
        PolygonSpec::new(
            kind,
            vec![
                Point::new(x0, y0),
                Point::new(x1, y0),
                Point::new(x1, y1),
                Point::new(x0, y1),
            ],
        )
    }

    #[test]
    fn samples_unit_square_at_half_spacing() {
        let scene = validate_scene(&[rect(PolygonKind::Risk, 0.0, 0.0, 1.0, 1.0)]).unwrap();
        let params = SamplingParams::new(0.5, 0).unwrap();
        let samples = sample_boundary(&scene, &params);
        assert_eq!(samples.len(), 8); // 4 corners + 4 edge midpoints
    }

    #[test]
    fn coarse_delta_keeps_corners_only() {
        let scene = validate_scene(&[rect(PolygonKind::Risk, 0.0, 0.0, 1.0, 1.0)]).unwrap();
        let samples = sample_boundary(&scene, &SamplingParams::new(2.0, 0).unwrap());
        assert_eq!(samples.len(), 4);
    }

    #[test]
    fn levels_nest() {
        let scene = validate_scene(&[
            rect(PolygonKind::Risk, 0.0, 0.0, 1.3, 0.7),
            rect(PolygonKind::Risk, 1.3, 0.0, 2.0, 0.7),
        ])
        .unwrap();
        let base = SamplingParams::new(0.37, 0).unwrap();
        let mut previous: Option<Vec<(u64, u64)>> = None;
        for level in 0..4 {
            let samples = sample_boundary(&scene, &base.refined(level));
            let keys: Vec<(u64, u64)> = samples.iter().map(|p| p.bits()).collect();
            if let Some(prev) = &previous {
                let set: std::collections::HashSet<_> = keys.iter().copied().collect();
                for k in prev {
                    assert!(set.contains(k), "level {level} lost a coarser sample");
                }
            }
            previous = Some(keys);
        }
    }

    #[test]
    fn shared_border_samples_deduplicate() {
        let scene = validate_scene(&[
            rect(PolygonKind::Risk, 0.0, 0.0, 1.0, 1.0),
            rect(PolygonKind::Risk, 1.0, 0.0, 2.0, 1.0),
        ])
        .unwrap();
        let samples = sample_boundary(&scene, &SamplingParams::new(0.5, 0).unwrap());
        // Perimeter samples of both squares at spacing 0.5, shared edge
        // counted once: 8 + 8 - (corners 2 + midpoint 1) = 13... but the
        // shared corners already dedupe within the union: count distinct.
        let mut set = std::collections::HashSet::new();
        for p in &samples {
            assert!(set.insert(p.bits()), "duplicate sample {p}");
        }
        assert_eq!(samples.len(), 13);
    }

    #[test]
    fn empty_scene_graph_is_one_edge() {
        let scene = Scene::empty();
        let g = build_graph(
            &scene,
            Point::new(0.0, 0.0),
            Point::new(3.0, 4.0),
            &SamplingParams::for_scene(&scene),
            &CostFunction::Exp,
        )
        .unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        let e = &g.edges()[0];
        assert!(e.forward.has_reset);
        assert_eq!(e.forward.r_pre, 0.0);
        assert!((e.forward.c_mid - 5.0).abs() < 1e-12);
    }

    #[test]
    fn single_risk_square_is_complete_graph() {
        let scene = validate_scene(&[rect(PolygonKind::Risk, 0.0, 0.0, 1.0, 1.0)]).unwrap();
        let g = build_graph(
            &scene,
            Point::new(-1.0, 0.5),
            Point::new(2.0, 0.5),
            &SamplingParams::new(2.0, 0).unwrap(),
            &CostFunction::Exp,
        )
        .unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 15);
    }

    #[test]
    fn obstacle_blocks_direct_edge() {
        let scene = validate_scene(&[rect(PolygonKind::Obstacle, 0.0, 0.0, 1.0, 1.0)]).unwrap();
        let s = Point::new(-1.0, 0.5);
        let t = Point::new(2.0, 0.5);
        let g = build_graph(&scene, s, t, &SamplingParams::new(2.0, 0).unwrap(), &CostFunction::Exp)
            .unwrap();
        let (sid, gid) = (g.start(), g.goal());
        let direct = g.neighbors(sid).any(|(_, v)| v == gid);
        assert!(!direct, "direct edge through the obstacle must be absent");
    }

    #[test]
    fn rejects_non_safe_query() {
        let scene = validate_scene(&[rect(PolygonKind::Risk, 0.0, 0.0, 1.0, 1.0)]).unwrap();
        let err = build_graph(
            &scene,
            Point::new(0.5, 0.5),
            Point::new(2.0, 0.5),
            &SamplingParams::new(1.0, 0).unwrap(),
            &CostFunction::Exp,
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::InvalidQuery { which: QueryEnd::Start, .. }));
    }

    #[test]
    fn node_classes_follow_border_sharing() {
        let scene = validate_scene(&[
            rect(PolygonKind::Risk, 0.0, 0.0, 1.0, 1.0),
            rect(PolygonKind::Obstacle, 1.0, 0.0, 2.0, 1.0),
        ])
        .unwrap();
        let g = build_graph(
            &scene,
            Point::new(-1.0, 0.5),
            Point::new(3.0, 0.5),
            &SamplingParams::new(0.5, 0).unwrap(),
            &CostFunction::Exp,
        )
        .unwrap();
        for node in g.nodes() {
            let p = node.position;
            let shared = (p.x - 1.0).abs() < 1e-12 && (0.0..=1.0).contains(&p.y);
            if shared {
                assert_eq!(node.class, RegionClass::Risk, "shared border node {p}");
            } else {
                assert_eq!(node.class, RegionClass::Safe, "unshared node {p}");
            }
        }
    }

    #[test]
    fn graph_build_is_deterministic() {
        let scene = validate_scene(&[
            rect(PolygonKind::Risk, 0.0, 0.0, 1.0, 1.0),
            rect(PolygonKind::Obstacle, 2.0, 0.0, 3.0, 1.0),
        ])
        .unwrap();
        let params = SamplingParams::new(0.3, 1).unwrap();
        let g1 = build_graph(&scene, Point::new(-1.0, 0.5), Point::new(4.0, 0.5), &params, &CostFunction::Exp).unwrap();
        let g2 = build_graph(&scene, Point::new(-1.0, 0.5), Point::new(4.0, 0.5), &params, &CostFunction::Exp).unwrap();
        assert_eq!(g1.node_count(), g2.node_count());
        assert_eq!(g1.edge_count(), g2.edge_count());
        for (n1, n2) in g1.nodes().iter().zip(g2.nodes().iter()) {
            assert_eq!(n1.position.bits(), n2.position.bits());
        }
        for (e1, e2) in g1.edges().iter().zip(g2.edges().iter()) {
            assert_eq!((e1.a, e1.b), (e2.a, e2.b));
        }
    }
}
