//! Exposure-augmented label-setting search over a [`PlanGraph`].
//!
//! Plain Dijkstra is unsound here: the cost of an edge depends on the
//! exposure carried into it, so a prefix that is cheapest by cost alone can
//! lose to a slightly dearer prefix arriving with less exposure. Labels
//! therefore carry `(cost, λ)`, and a label is discarded only when another
//! label at the same node is at least as good in *both* coordinates. That
//! dominance rule is sound because edge cost and exit exposure are both
//! monotone in entry exposure.
//!
//! Exposure only survives across a node when the node itself classifies
//! risk (a boundary point shared with an obstacle); at safe nodes λ is
//! pinned to zero, which keeps label fronts small in practice.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cost::{apply_summary, fold_events_cost, path_cost, CostError, ProfilePoint};
use crate::geometry::{Point, RegionClass};
use crate::graph::{EdgeRecord, NodeId, PlanGraph};

/// Node cap for [`exhaustive_plan`]; all simple paths are enumerated.
pub const MAX_EXHAUSTIVE_NODES: usize = 16;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("no collision-free path connects start and goal in the graph")]
    NoPath,
    #[error("graph has {nodes} nodes, exhaustive search is capped at {limit}")]
    GraphTooLarge { nodes: usize, limit: usize },
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("internal: plan result failed re-evaluation: {0}")]
    SelfCheck(String),
}

/// Search tuning knobs.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    /// When set, an existing label also dominates a candidate whose exposure
    /// is at most `tol` smaller. Trades within-graph optimality for fewer
    /// labels; off by default.
    pub lambda_dominance_tol: Option<f64>,
}

/// Search counters and timings.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchStats {
    pub nodes: usize,
    pub edges: usize,
    pub labels_created: u64,
    pub labels_expanded: u64,
    pub labels_dominated: u64,
    pub wall_time: Duration,
    pub approx_dominance: bool,
}

/// A planned path with its cost, exposure profile and search statistics.
#[derive(Clone, Debug)]
pub struct PlanResult {
    pub polyline: Vec<Point>,
    pub cost: f64,
    pub exposure_profile: Vec<ProfilePoint>,
    pub stats: SearchStats,
}

#[derive(Clone, Copy, Debug)]
struct LabelRec {
    node: NodeId,
    cost: f64,
    parent: Option<usize>,
}

/// Min-heap entry ordered by (cost, lambda, node, insertion order).
#[derive(Clone, Copy, Debug)]
struct QueueEntry {
    cost: f64,
    lambda: f64,
    node: NodeId,
    label: usize,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for QueueEntry {}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed for a min-heap on BinaryHeap.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.lambda.total_cmp(&self.lambda))
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| other.label.cmp(&self.label))
    }
}

/// Relax one edge out of `from` with entry exposure `lambda`, honoring the
/// class of the target node (safe nodes reset exposure).
fn relax(
    graph: &PlanGraph,
    edge: &EdgeRecord,
    from: NodeId,
    to: NodeId,
    lambda: f64,
) -> Result<(f64, f64), CostError> {
    let (cost, lambda_out) = if graph.cost_fn().is_exp() {
        apply_summary(edge.summary_from(from), lambda)
    } else {
        fold_events_cost(&edge.events_from(from), lambda, graph.cost_fn())?
    };
    let lambda_at_node =
        if graph.nodes()[to].class == RegionClass::Safe { 0.0 } else { lambda_out };
    Ok((cost, lambda_at_node))
}

/// Plan with default options.
pub fn plan(graph: &PlanGraph) -> Result<PlanResult, PlanError> {
    plan_with(graph, &SearchOptions::default())
}

/// Label-setting search: pops labels in cost order, settles non-dominated
/// ones, and accepts the first settled label at the goal.
pub fn plan_with(graph: &PlanGraph, options: &SearchOptions) -> Result<PlanResult, PlanError> {
    let t0 = Instant::now();
    let tol = options.lambda_dominance_tol.unwrap_or(0.0);
    let mut stats = SearchStats {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        approx_dominance: options.lambda_dominance_tol.is_some(),
        ..SearchStats::default()
    };

    let mut labels: Vec<LabelRec> = Vec::new();
    let mut settled: Vec<Vec<(f64, f64)>> = vec![Vec::new(); graph.node_count()];
    let mut queue: BinaryHeap<QueueEntry> = BinaryHeap::new();

    labels.push(LabelRec { node: graph.start(), cost: 0.0, parent: None });
    queue.push(QueueEntry { cost: 0.0, lambda: 0.0, node: graph.start(), label: 0 });
    stats.labels_created = 1;

    let dominated = |front: &[(f64, f64)], cost: f64, lambda: f64| {
        front.iter().any(|&(c, l)| c <= cost && l <= lambda + tol)
    };

    let mut goal_label: Option<usize> = None;
    let mut last_settled_cost = 0.0;
    while let Some(entry) = queue.pop() {
        if dominated(&settled[entry.node], entry.cost, entry.lambda) {
            stats.labels_dominated += 1;
            continue;
        }
        // Edge costs are strictly positive, so settling happens in
        // non-decreasing cost order.
        debug_assert!(entry.cost >= last_settled_cost);
        last_settled_cost = entry.cost;
        settled[entry.node].push((entry.cost, entry.lambda));
        stats.labels_expanded += 1;
        if entry.node == graph.goal() {
            goal_label = Some(entry.label);
            break;
        }
        for (edge, to) in graph.neighbors(entry.node) {
            let (inc, lambda_to) = match relax(graph, edge, entry.node, to, entry.lambda) {
                Ok(v) => v,
                // Exposure beyond the overflow guard can never win; drop it.
                Err(CostError::ExposureOverflow { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            let cost_to = entry.cost + inc;
            if !cost_to.is_finite() || dominated(&settled[to], cost_to, lambda_to) {
                stats.labels_dominated += 1;
                continue;
            }
            let id = labels.len();
            labels.push(LabelRec { node: to, cost: cost_to, parent: Some(entry.label) });
            queue.push(QueueEntry { cost: cost_to, lambda: lambda_to, node: to, label: id });
            stats.labels_created += 1;
        }
    }

    let Some(goal_label) = goal_label else {
        return Err(PlanError::NoPath);
    };

    let mut ids = Vec::new();
    let mut cursor = Some(goal_label);
    while let Some(i) = cursor {
        ids.push(labels[i].node);
        cursor = labels[i].parent;
    }
    ids.reverse();
    let polyline: Vec<Point> = ids.iter().map(|&n| graph.nodes()[n].position).collect();
    let cost = labels[goal_label].cost;
    stats.wall_time = t0.elapsed();
    finish(graph, polyline, cost, stats)
}

fn finish(
    graph: &PlanGraph,
    polyline: Vec<Point>,
    cost: f64,
    stats: SearchStats,
) -> Result<PlanResult, PlanError> {
    let breakdown = path_cost(graph.scene(), &polyline, graph.cost_fn())
        .map_err(|e| PlanError::SelfCheck(e.to_string()))?;
    debug_assert!(
        (breakdown.total - cost).abs() <= 1e-9 * cost.abs().max(1.0),
        "label cost {cost} vs re-evaluated {}",
        breakdown.total
    );
    Ok(PlanResult { polyline, cost, exposure_profile: breakdown.exposure_profile, stats })
}

/// Brute-force oracle: enumerate every simple start→goal path and fold each
/// one. Ties break toward fewer vertices, then lexicographic node ids.
/// Capped at [`MAX_EXHAUSTIVE_NODES`] nodes.
pub fn exhaustive_plan(graph: &PlanGraph) -> Result<PlanResult, PlanError> {
    let t0 = Instant::now();
    let n = graph.node_count();
    if n > MAX_EXHAUSTIVE_NODES {
        return Err(PlanError::GraphTooLarge { nodes: n, limit: MAX_EXHAUSTIVE_NODES });
    }
    let mut stats = SearchStats {
        nodes: n,
        edges: graph.edge_count(),
        ..SearchStats::default()
    };

    struct Best {
        cost: f64,
        path: Vec<NodeId>,
    }
    let mut best: Option<Best> = None;
    let mut path: Vec<NodeId> = vec![graph.start()];
    let mut visited: u32 = 1 << graph.start();

    // Depth-first enumeration with explicit recursion.
    fn recurse(
        graph: &PlanGraph,
        path: &mut Vec<NodeId>,
        visited: &mut u32,
        cost: f64,
        lambda: f64,
        best: &mut Option<Best>,
        stats: &mut SearchStats,
    ) -> Result<(), PlanError> {
        let here = *path.last().expect("path never empty");
        if here == graph.goal() {
            stats.labels_created += 1;
            let better = match best {
                None => true,
                Some(b) => {
                    cost < b.cost
                        || (cost == b.cost
                            && (path.len() < b.path.len()
                                || (path.len() == b.path.len() && path.as_slice() < b.path.as_slice())))
                }
            };
            if better {
                *best = Some(Best { cost, path: path.clone() });
            }
            return Ok(());
        }
        for (edge, to) in graph.neighbors(here) {
            if *visited & (1 << to) != 0 {
                continue;
            }
            stats.labels_expanded += 1;
            let (inc, lambda_to) = match relax(graph, edge, here, to, lambda) {
                Ok(v) => v,
                Err(CostError::ExposureOverflow { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            path.push(to);
            *visited |= 1 << to;
            recurse(graph, path, visited, cost + inc, lambda_to, best, stats)?;
            *visited &= !(1 << to);
            path.pop();
        }
        Ok(())
    }

    recurse(graph, &mut path, &mut visited, 0.0, 0.0, &mut best, &mut stats)?;
    let Some(best) = best else {
        return Err(PlanError::NoPath);
    };
    let polyline: Vec<Point> = best.path.iter().map(|&v| graph.nodes()[v].position).collect();
    stats.wall_time = t0.elapsed();
    finish(graph, polyline, best.cost, stats)
}
