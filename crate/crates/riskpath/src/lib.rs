//! Risk-aware shortest paths in the plane.
//!
//! Scenes are sets of simple polygons tagged *obstacle* (impassable) or
//! *risk* (passable but penalized). A path pays its Euclidean length in safe
//! territory; inside a risk region the per-unit price is `e^λ`, where `λ` is
//! the time since the path last touched a safe point. Long uninterrupted
//! dives into risk are therefore exponentially more expensive than the same
//! distance broken up by safe touches, and the cheapest paths tend to graze
//! region boundaries instead of cutting straight through.
//!
//! The planner approximates the continuous optimum by sampling points
//! densely along risk-region boundaries, building a visibility graph over
//! the samples, polygon vertices and query endpoints, and running an
//! exposure-augmented label search over it. A product-grid brute-force
//! oracle ([`oracle::grid_plan`]) provides an independent check.
//!
//! See the guide under [`guide`] for worked examples, or `book/` in the
//! repository for the rendered version.

pub mod cli;
pub mod cost;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod search;

pub use cost::{
    apply_summary, fold_polyline, path_cost, risk_run_cost, summarize_edge, CostError,
    CostFunction, EdgeSummary, PathCostBreakdown, ProfilePoint,
};
pub use graph::{build_graph, sample_boundary, BuildError, PlanGraph, SamplingParams};
pub use oracle::{grid_plan, GridParams, OracleError};
pub use search::{exhaustive_plan, plan, plan_with, PlanError, PlanResult, SearchOptions};

pub use geometry::{
    classify_point, partition_segment, segment_visible, validate_scene, ClassifiedPolyline,
    GeometryError, Point, Polygon, PolygonKind, PolygonSpec, RegionClass, RunClass, Scene,
    SceneError, SceneWarning, SegmentEvent,
};

/// The narrative guide. Each chapter of `book/` is included here verbatim,
/// so its code blocks compile and run under `cargo test --doc` and the book
/// can never drift from the API.
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/scenes.md")]
    pub mod scenes {}
    #[doc = include_str!("../../../book/src/exposure-cost.md")]
    pub mod exposure_cost {}
    #[doc = include_str!("../../../book/src/planning-graph.md")]
    pub mod planning_graph {}
    #[doc = include_str!("../../../book/src/label-search.md")]
    pub mod label_search {}
    #[doc = include_str!("../../../book/src/grid-oracle.md")]
    pub mod grid_oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli_reference {}
}
