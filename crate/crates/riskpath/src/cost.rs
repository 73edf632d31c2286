//! Exposure-time semantics and the traversal cost functional.
//!
//! The exposure `λ` at a point of a path is the distance travelled since the
//! path last touched a safe point (speed is constant, so time and arc length
//! coincide). The cost of a path is `∫ f(λ(s)) ds` with `f(0) = 1`, so safe
//! travel costs exactly its length. The default `f(x) = eˣ` admits closed
//! forms throughout: a risk run of length `L` entered at exposure `λ₀` costs
//! `e^{λ₀}(e^L − 1)`, and a whole edge collapses into an [`EdgeSummary`]
//! mapping entry exposure to (cost, exit exposure) in O(1).
//!
//! Generic cost functions are integrated by adaptive Simpson quadrature and
//! forgo edge summaries; correctness over speed.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{
    classify_point, partition_segment, GeometryError, Point, RegionClass, RunClass, Scene,
    SegmentEvent,
};

/// Default relative tolerance for quadrature of generic cost functions.
pub const QUADRATURE_REL_TOL: f64 = 1e-8;
/// Subinterval budget for adaptive quadrature.
pub const QUADRATURE_MAX_INTERVALS: u64 = 1 << 20;
/// Exposures and run lengths above this overflow `e^x` in double precision.
pub const EXPOSURE_LIMIT: f64 = 700.0;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CostError {
    #[error("quadrature did not reach tolerance {tolerance} within {budget} subintervals")]
    NonconvergentQuadrature { tolerance: f64, budget: u64 },
    #[error("exposure or run length {value} exceeds the overflow guard {limit}")]
    ExposureOverflow { value: f64, limit: f64 },
    #[error("cost function must satisfy f(0) = 1, got {at_zero}")]
    InvalidCostFunction { at_zero: f64 },
    #[error("polyline needs at least 2 distinct vertices")]
    DegeneratePolyline,
}

/// The per-unit price of travel as a function of current exposure.
///
/// Callers must supply an `f` that is superlinear in the limit and satisfies
/// `f(0) = 1`; only the latter is machine-checked. `f` should also be
/// non-decreasing and ≥ 1 — label-search dominance relies on it.
#[derive(Clone)]
pub enum CostFunction {
    /// `f(x) = eˣ`. Closed-form integration, enables edge summaries.
    Exp,
    /// Arbitrary `f`, integrated numerically to `rel_tol`.
    Generic {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        rel_tol: f64,
    },
}

impl CostFunction {
    pub fn exp() -> Self {
        CostFunction::Exp
    }

    /// Wrap a generic cost function, checking `f(0) = 1` within 1e-12.
    pub fn generic(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        rel_tol: f64,
    ) -> Result<Self, CostError> {
        let at_zero = f(0.0);
        if (at_zero - 1.0).abs() > 1e-12 {
            return Err(CostError::InvalidCostFunction { at_zero });
        }
        Ok(CostFunction::Generic { f: Arc::new(f), rel_tol })
    }

    pub fn is_exp(&self) -> bool {
        matches!(self, CostFunction::Exp)
    }
}

impl fmt::Debug for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostFunction::Exp => write!(f, "Exp"),
            CostFunction::Generic { rel_tol, .. } => {
                write!(f, "Generic {{ rel_tol: {rel_tol} }}")
            }
        }
    }
}

/// Cost of a risk run of length `length` entered at exposure `lambda0`.
///
/// Exponential cost uses the closed form `e^{λ₀}(e^L − 1)`; generic cost
/// integrates `∫₀^L f(λ₀ + s) ds` by adaptive Simpson.
pub fn risk_run_cost(lambda0: f64, length: f64, f: &CostFunction) -> Result<f64, CostError> {
    debug_assert!(lambda0 >= 0.0 && length >= 0.0);
    for value in [lambda0, length] {
        if value > EXPOSURE_LIMIT {
            return Err(CostError::ExposureOverflow { value, limit: EXPOSURE_LIMIT });
        }
    }
    match f {
        CostFunction::Exp => Ok(lambda0.exp() * length.exp_m1()),
        CostFunction::Generic { f, rel_tol } => {
            adaptive_simpson(|s| f(lambda0 + s), 0.0, length, *rel_tol)
        }
    }
}

/// Adaptive composite Simpson with Richardson correction.
fn adaptive_simpson(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<f64, CostError> {
    if b <= a {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0;
    // Convert the relative tolerance into an absolute one using a coarse
    // magnitude estimate; the integrand is strictly positive for valid f.
    let eps = rel_tol * whole.abs().max(f64::MIN_POSITIVE);
    let mut budget = QUADRATURE_MAX_INTERVALS;
    let value = simpson_step(&f, a, b, fa, fm, fb, whole, eps, &mut budget);
    match value {
        Some(v) => Ok(v),
        None => Err(CostError::NonconvergentQuadrature {
            tolerance: rel_tol,
            budget: QUADRATURE_MAX_INTERVALS,
        }),
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    budget: &mut u64,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    let right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps || m == a || m == b {
        return Some(left + right + delta / 15.0);
    }
    if *budget < 2 {
        return None;
    }
    *budget -= 2;
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, budget)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, budget)?;
    Some(l + r)
}

/// Closed-form description of one visibility edge under exponential cost:
/// entry exposure maps to traversal cost and exit exposure in O(1).
///
/// `cost(λ) = e^λ (e^{r_pre} − 1) + c_mid`; exit exposure is `λ + length`
/// without a reset, `r_suf` with one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeSummary {
    /// Total edge length.
    pub length: f64,
    /// Whether the edge contains any safe point (a reset).
    pub has_reset: bool,
    /// Risk run length before the first safe point.
    pub r_pre: f64,
    /// Cost of everything after the first reset, entered at exposure 0.
    pub c_mid: f64,
    /// Trailing risk run length after the last reset.
    pub r_suf: f64,
}

/// Collapse a classified segment into an [`EdgeSummary`] (exponential cost
/// only). `apply_summary(summarize_edge(cpl), λ)` reproduces
/// `fold_polyline(cpl, λ, Exp)` for every λ ≥ 0.
pub fn summarize_edge(cpl: &crate::geometry::ClassifiedPolyline) -> EdgeSummary {
    let events = &cpl.events;
    let length: f64 = events.iter().map(|e| e.length()).sum();

    let r_pre = match events.first() {
        Some(SegmentEvent::Run { class: RunClass::Risk, length, .. }) => *length,
        _ => 0.0,
    };
    let has_reset = events.iter().any(|e| match e {
        SegmentEvent::Run { class, .. } => *class == RunClass::Safe,
        SegmentEvent::SafeTouch { .. } => true,
    });
    if !has_reset {
        // A single risk run spans the whole edge.
        return EdgeSummary { length, has_reset: false, r_pre: length, c_mid: 0.0, r_suf: length };
    }

    // Everything after the first reset, folded from exposure 0.
    let first_reset = events
        .iter()
        .position(|e| match e {
            SegmentEvent::Run { class, .. } => *class == RunClass::Safe,
            SegmentEvent::SafeTouch { .. } => true,
        })
        .expect("has_reset implies a resetting event");
    let mut lambda: f64 = 0.0;
    let mut c_mid = 0.0;
    for e in &events[first_reset..] {
        match e {
            SegmentEvent::Run { class: RunClass::Safe, length, .. } => {
                lambda = 0.0;
                c_mid += length;
            }
            SegmentEvent::Run { class: RunClass::Risk, length, .. } => {
                c_mid += lambda.exp() * length.exp_m1();
                lambda += length;
            }
            SegmentEvent::SafeTouch { .. } => lambda = 0.0,
        }
    }
    let r_suf = match events.last() {
        Some(SegmentEvent::Run { class: RunClass::Risk, length, .. }) => *length,
        _ => 0.0,
    };
    EdgeSummary { length, has_reset: true, r_pre, c_mid, r_suf }
}

/// Evaluate an [`EdgeSummary`] at a given entry exposure.
pub fn apply_summary(summary: &EdgeSummary, lambda_in: f64) -> (f64, f64) {
    debug_assert!(lambda_in >= 0.0);
    let cost = lambda_in.exp() * summary.r_pre.exp_m1() + summary.c_mid;
    let lambda_out = if summary.has_reset { summary.r_suf } else { lambda_in + summary.length };
    (cost, lambda_out)
}

/// One vertex of an exposure profile: arc-length position and exposure.
/// Resets appear as two points at the same position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    pub position: f64,
    pub lambda: f64,
}

/// Cost of a path, itemized per event, with the exposure profile along it.
#[derive(Clone, Debug, Default)]
pub struct PathCostBreakdown {
    pub total: f64,
    pub per_event: Vec<(SegmentEvent, f64)>,
    pub exposure_profile: Vec<ProfilePoint>,
}

/// Result of folding events with a carried entry exposure.
#[derive(Clone, Debug)]
pub struct FoldOutcome {
    pub cost: f64,
    pub lambda_out: f64,
    pub breakdown: PathCostBreakdown,
}

/// Fold a classified segment: safe runs cost their length and reset exposure,
/// risk runs cost [`risk_run_cost`] and accumulate it, safe touches reset it
/// for free.
pub fn fold_polyline(
    cpl: &crate::geometry::ClassifiedPolyline,
    lambda_in: f64,
    f: &CostFunction,
) -> Result<FoldOutcome, CostError> {
    fold_events(&cpl.events, lambda_in, f)
}

pub(crate) fn fold_events(
    events: &[SegmentEvent],
    lambda_in: f64,
    f: &CostFunction,
) -> Result<FoldOutcome, CostError> {
    let mut lambda = lambda_in;
    let mut position = 0.0;
    let mut breakdown = PathCostBreakdown {
        total: 0.0,
        per_event: Vec::with_capacity(events.len()),
        exposure_profile: vec![ProfilePoint { position: 0.0, lambda: lambda_in }],
    };
    for event in events {
        let contribution = match event {
            SegmentEvent::Run { class: RunClass::Safe, length, .. } => {
                if lambda != 0.0 {
                    breakdown.exposure_profile.push(ProfilePoint { position, lambda: 0.0 });
                }
                lambda = 0.0;
                position += length;
                breakdown.exposure_profile.push(ProfilePoint { position, lambda: 0.0 });
                *length
            }
            SegmentEvent::Run { class: RunClass::Risk, length, .. } => {
                let cost = risk_run_cost(lambda, *length, f)?;
                lambda += length;
                position += length;
                breakdown.exposure_profile.push(ProfilePoint { position, lambda });
                cost
            }
            SegmentEvent::SafeTouch { .. } => {
                if lambda != 0.0 {
                    breakdown.exposure_profile.push(ProfilePoint { position, lambda: 0.0 });
                }
                lambda = 0.0;
                0.0
            }
        };
        breakdown.total += contribution;
        breakdown.per_event.push((event.clone(), contribution));
    }
    Ok(FoldOutcome { cost: breakdown.total, lambda_out: lambda, breakdown })
}

/// Fast fold without breakdown allocation, for search inner loops.
pub(crate) fn fold_events_cost(
    events: &[SegmentEvent],
    lambda_in: f64,
    f: &CostFunction,
) -> Result<(f64, f64), CostError> {
    let mut lambda = lambda_in;
    let mut cost = 0.0;
    for event in events {
        match event {
            SegmentEvent::Run { class: RunClass::Safe, length, .. } => {
                lambda = 0.0;
                cost += length;
            }
            SegmentEvent::Run { class: RunClass::Risk, length, .. } => {
                cost += risk_run_cost(lambda, *length, f)?;
                lambda += length;
            }
            SegmentEvent::SafeTouch { .. } => lambda = 0.0,
        }
    }
    Ok((cost, lambda))
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum PathCostError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Cost(#[from] CostError),
}

/// Evaluate the cost of a polyline against a scene.
///
/// Consecutive segments are partitioned and folded with carried exposure: a
/// polyline vertex classified safe resets exposure, a risk-classified vertex
/// carries it through.
pub fn path_cost(
    scene: &Scene,
    polyline: &[Point],
    f: &CostFunction,
) -> Result<PathCostBreakdown, PathCostError> {
    let mut distinct = false;
    for w in polyline.windows(2) {
        if w[0] != w[1] {
            distinct = true;
        }
    }
    if !distinct {
        return Err(PathCostError::Cost(CostError::DegeneratePolyline));
    }

    let mut lambda = 0.0;
    let mut offset = 0.0;
    let mut out = PathCostBreakdown {
        total: 0.0,
        per_event: Vec::new(),
        exposure_profile: vec![ProfilePoint { position: 0.0, lambda: 0.0 }],
    };
    for i in 0..polyline.len() - 1 {
        let (a, b) = (polyline[i], polyline[i + 1]);
        if a == b {
            continue;
        }
        let cpl = partition_segment(scene, a, b)?;
        let folded = fold_events(&cpl.events, lambda, f)?;
        out.total += folded.cost;
        out.per_event.extend(folded.breakdown.per_event);
        // Skip the fold's leading profile point; it repeats our tail.
        for p in &folded.breakdown.exposure_profile[1..] {
            out.exposure_profile.push(ProfilePoint { position: offset + p.position, lambda: p.lambda });
        }
        offset += cpl.length();
        lambda = folded.lambda_out;
        // Exposure at the joint vertex follows that vertex's class.
        if i + 2 < polyline.len()
            && lambda != 0.0
            && classify_point(scene, b) == RegionClass::Safe
        {
            lambda = 0.0;
            out.exposure_profile.push(ProfilePoint { position: offset, lambda: 0.0 });
        }
    }
    Ok(out)
}
