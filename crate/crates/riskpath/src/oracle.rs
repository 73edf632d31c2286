//! Independent brute-force approximation on a position × exposure grid.
//!
//! The oracle discretizes the plane into square cells and the exposure axis
//! into multiples of `lambda_step`, then runs Dijkstra over the product
//! states with 8-connected moves. It shares only the primitive cost formula
//! with the planner — no visibility graph, no summaries, no label dominance —
//! which makes it a useful band check on planner output.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

use crate::cost::{risk_run_cost, CostError, CostFunction, EXPOSURE_LIMIT};
use crate::geometry::{classify_point, Point, RegionClass, Scene};

/// Hard cap on discovered grid states.
pub const STATE_BUDGET: usize = 100_000_000;

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

/// Grid discretization parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridParams {
    /// Cell size.
    pub h: f64,
    /// Exposure quantum.
    pub lambda_step: f64,
    /// Rectangle enclosing the scene and both query points, margin ≥ h.
    pub bounds: Rect,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("grid parameters must be positive and finite (h={h}, lambda_step={lambda_step})")]
    InvalidParams { h: f64, lambda_step: f64 },
    #[error("{which} point {point} classifies {class:?}; queries must be safe")]
    InvalidQuery { which: &'static str, point: Point, class: RegionClass },
    #[error("state budget exceeded: more than {budget} grid states discovered")]
    StateBudgetExceeded { budget: usize },
    #[error("no grid path connects start and goal")]
    NoPath,
    #[error(transparent)]
    Cost(#[from] CostError),
}

impl GridParams {
    /// Bounds covering the scene and both query points with a margin of 3h,
    /// with the lattice aligned so the start point sits exactly on a cell
    /// center. Alignment keeps cell centers on `start + ℤ·h`, so halving `h`
    /// nests the centers and refinement trends monotone.
    pub fn for_query(
        scene: &Scene,
        start: Point,
        goal: Point,
        h: f64,
        lambda_step: f64,
    ) -> Result<Self, OracleError> {
        if !(h > 0.0 && h.is_finite() && lambda_step > 0.0 && lambda_step.is_finite()) {
            return Err(OracleError::InvalidParams { h, lambda_step });
        }
        let (mut min, mut max) = match scene.bounds() {
            Some((lo, hi)) => (lo, hi),
            None => (start, start),
        };
        for p in [start, goal] {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        let margin = 3.0 * h;
        let snap = |s: f64, raw_min: f64| {
            let cells_below = ((s - (raw_min - margin)) / h - 0.5).ceil().max(0.0);
            s - (cells_below + 0.5) * h
        };
        let bounds = Rect {
            min: Point::new(snap(start.x, min.x), snap(start.y, min.y)),
            max: Point::new(max.x + margin, max.y + margin),
        };
        Ok(GridParams { h, lambda_step, bounds })
    }
}

/// Result of a grid search: cost and the cell-center polyline realizing it.
#[derive(Clone, Debug)]
pub struct GridPlan {
    pub cost: f64,
    pub polyline: Vec<Point>,
    /// States discovered during the search.
    pub states: usize,
}

struct Grid {
    cols: usize,
    rows: usize,
    origin: Point,
    h: f64,
    /// Region class on the half-step lattice: entry `(a, b)` is the point
    /// `origin + (a·h/2, b·h/2)`; cell center `(i, j)` sits at `(2i+1, 2j+1)`.
    classes: Vec<RegionClass>,
}

impl Grid {
    fn build(scene: &Scene, params: &GridParams) -> Grid {
        let w = params.bounds.max.x - params.bounds.min.x;
        let hgt = params.bounds.max.y - params.bounds.min.y;
        let cols = (w / params.h).ceil().max(1.0) as usize;
        let rows = (hgt / params.h).ceil().max(1.0) as usize;
        let lat_cols = 2 * cols + 1;
        let lat_rows = 2 * rows + 1;
        let mut classes = Vec::with_capacity(lat_cols * lat_rows);
        for b in 0..lat_rows {
            for a in 0..lat_cols {
                let p = Point::new(
                    params.bounds.min.x + 0.5 * params.h * a as f64,
                    params.bounds.min.y + 0.5 * params.h * b as f64,
                );
                classes.push(classify_point(scene, p));
            }
        }
        Grid { cols, rows, origin: params.bounds.min, h: params.h, classes }
    }

    fn lattice(&self, a: usize, b: usize) -> RegionClass {
        self.classes[b * (2 * self.cols + 1) + a]
    }

    fn center(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + (i as f64 + 0.5) * self.h,
            self.origin.y + (j as f64 + 0.5) * self.h,
        )
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let i = ((p.x - self.origin.x) / self.h).floor().clamp(0.0, (self.cols - 1) as f64);
        let j = ((p.y - self.origin.y) / self.h).floor().clamp(0.0, (self.rows - 1) as f64);
        (i as usize, j as usize)
    }
}

#[derive(Clone, Copy, Debug)]
struct HeapEntry {
    cost: f64,
    key: u64,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.key.cmp(&self.key))
    }
}

const fn state_key(cell: u32, k: u32) -> u64 {
    ((cell as u64) << 32) | k as u64
}

/// Brute-force shortest path on the product grid.
///
/// Moves are 8-connected. A move is classified by its two endpoints plus its
/// midpoint: it is excluded if any of the three is forbidden, and priced as
/// risk if any of the three is risk. Arriving at a safe cell center resets
/// the exposure level to zero; arriving at a risk one adds
/// `round(move length / lambda_step)` levels.
pub fn grid_plan(
    scene: &Scene,
    start: Point,
    goal: Point,
    params: &GridParams,
    f: &CostFunction,
) -> Result<GridPlan, OracleError> {
    if !(params.h > 0.0 && params.h.is_finite())
        || !(params.lambda_step > 0.0 && params.lambda_step.is_finite())
    {
        return Err(OracleError::InvalidParams { h: params.h, lambda_step: params.lambda_step });
    }
    for (which, p) in [("start", start), ("goal", goal)] {
        let class = classify_point(scene, p);
        if class != RegionClass::Safe {
            return Err(OracleError::InvalidQuery { which, point: p, class });
        }
    }

    let grid = Grid::build(scene, params);
    let start_cell = grid.cell_of(start);
    let goal_cell = grid.cell_of(goal);
    let goal_cell_id = (goal_cell.1 * grid.cols + goal_cell.0) as u32;

    let straight = params.h;
    let diagonal = params.h * std::f64::consts::SQRT_2;
    let dk_straight = (straight / params.lambda_step).round().max(0.0) as u32;
    let dk_diagonal = (diagonal / params.lambda_step).round().max(0.0) as u32;
    let k_cap = (EXPOSURE_LIMIT / params.lambda_step).floor() as u32;

    let mut dist: HashMap<u64, f64> = HashMap::new();
    let mut parent: HashMap<u64, u64> = HashMap::new();
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();

    let start_key = state_key((start_cell.1 * grid.cols + start_cell.0) as u32, 0);
    dist.insert(start_key, 0.0);
    heap.push(HeapEntry { cost: 0.0, key: start_key });

    let moves: [(i64, i64); 8] =
        [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

    while let Some(entry) = heap.pop() {
        let d = match dist.get(&entry.key) {
            Some(&d) if entry.cost <= d => d,
            _ => continue,
        };
        let cell = (entry.key >> 32) as u32;
        let k = (entry.key & 0xffff_ffff) as u32;
        if cell == goal_cell_id {
            // Dijkstra settles in cost order, so the first goal-cell state
            // is the best over all exposure levels.
            let mut cells = Vec::new();
            let mut cursor = Some(entry.key);
            while let Some(key) = cursor {
                let c = (key >> 32) as u32;
                cells.push(grid.center((c as usize) % grid.cols, (c as usize) / grid.cols));
                cursor = parent.get(&key).copied();
            }
            cells.reverse();
            return Ok(GridPlan { cost: d, polyline: cells, states: dist.len() });
        }

        let (i, j) = ((cell as usize) % grid.cols, (cell as usize) / grid.cols);
        for (di, dj) in moves {
            let (ni, nj) = (i as i64 + di, j as i64 + dj);
            if ni < 0 || nj < 0 || ni >= grid.cols as i64 || nj >= grid.rows as i64 {
                continue;
            }
            let (ni, nj) = (ni as usize, nj as usize);
            // Lattice coordinates of source center, midpoint, target center.
            let (sa, sb) = (2 * i + 1, 2 * j + 1);
            let (ta, tb) = (2 * ni + 1, 2 * nj + 1);
            let (ma, mb) = ((sa + ta) / 2, (sb + tb) / 2);
            let trio = [grid.lattice(sa, sb), grid.lattice(ma, mb), grid.lattice(ta, tb)];
            if trio.contains(&RegionClass::Forbidden) {
                continue;
            }
            let length = if di != 0 && dj != 0 { diagonal } else { straight };
            let risky = trio.contains(&RegionClass::Risk);
            let (cost_inc, nk) = if risky {
                let lambda0 = k as f64 * params.lambda_step;
                let inc = match risk_run_cost(lambda0, length, f) {
                    Ok(c) => c,
                    Err(CostError::ExposureOverflow { .. }) => continue,
                    Err(e) => return Err(e.into()),
                };
                let target_safe = trio[2] == RegionClass::Safe;
                let dk = if di != 0 && dj != 0 { dk_diagonal } else { dk_straight };
                let nk = if target_safe { 0 } else { k.saturating_add(dk) };
                (inc, nk)
            } else {
                (length, 0)
            };
            if nk > k_cap {
                continue;
            }
            let nd = d + cost_inc;
            if !nd.is_finite() {
                continue;
            }
            let nkey = state_key((nj * grid.cols + ni) as u32, nk);
            match dist.get(&nkey) {
                Some(&old) if old <= nd => {}
                _ => {
                    if dist.len() >= STATE_BUDGET {
                        return Err(OracleError::StateBudgetExceeded { budget: STATE_BUDGET });
                    }
                    dist.insert(nkey, nd);
                    parent.insert(nkey, entry.key);
                    heap.push(HeapEntry { cost: nd, key: nkey });
                }
            }
        }
    }
    Err(OracleError::NoPath)
}
