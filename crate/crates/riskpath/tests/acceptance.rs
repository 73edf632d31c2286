//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines and timings.

mod common;

use std::time::Instant;

use common::rational::classify_rational;
use common::{rel_close, rng, standard_scenes, STRIP};

use rand::Rng;
use riskpath::cost::{fold_polyline, path_cost, risk_run_cost, summarize_edge, CostFunction};
use riskpath::geometry::{
    classify_point, partition_segment, validate_scene, Point, PolygonKind, PolygonSpec,
    RegionClass, Scene,
};
use riskpath::graph::{build_graph, SamplingParams};
use riskpath::io;
use riskpath::oracle::{grid_plan, GridParams};
use riskpath::search::{exhaustive_plan, plan};
use riskpath::{apply_summary, EdgeSummary};

const E: f64 = std::f64::consts::E;

fn pass(n: u32, name: &str, t0: Instant) {
    println!("acceptance {n} ({name}): PASS ({:.2?})", t0.elapsed());
}

fn exp_params(delta: f64, level: u32) -> SamplingParams {
    SamplingParams::new(delta, level).unwrap()
}

/// 1. Obstacle-free, risk-free queries return the straight segment at
///    Euclidean cost.
#[test]
fn acceptance_01_safe_path_identity() {
    let t0 = Instant::now();
    let scene = Scene::empty();
    let mut rng = rng(0x5afe);
    for _ in 0..50 {
        let s = Point::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let g = Point::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        if s == g {
            continue;
        }
        let graph =
            build_graph(&scene, s, g, &SamplingParams::for_scene(&scene), &CostFunction::Exp)
                .unwrap();
        let result = plan(&graph).unwrap();
        assert_eq!(result.polyline.len(), 2);
        assert!(rel_close(result.cost, s.distance(g), 1e-9), "cost {} vs {}", result.cost, s.distance(g));
    }
    assert!(t0.elapsed().as_secs_f64() < 1.0, "runtime bound 1 s exceeded");
    pass(1, "safe-path identity", t0);
}

/// 2. The straight strip crossing costs e: exactly via the closed form and
///    within 1e-6 via generic quadrature with f = exp.
#[test]
fn acceptance_02_analytic_strip_crossing() {
    let t0 = Instant::now();
    let (_, loaded) = io::load_scene(STRIP).unwrap();
    let polyline = [loaded.start.unwrap(), loaded.goal.unwrap()];

    let closed = path_cost(&loaded.scene, &polyline, &CostFunction::Exp).unwrap();
    assert!(rel_close(closed.total, E, 1e-9), "closed form {} vs e", closed.total);

    let quad = CostFunction::generic(|x| x.exp(), 1e-8).unwrap();
    let numeric = path_cost(&loaded.scene, &polyline, &quad).unwrap();
    assert!(rel_close(numeric.total, E, 1e-6), "quadrature {} vs e", numeric.total);

    assert!(t0.elapsed().as_secs_f64() < 1.0, "runtime bound 1 s exceeded");
    pass(2, "analytic strip crossing", t0);
}

/// 3. Grazing beats crossing on the corridor scene.
#[test]
fn acceptance_03_grazing_beats_crossing() {
    let t0 = Instant::now();
    let scene = validate_scene(&[PolygonSpec::new(
        PolygonKind::Risk,
        vec![Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(4.0, 1.0), Point::new(0.0, 1.0)],
    )])
    .unwrap();
    let graph = build_graph(
        &scene,
        Point::new(-0.5, 0.5),
        Point::new(4.5, 0.5),
        &exp_params(0.25, 0),
        &CostFunction::Exp,
    )
    .unwrap();
    let result = plan(&graph).unwrap();
    let grazing_bound = 5.4143;
    let straight_through = 1.0 + 4f64.exp_m1();
    assert!(result.cost <= grazing_bound + 1e-6, "cost {} above grazing bound", result.cost);
    assert!(result.cost < 0.1 * straight_through, "cost {} not well below {}", result.cost, straight_through);
    assert!(t0.elapsed().as_secs_f64() < 5.0, "runtime bound 5 s exceeded");
    pass(3, "grazing beats crossing", t0);
}

/// 4. Split exposure: a mid-crossing safe sliver halves the exposure runs
///    and wins, as a planner outcome, for L in {0.5, 1, 2}.
#[test]
fn acceptance_04_split_exposure_inequality() {
    let t0 = Instant::now();
    for &half in &[0.5f64, 1.0, 2.0] {
        let full = 2.0 * half;
        let walls = |specs: &mut Vec<PolygonSpec>| {
            specs.push(common::rect_spec(PolygonKind::Obstacle, -100.0, 1.0, full + 100.0, 2.0));
            specs.push(common::rect_spec(PolygonKind::Obstacle, -100.0, -1.0, full + 100.0, 0.0));
        };
        let s = Point::new(-0.5, 0.5);
        let g = Point::new(full + 0.5, 0.5);
        let params = exp_params(10.0, 0);

        // Split crossing: two risk slabs sharing the border x = half, which
        // is a safe sliver by the region definitions.
        let mut split = vec![
            common::rect_spec(PolygonKind::Risk, 0.0, 0.0, half, 1.0),
            common::rect_spec(PolygonKind::Risk, half, 0.0, full, 1.0),
        ];
        walls(&mut split);
        let split_scene = validate_scene(&split).unwrap();
        let split_cost =
            plan(&build_graph(&split_scene, s, g, &params, &CostFunction::Exp).unwrap())
                .unwrap()
                .cost;

        // Unbroken crossing: one slab, no sliver.
        let mut unbroken = vec![common::rect_spec(PolygonKind::Risk, 0.0, 0.0, full, 1.0)];
        walls(&mut unbroken);
        let unbroken_scene = validate_scene(&unbroken).unwrap();
        let unbroken_cost =
            plan(&build_graph(&unbroken_scene, s, g, &params, &CostFunction::Exp).unwrap())
                .unwrap()
                .cost;

        let split_expected = 1.0 + 2.0 * half.exp_m1();
        let unbroken_expected = full.exp();
        assert!(
            rel_close(split_cost, split_expected, 1e-9),
            "L={half}: split cost {split_cost} vs {split_expected}"
        );
        assert!(
            rel_close(unbroken_cost, unbroken_expected, 1e-9),
            "L={half}: unbroken cost {unbroken_cost} vs {unbroken_expected}"
        );
        assert!(split_cost < unbroken_cost, "L={half}: split not chosen");
    }
    assert!(t0.elapsed().as_secs_f64() < 5.0, "runtime bound 5 s exceeded");
    pass(4, "split-exposure inequality", t0);
}

/// 5. On small graphs the label search matches exhaustive enumeration
///    exactly.
#[test]
fn acceptance_05_oracle_equivalence_small_graphs() {
    let t0 = Instant::now();
    let mut rng = rng(0xd15c0);
    let params = exp_params(100.0, 0);
    let mut checked = 0;
    while checked < 100 {
        let scene = common::random_scene(&mut rng, 2);
        let s = common::random_safe_point(&mut rng, &scene);
        let g = common::random_safe_point(&mut rng, &scene);
        if s == g {
            continue;
        }
        let Ok(graph) = build_graph(&scene, s, g, &params, &CostFunction::Exp) else {
            continue;
        };
        if graph.node_count() > 12 {
            continue;
        }
        // Exhaustive enumeration covers simple paths; restrict to scenes
        // whose nodes all reset exposure so revisiting a node can never pay
        // off and the two searches optimize over the same path set.
        if graph.nodes().iter().any(|n| n.class != RegionClass::Safe) {
            continue;
        }
        let fast = plan(&graph).unwrap();
        let brute = exhaustive_plan(&graph).unwrap();
        assert_eq!(
            fast.cost, brute.cost,
            "seeded scene {checked}: plan {} vs exhaustive {}",
            fast.cost, brute.cost
        );
        checked += 1;
    }
    assert!(t0.elapsed().as_secs_f64() < 60.0, "runtime bound 60 s exceeded");
    pass(5, "oracle equivalence on small graphs", t0);
}

/// 6. Planner and continuous grid oracle agree within 10% on the standard
///    scene suite.
#[test]
fn acceptance_06_oracle_agreement_continuous() {
    let t0 = Instant::now();
    for (name, scene, s, g) in standard_scenes() {
        let diameter = scene.diameter();
        let h = diameter / 200.0;
        let delta = diameter / 128.0;
        let graph = build_graph(&scene, s, g, &exp_params(delta, 0), &CostFunction::Exp).unwrap();
        let planned = plan(&graph).unwrap().cost;
        let grid_params = GridParams::for_query(&scene, s, g, h, h).unwrap();
        let gridded = grid_plan(&scene, s, g, &grid_params, &CostFunction::Exp).unwrap().cost;
        let band = 0.1 * planned.max(gridded);
        assert!(
            (planned - gridded).abs() <= band,
            "{name}: plan {planned} vs grid {gridded} exceeds 10% band"
        );
    }
    assert!(t0.elapsed().as_secs_f64() < 120.0, "runtime bound 120 s exceeded");
    pass(6, "continuous oracle agreement", t0);
}

/// 7. Refinement monotonicity: dyadic levels nest, so the cost column of a
///    convergence study never increases.
#[test]
fn acceptance_07_refinement_monotonicity() {
    let t0 = Instant::now();
    for (name, scene, s, g) in standard_scenes() {
        let base = exp_params(scene.diameter() / 8.0, 0);
        let rows =
            riskpath::cli::converge(&scene, s, g, &base, 5, &CostFunction::Exp).unwrap();
        assert_eq!(rows.len(), 5);
        for w in rows.windows(2) {
            assert!(
                w[1].cost <= w[0].cost + 1e-12,
                "{name}: level {} cost {} above level {} cost {}",
                w[1].level,
                w[1].cost,
                w[0].level,
                w[0].cost
            );
        }
    }
    assert!(t0.elapsed().as_secs_f64() < 120.0, "runtime bound 120 s exceeded");
    pass(7, "refinement monotonicity", t0);
}

/// 8. Edge summaries reproduce the event fold for random segments and entry
///    exposures.
#[test]
fn acceptance_08_edge_summary_equivalence() {
    let t0 = Instant::now();
    let mut rng = rng(0xed6e);
    let mut checked = 0;
    while checked < 1000 {
        let scene = common::random_scene(&mut rng, 3);
        let (min, max) =
            scene.bounds().unwrap_or((Point::new(0.0, 0.0), Point::new(4.0, 4.0)));
        let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
            Point::new(
                rng.random_range(min.x - 1.0..max.x + 1.0),
                rng.random_range(min.y - 1.0..max.y + 1.0),
            )
        };
        let a = sample(&mut rng);
        let b = sample(&mut rng);
        if a == b {
            continue;
        }
        let Ok(cpl) = partition_segment(&scene, a, b) else {
            continue;
        };
        let lambda_in = rng.random_range(0.0..4.0);
        let summary = summarize_edge(&cpl);
        let (s_cost, s_lambda) = apply_summary(&summary, lambda_in);
        let folded = fold_polyline(&cpl, lambda_in, &CostFunction::Exp).unwrap();
        assert!(
            rel_close(s_cost, folded.cost, 1e-9),
            "cost: summary {s_cost} vs fold {}",
            folded.cost
        );
        assert!(
            rel_close(s_lambda, folded.lambda_out, 1e-9),
            "exit exposure: summary {s_lambda} vs fold {}",
            folded.lambda_out
        );
        checked += 1;
    }
    assert!(t0.elapsed().as_secs_f64() < 5.0, "runtime bound 5 s exceeded");
    pass(8, "edge-summary equivalence", t0);
}

/// 9. Edge cost and exit exposure are monotone in entry exposure, the
///    property dominance pruning relies on.
#[test]
fn acceptance_09_dominance_monotonicity() {
    let t0 = Instant::now();
    let mut rng = rng(0xd0);
    for _ in 0..1000 {
        let length = rng.random_range(1e-6..5.0f64);
        let summary = if rng.random_bool(0.3) {
            EdgeSummary { length, has_reset: false, r_pre: length, c_mid: 0.0, r_suf: length }
        } else {
            let r_pre = rng.random_range(0.0..length / 2.0);
            let r_suf = rng.random_range(0.0..length / 2.0);
            EdgeSummary {
                length,
                has_reset: true,
                r_pre,
                c_mid: rng.random_range(0.0..10.0),
                r_suf,
            }
        };
        let l1 = rng.random_range(0.0..4.0);
        let l2 = rng.random_range(l1..4.0001);
        let (c1, out1) = apply_summary(&summary, l1);
        let (c2, out2) = apply_summary(&summary, l2);
        assert!(c1 <= c2, "cost not monotone: {c1} > {c2} for {summary:?}");
        assert!(out1 <= out2, "exit exposure not monotone: {out1} > {out2} for {summary:?}");
    }
    assert!(t0.elapsed().as_secs_f64() < 1.0, "runtime bound 1 s exceeded");
    pass(9, "dominance monotonicity", t0);
}

/// 10. Classification matches an independent exact rational evaluation of
///     the region definitions on shared-border scenes.
#[test]
fn acceptance_10_classification_conformance() {
    let t0 = Instant::now();
    let mut rng = rng(0xc1a55);

    // Hand-built shared-border scenes plus random snapped scenes.
    let shared: Vec<Vec<PolygonSpec>> = vec![
        vec![
            common::rect_spec(PolygonKind::Risk, 0.0, 0.0, 1.0, 1.0),
            common::rect_spec(PolygonKind::Obstacle, 1.0, 0.0, 2.0, 1.0),
        ],
        vec![
            common::rect_spec(PolygonKind::Obstacle, 1.9, -2.0, 2.1, -0.2),
            common::rect_spec(PolygonKind::Obstacle, 1.9, 0.2, 2.1, 2.0),
            common::rect_spec(PolygonKind::Risk, 1.9, -0.2, 2.1, 0.2),
        ],
        vec![
            common::rect_spec(PolygonKind::Risk, 0.0, 0.0, 1.0, 1.0),
            common::rect_spec(PolygonKind::Risk, 1.0, 0.0, 2.0, 1.0),
            common::rect_spec(PolygonKind::Obstacle, 0.0, -1.0, 2.0, 0.0),
        ],
    ];

    type RawPolygons = Vec<(PolygonKind, Vec<Point>)>;
    let mut checked = 0usize;
    let mut scenes: Vec<(Scene, RawPolygons)> = Vec::new();
    for specs in &shared {
        let scene = validate_scene(specs).unwrap();
        let raw = specs.iter().map(|s| (s.kind, s.vertices.clone())).collect();
        scenes.push((scene, raw));
    }
    while scenes.len() < 20 {
        let scene = common::random_scene(&mut rng, 3);
        if scene.polygon_count() == 0 {
            continue;
        }
        let raw = scene
            .polygons()
            .iter()
            .map(|p| (p.kind(), p.vertices().to_vec()))
            .collect();
        scenes.push((scene, raw));
    }

    while checked < 10_000 {
        let (scene, raw) = &scenes[checked % scenes.len()];
        let (min, max) = scene.bounds().unwrap();
        let p = if checked.is_multiple_of(3) {
            // Boundary-heavy points: vertices and dyadic points along edges.
            let poly = &scene.polygons()[rng.random_range(0..scene.polygon_count())];
            let verts = poly.vertices();
            let i = rng.random_range(0..verts.len());
            let u = verts[i];
            let v = verts[(i + 1) % verts.len()];
            let t = rng.random_range(0..=8) as f64 / 8.0;
            Point::new(u.x + t * (v.x - u.x), u.y + t * (v.y - u.y))
        } else {
            Point::new(
                rng.random_range(min.x - 0.5..max.x + 0.5),
                rng.random_range(min.y - 0.5..max.y + 0.5),
            )
        };
        let fast = classify_point(scene, p);
        let exact = classify_rational(raw, p);
        assert_eq!(fast, exact, "classification mismatch at {p}");
        checked += 1;
    }
    assert!(t0.elapsed().as_secs_f64() < 10.0, "runtime bound 10 s exceeded");
    pass(10, "classification conformance", t0);
}

/// Thin-strip query: crossing beats any long detour, and the grid oracle
/// confirms the crossing cost.
#[test]
fn thin_strip_crossing_cross_checked_by_grid() {
    let scene = validate_scene(&[common::rect_spec(PolygonKind::Risk, 0.0, -5.0, 0.1, 5.0)]).unwrap();
    let s = Point::new(-1.0, 0.0);
    let g = Point::new(1.1, 0.0);
    let graph = build_graph(&scene, s, g, &exp_params(0.5, 0), &CostFunction::Exp).unwrap();
    let planned = plan(&graph).unwrap().cost;
    let expected = 2.0 + 0.1f64.exp_m1();
    assert!(rel_close(planned, expected, 1e-9), "plan {planned} vs analytic {expected}");

    let grid_params = GridParams::for_query(&scene, s, g, 0.01, 0.01).unwrap();
    let gridded = grid_plan(&scene, s, g, &grid_params, &CostFunction::Exp).unwrap().cost;
    assert!(
        (planned - gridded).abs() <= 0.1 * planned.max(gridded),
        "plan {planned} vs grid {gridded}"
    );
}

/// Closed form against quadrature over a parameter sweep.
#[test]
fn closed_form_vs_quadrature_sweep() {
    let mut rng = rng(0x9d);
    let quad = CostFunction::generic(|x| x.exp(), 1e-9).unwrap();
    for _ in 0..1000 {
        let l0 = rng.random_range(0.0..4.0);
        let len = rng.random_range(0.0..4.0);
        let closed = risk_run_cost(l0, len, &CostFunction::Exp).unwrap();
        let numeric = risk_run_cost(l0, len, &quad).unwrap();
        assert!(
            rel_close(closed, numeric, 1e-7),
            "λ0={l0} L={len}: closed {closed} vs quadrature {numeric}"
        );
    }
}
