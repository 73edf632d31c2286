//! Shared fixtures for integration tests: the standard scene suite and
//! seeded random scene generation.
#![allow(dead_code)]

pub mod rational;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use riskpath::geometry::{
    classify_point, validate_scene, Point, PolygonKind, PolygonSpec, RegionClass, Scene,
};
use riskpath::io;

pub const STRIP: &str = include_str!("../../../../scenes/strip.scene.json");
pub const CORRIDOR: &str = include_str!("../../../../scenes/corridor.scene.json");
pub const GAP_IN_WALL: &str = include_str!("../../../../scenes/gap_in_wall.scene.json");

/// (name, scene, start, goal) for the three standard scenes.
pub fn standard_scenes() -> Vec<(&'static str, Scene, Point, Point)> {
    [("strip", STRIP), ("corridor", CORRIDOR), ("gap_in_wall", GAP_IN_WALL)]
        .into_iter()
        .map(|(name, text)| {
            let (_, loaded) = io::load_scene(text).expect("standard scene parses");
            (name, loaded.scene, loaded.start.unwrap(), loaded.goal.unwrap())
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn rect_spec(kind: PolygonKind, x0: f64, y0: f64, x1: f64, y1: f64) -> PolygonSpec {
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

fn snap_quarter(v: f64) -> f64 {
    (v * 4.0).round() / 4.0
}

fn random_kind(rng: &mut ChaCha8Rng) -> PolygonKind {
    if rng.random_bool(0.5) {
        PolygonKind::Obstacle
    } else {
        PolygonKind::Risk
    }
}

fn random_polygon(rng: &mut ChaCha8Rng) -> PolygonSpec {
    let kind = random_kind(rng);
    if rng.random_bool(0.6) {
        // Axis-aligned rectangle on a quarter grid; snapping makes shared
        // borders between polygons common.
        let x0 = snap_quarter(rng.random_range(0.0..3.0));
        let y0 = snap_quarter(rng.random_range(0.0..3.0));
        let w = snap_quarter(rng.random_range(0.5..1.5));
        let h = snap_quarter(rng.random_range(0.5..1.5));
        rect_spec(kind, x0, y0, x0 + w.max(0.25), y0 + h.max(0.25))
    } else {
        let cx = rng.random_range(0.5..3.5);
        let cy = rng.random_range(0.5..3.5);
        let mut vertices = Vec::new();
        let n = 3;
        for i in 0..n {
            let angle = (i as f64 / n as f64) * std::f64::consts::TAU
                + rng.random_range(0.0..0.8);
            let r = rng.random_range(0.3..0.9);
            vertices.push(Point::new(cx + r * angle.cos(), cy + r * angle.sin()));
        }
        PolygonSpec::new(kind, vertices)
    }
}

/// A random valid scene with up to `max_polygons` polygons (possibly zero),
/// built by rejection against the validator.
pub fn random_scene(rng: &mut ChaCha8Rng, max_polygons: usize) -> Scene {
    loop {
        let count = rng.random_range(0..=max_polygons);
        let specs: Vec<PolygonSpec> = (0..count).map(|_| random_polygon(rng)).collect();
        if let Ok(scene) = validate_scene(&specs) {
            return scene;
        }
    }
}

/// A random safe point within the inflated scene bounds.
pub fn random_safe_point(rng: &mut ChaCha8Rng, scene: &Scene) -> Point {
    let (min, max) = scene
        .bounds()
        .unwrap_or((Point::new(0.0, 0.0), Point::new(4.0, 4.0)));
    loop {
        let p = Point::new(
            rng.random_range(min.x - 1.0..max.x + 1.0),
            rng.random_range(min.y - 1.0..max.y + 1.0),
        );
        if classify_point(scene, p) == RegionClass::Safe {
            return p;
        }
    }
}
