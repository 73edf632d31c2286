//! Independent region classifier in exact rational arithmetic.
//!
//! Deliberately shares no code with the library: polygons come in as raw
//! vertex lists, side tests use `BigRational` cross products, and interior
//! membership uses a half-open ray-parity rule evaluated exactly. Serves as
//! the conformance oracle for `classify_point`.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;

use riskpath::geometry::{Point, PolygonKind, RegionClass};

fn rat(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite coordinate")
}

struct RatPoint {
    x: BigRational,
    y: BigRational,
}

fn rp(p: Point) -> RatPoint {
    RatPoint { x: rat(p.x), y: rat(p.y) }
}

/// Sign of the cross product (b - a) × (p - a).
fn cross_sign(a: &RatPoint, b: &RatPoint, p: &RatPoint) -> i32 {
    let v = (&b.x - &a.x) * (&p.y - &a.y) - (&b.y - &a.y) * (&p.x - &a.x);
    match v.cmp(&BigRational::from_integer(BigInt::from(0))) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    }
}

fn on_edge(a: &RatPoint, b: &RatPoint, p: &RatPoint) -> bool {
    if cross_sign(a, b, p) != 0 {
        return false;
    }
    let (xlo, xhi) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (ylo, yhi) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    &p.x >= xlo && &p.x <= xhi && &p.y >= ylo && &p.y <= yhi
}

enum Place {
    Inside,
    Border,
    Outside,
}

fn place(vertices: &[Point], p: &RatPoint) -> Place {
    let pts: Vec<RatPoint> = vertices.iter().map(|&v| rp(v)).collect();
    let n = pts.len();
    for i in 0..n {
        if on_edge(&pts[i], &pts[(i + 1) % n], p) {
            return Place::Border;
        }
    }
    let mut inside = false;
    for i in 0..n {
        let (u, v) = (&pts[i], &pts[(i + 1) % n]);
        if (u.y > p.y) != (v.y > p.y) {
            let s = cross_sign(u, v, p);
            let crosses = if v.y > u.y { s > 0 } else { s < 0 };
            if crosses {
                inside = !inside;
            }
        }
    }
    if inside {
        Place::Inside
    } else {
        Place::Outside
    }
}

/// Classify `p` against raw polygons by the region set definitions:
/// forbidden inside any obstacle; risk inside any risk polygon or on a
/// border shared by an obstacle and a risk polygon; safe otherwise.
pub fn classify_rational(polygons: &[(PolygonKind, Vec<Point>)], p: Point) -> RegionClass {
    let p = rp(p);
    let mut inside_risk = false;
    let mut border_risk = false;
    let mut border_obstacle = false;
    for (kind, vertices) in polygons {
        match (place(vertices, &p), kind) {
            (Place::Inside, PolygonKind::Obstacle) => return RegionClass::Forbidden,
            (Place::Inside, PolygonKind::Risk) => inside_risk = true,
            (Place::Border, PolygonKind::Obstacle) => border_obstacle = true,
            (Place::Border, PolygonKind::Risk) => border_risk = true,
            (Place::Outside, _) => {}
        }
    }
    if inside_risk || (border_risk && border_obstacle) {
        RegionClass::Risk
    } else {
        RegionClass::Safe
    }
}
