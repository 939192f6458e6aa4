//! Inward polygon offset.
//!
//! Each edge is translated inward by `d`. Convex corners become the miter
//! point of the two translated edges; reflex corners get a short polyline
//! circumscribing the arc of radius `d` around the original vertex, so the
//! raw loop never comes closer than `d` to the input. The raw loop is then
//! split at its self-intersections into simple loops, and the largest loop
//! that is positively oriented, inside the input and at least `d` away from
//! its boundary is returned.

use std::f64::consts::FRAC_PI_4;

use super::{clean_loop, line_params, signed_area, Point, Polygon};

/// Inward offset of `poly` by `d`, or `None` if nothing survives.
///
/// When the offset splits the polygon into several parts, the part with the
/// largest area is returned (first discovered on exact ties).
pub fn pad(poly: &Polygon, d: f64) -> Option<Polygon> {
    assert!(d > 0.0 && d.is_finite(), "padding distance must be positive");
    let eps = poly.eps();
    let raw = raw_offset(poly, d);
    let loops = split_loops(&raw, eps);

    let tol = d * 1e-6 + 4.0 * eps;
    let mut best: Option<(f64, Vec<Point>)> = None;
    for lp in loops {
        let lp = clean_loop(lp, eps);
        if lp.len() < 3 {
            continue;
        }
        let a = signed_area(&lp);
        if a <= (d * d) * 1e-9 {
            continue;
        }
        let n = lp.len();
        let valid = (0..n).all(|i| {
            let v = lp[i];
            let mid = v.lerp(lp[(i + 1) % n], 0.5);
            poly.contains(v) && poly.boundary_distance(v) >= d - tol && poly.boundary_distance(mid) >= d - tol
        });
        if valid && best.as_ref().is_none_or(|(ba, _)| a > *ba) {
            best = Some((a, lp));
        }
    }
    best.and_then(|(_, lp)| Polygon::from_loop(lp))
}

fn raw_offset(poly: &Polygon, d: f64) -> Vec<Point> {
    let v = poly.vertices();
    let n = v.len();
    let normal = |i: usize| {
        let (a, b) = poly.edge(i);
        let dir = b - a;
        dir.perp() * (1.0 / dir.norm())
    };
    let mut out = Vec::with_capacity(n + 8);
    for i in 0..n {
        let before = normal((i + n - 1) % n);
        let after = normal(i);
        let turn = before.cross(after).atan2(before.dot(after));
        let steps = if turn < 0.0 { (turn.abs() / FRAC_PI_4).ceil().max(1.0) as usize } else { 1 };
        let half_step = turn / (2.0 * steps as f64);
        let radius = d / half_step.cos().max(1e-9);
        for j in 0..steps {
            let angle = (2 * j + 1) as f64 * half_step;
            out.push(v[i] + before.rotate(angle) * radius);
        }
    }
    out
}

#[derive(Clone, Copy)]
enum Stop {
    Vertex(Point),
    Crossing(usize, Point),
}

impl Stop {
    fn point(self) -> Point {
        match self {
            Stop::Vertex(p) | Stop::Crossing(_, p) => p,
        }
    }
}

/// Splits a closed, possibly self-intersecting polyline into loops by
/// switching strands at every proper crossing.
fn split_loops(raw: &[Point], eps: f64) -> Vec<Vec<Point>> {
    let m = raw.len();
    let seg = |i: usize| (raw[i], raw[(i + 1) % m]);

    let mut crossings: Vec<Vec<(f64, usize)>> = vec![Vec::new(); m];
    let mut points = Vec::new();
    for i in 0..m {
        let (a, b) = seg(i);
        for j in i + 2..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let (c, e) = seg(j);
            if let Some((t, u)) = line_params(a, b, c, e) {
                let tl = eps / (b - a).norm().max(eps);
                let ul = eps / (e - c).norm().max(eps);
                if t > tl && t < 1.0 - tl && u > ul && u < 1.0 - ul {
                    let id = points.len();
                    points.push(a.lerp(b, t));
                    crossings[i].push((t, id));
                    crossings[j].push((u, id));
                }
            }
        }
    }
    if points.is_empty() {
        return vec![raw.to_vec()];
    }

    let mut stops = Vec::with_capacity(m + 2 * points.len());
    let mut twin_slots = vec![Vec::with_capacity(2); points.len()];
    for (i, list) in crossings.iter_mut().enumerate() {
        stops.push(Stop::Vertex(raw[i]));
        list.sort_by(|x, y| x.0.total_cmp(&y.0));
        for &(_, id) in list.iter() {
            twin_slots[id].push(stops.len());
            stops.push(Stop::Crossing(id, points[id]));
        }
    }
    let twin = |pos: usize| -> usize {
        match stops[pos] {
            Stop::Crossing(id, _) => {
                let slots = &twin_slots[id];
                if slots[0] == pos { slots[1] } else { slots[0] }
            }
            Stop::Vertex(_) => pos,
        }
    };

    let len = stops.len();
    let mut departed = vec![false; len];
    let mut loops = Vec::new();
    for start in 0..len {
        if departed[start] {
            continue;
        }
        let mut lp = Vec::new();
        let mut pos = start;
        loop {
            departed[pos] = true;
            lp.push(stops[pos].point());
            let next = (pos + 1) % len;
            pos = twin(next);
            if pos == start || departed[pos] {
                break;
            }
        }
        loops.push(lp);
    }
    loops
}
