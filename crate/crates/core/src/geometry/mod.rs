//! Simple-polygon primitives used by the packer: measures, inward offset
//! (padding) and straight-chord cuts.
//!
//! Every polygon is stored counter-clockwise without holes. Tolerances are
//! relative: [`Polygon::eps`] is `1e-9` times the bounding-box diagonal.

mod cut;
mod offset;

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use cut::{cut_at, cut_error, random_cut, CutResult, SLIVER_FRACTION};
pub use offset::pad;

/// Relative tolerance applied to a characteristic length.
pub const GEOM_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Point {
        self.min.lerp(self.max, 0.5)
    }

    pub fn expand(&self, margin: f64) -> BBox {
        BBox {
            min: self.min - Point::new(margin, margin),
            max: self.max + Point::new(margin, margin),
        }
    }
}

/// Signed shoelace area of a closed vertex loop (positive when CCW).
pub(crate) fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for i in 0..n {
        twice += vertices[i].cross(vertices[(i + 1) % n]);
    }
    twice / 2.0
}

fn bbox_of(vertices: &[Point]) -> BBox {
    let mut min = Point::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in vertices {
        min = Point::new(min.x.min(v.x), min.y.min(v.y));
        max = Point::new(max.x.max(v.x), max.y.max(v.y));
    }
    BBox { min, max }
}

/// Drops consecutive duplicates and vertices collinear with their
/// neighbours, working around the loop until nothing changes.
pub(crate) fn clean_loop(mut vertices: Vec<Point>, eps: f64) -> Vec<Point> {
    loop {
        let n = vertices.len();
        if n < 3 {
            return vertices;
        }
        let mut kept = Vec::with_capacity(n);
        for i in 0..n {
            let prev = if kept.is_empty() { vertices[(i + n - 1) % n] } else { *kept.last().unwrap() };
            let cur = vertices[i];
            let next = vertices[(i + 1) % n];
            if cur.distance(prev) <= eps {
                continue;
            }
            let span = next - prev;
            let len = span.norm();
            if len > eps && (cur - prev).cross(span).abs() / len <= eps && (cur - prev).dot(next - cur) >= 0.0 {
                continue;
            }
            kept.push(cur);
        }
        if kept.len() >= 2 && kept[0].distance(*kept.last().unwrap()) <= eps {
            kept.pop();
        }
        if kept.len() == n {
            return kept;
        }
        vertices = kept;
    }
}

/// A simple polygon without holes, stored counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonJson", into = "PolygonJson")]
pub struct Polygon {
    vertices: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct PolygonJson {
    vertices: Vec<[f64; 2]>,
}

impl TryFrom<PolygonJson> for Polygon {
    type Error = Error;

    fn try_from(json: PolygonJson) -> Result<Self> {
        Polygon::new(json.vertices.into_iter().map(|[x, y]| Point::new(x, y)).collect())
    }
}

impl From<Polygon> for PolygonJson {
    fn from(p: Polygon) -> Self {
        PolygonJson { vertices: p.vertices.into_iter().map(|v| [v.x, v.y]).collect() }
    }
}

impl Polygon {
    /// Validates and normalizes a vertex loop: duplicates and collinear
    /// vertices are removed, orientation is made counter-clockwise, and
    /// self-intersecting or degenerate input is rejected.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(invalid("polygon has non-finite coordinates"));
        }
        let poly = Self::from_loop(vertices).ok_or_else(|| invalid("polygon needs at least 3 distinct vertices and a non-zero area"))?;
        if !poly.is_simple() {
            return Err(invalid("polygon is self-intersecting"));
        }
        Ok(poly)
    }

    /// Normalizes a loop that is simple by construction.
    pub(crate) fn from_loop(vertices: Vec<Point>) -> Option<Self> {
        if vertices.len() < 3 {
            return None;
        }
        let eps = GEOM_EPS * bbox_of(&vertices).diagonal();
        let mut vertices = clean_loop(vertices, eps);
        if vertices.len() < 3 {
            return None;
        }
        let area = signed_area(&vertices);
        if area.abs() <= eps * eps || !area.is_finite() {
            return None;
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Some(Self { vertices })
    }

    pub fn rectangle(min: Point, max: Point) -> Self {
        Self::new(vec![min, Point::new(max.x, min.y), max, Point::new(min.x, max.y)]).expect("non-degenerate rectangle")
    }

    pub fn unit_square() -> Self {
        Self::rectangle(Point::new(0.0, 0.0), Point::new(1.0, 1.0))
    }

    /// Regular `n`-gon with circumradius `radius`, first vertex on the +x axis.
    pub fn regular(n: usize, center: Point, radius: f64) -> Self {
        assert!(n >= 3);
        let vertices = (0..n)
            .map(|i| center + Point::new(radius, 0.0).rotate(std::f64::consts::TAU * i as f64 / n as f64))
            .collect();
        Self::new(vertices).expect("regular polygon")
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> (Point, Point) {
        (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        (0..self.vertices.len()).map(|i| self.edge(i))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.distance(b)).sum()
    }

    /// `4πA / L²`: 1 for a disc, towards 0 for elongated shapes.
    pub fn circularity(&self) -> f64 {
        let l = self.perimeter();
        4.0 * std::f64::consts::PI * self.area() / (l * l)
    }

    pub fn bbox(&self) -> BBox {
        bbox_of(&self.vertices)
    }

    /// Absolute tolerance for this polygon.
    pub fn eps(&self) -> f64 {
        GEOM_EPS * self.bbox().diagonal()
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len();
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let (a, b) = self.edge(i);
            let w = a.cross(b);
            cx += (a.x + b.x) * w;
            cy += (a.y + b.y) * w;
        }
        let k = 1.0 / (6.0 * self.area());
        Point::new(cx * k, cy * k)
    }

    /// Crossing-number point-in-polygon test; boundary points are unspecified.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges().map(|(a, b)| point_segment_distance(p, a, b)).fold(f64::INFINITY, f64::min)
    }

    /// A point well inside the polygon: the middle of the widest
    /// horizontal span through the vertical middle of the bounding box.
    pub fn interior_point(&self) -> Point {
        let bb = self.bbox();
        let mut best = (f64::NEG_INFINITY, self.vertices[0]);
        for k in 1..8 {
            // nudge the scanline off vertex heights
            let y = bb.min.y + bb.height() * (k as f64 / 8.0 + 1e-7);
            let mut xs: Vec<f64> = self
                .edges()
                .filter(|(a, b)| (a.y > y) != (b.y > y))
                .map(|(a, b)| a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x))
                .collect();
            xs.sort_by(f64::total_cmp);
            for pair in xs.chunks_exact(2) {
                let p = Point::new((pair[0] + pair[1]) / 2.0, y);
                let clearance = self.boundary_distance(p);
                if clearance > best.0 {
                    best = (clearance, p);
                }
            }
        }
        best.1
    }

    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        let eps = self.eps();
        for i in 0..n {
            let (a, b) = self.edge(i);
            for j in i + 1..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (c, d) = self.edge(j);
                if segments_touch(a, b, c, d, eps) {
                    return false;
                }
            }
        }
        true
    }

    /// Every vertex of `other` lies strictly inside `self`.
    pub fn contains_polygon(&self, other: &Polygon) -> bool {
        other.vertices.iter().all(|&v| self.contains(v))
    }

    pub fn map_points(&self, f: impl Fn(Point) -> Point) -> Polygon {
        Polygon::from_loop(self.vertices.iter().map(|&v| f(v)).collect()).expect("non-degenerate transform")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polygon serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn area(p: &Polygon) -> f64 {
    p.area()
}

pub fn perimeter(p: &Polygon) -> f64 {
    p.perimeter()
}

pub fn circularity(p: &Polygon) -> f64 {
    p.circularity()
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Intersection parameters `(t, u)` of the lines through `a→b` and `c→d`,
/// `None` when (nearly) parallel.
pub(crate) fn line_params(a: Point, b: Point, c: Point, d: Point) -> Option<(f64, f64)> {
    let r = b - a;
    let s = d - c;
    let denom = r.cross(s);
    if denom.abs() <= 1e-15 * r.norm() * s.norm() {
        return None;
    }
    let ac = c - a;
    Some((ac.cross(s) / denom, ac.cross(r) / denom))
}

/// Closed segments `ab` and `cd` share at least one point (within `eps`).
pub(crate) fn segments_touch(a: Point, b: Point, c: Point, d: Point, eps: f64) -> bool {
    if let Some((t, u)) = line_params(a, b, c, d) {
        let tl = eps / (b - a).norm().max(eps);
        let ul = eps / (d - c).norm().max(eps);
        if t >= -tl && t <= 1.0 + tl && u >= -ul && u <= 1.0 + ul {
            return true;
        }
    }
    point_segment_distance(a, c, d) <= eps
        || point_segment_distance(b, c, d) <= eps
        || point_segment_distance(c, a, b) <= eps
        || point_segment_distance(d, a, b) <= eps
}
