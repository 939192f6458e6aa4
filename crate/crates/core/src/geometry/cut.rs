use rand::Rng;

use super::{line_params, point_segment_distance, Point, Polygon};

/// Pieces smaller than this fraction of the parent area are rejected.
pub const SLIVER_FRACTION: f64 = 1e-6;

/// A straight chord splitting a polygon in two.
#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    /// The piece traversed from the first endpoint along the boundary.
    pub left: Polygon,
    pub right: Polygon,
    pub segment: (Point, Point),
}

/// Position `s` (arclength from vertex 0) mapped to `(edge index, point)`.
fn locate(poly: &Polygon, mut s: f64) -> (usize, Point) {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = poly.edge(i);
        let len = a.distance(b);
        if s <= len || i == n - 1 {
            return (i, a.lerp(b, (s / len).clamp(0.0, 1.0)));
        }
        s -= len;
    }
    unreachable!("polygons have at least three edges")
}

/// The open chord `a→b` stays in the interior of `poly`.
fn chord_is_interior(poly: &Polygon, a: Point, b: Point, eps: f64) -> bool {
    let len = a.distance(b);
    if len <= eps {
        return false;
    }
    let lim = eps / len;
    for (c, d) in poly.edges() {
        match line_params(a, b, c, d) {
            Some((t, u)) => {
                let ul = eps / c.distance(d).max(eps);
                if t > lim && t < 1.0 - lim && u >= -ul && u <= 1.0 + ul {
                    return false;
                }
            }
            None => {
                // parallel: reject if collinear and overlapping away from the endpoints
                if point_segment_distance(c, a, b).min(point_segment_distance(d, a, b)) <= eps {
                    let dir = (b - a) * (1.0 / len);
                    let (tc, td) = ((c - a).dot(dir) / len, (d - a).dot(dir) / len);
                    let (lo, hi) = (tc.min(td), tc.max(td));
                    if hi > lim && lo < 1.0 - lim {
                        return false;
                    }
                }
            }
        }
    }
    // vertices lying on the open chord
    for &v in poly.vertices() {
        if point_segment_distance(v, a, b) <= eps && v.distance(a) > eps && v.distance(b) > eps {
            return false;
        }
    }
    poly.contains(a.lerp(b, 0.5))
}

/// Cuts `poly` along the chord between the boundary points at arclength
/// positions `s1` and `s2`. `None` when the chord is not interior or a
/// piece would be a sliver.
pub fn cut_at(poly: &Polygon, s1: f64, s2: f64) -> Option<CutResult> {
    let eps = poly.eps();
    let (i, a) = locate(poly, s1);
    let (j, b) = locate(poly, s2);
    if i == j || !chord_is_interior(poly, a, b, eps) {
        return None;
    }
    let n = poly.len();
    let v = poly.vertices();
    let mut left = vec![a];
    let mut k = (i + 1) % n;
    loop {
        left.push(v[k]);
        if k == j {
            break;
        }
        k = (k + 1) % n;
    }
    left.push(b);
    let mut right = vec![b];
    let mut k = (j + 1) % n;
    loop {
        right.push(v[k]);
        if k == i {
            break;
        }
        k = (k + 1) % n;
    }
    right.push(a);

    let left = Polygon::from_loop(left)?;
    let right = Polygon::from_loop(right)?;
    let min_area = SLIVER_FRACTION * poly.area();
    if left.area() < min_area || right.area() < min_area {
        return None;
    }
    Some(CutResult { left, right, segment: (a, b) })
}

/// Samples a chord with both endpoints uniform by arclength.
pub fn random_cut<R: Rng + ?Sized>(poly: &Polygon, rng: &mut R) -> Option<CutResult> {
    let total = poly.perimeter();
    let s1 = rng.random_range(0.0..total);
    let s2 = rng.random_range(0.0..total);
    cut_at(poly, s1, s2)
}

/// Binary partition error: `α·|A(P1) − w1·A(P)| + (1−α)·(1 − (R(P1)+R(P2))/2)`.
///
/// The area term is in absolute units of the polygons' coordinates.
pub fn cut_error(parent: &Polygon, first: &Polygon, second: &Polygon, w1: f64, alpha: f64) -> f64 {
    let area_err = (first.area() - w1 * parent.area()).abs();
    let circ_err = 1.0 - (first.circularity() + second.circularity()) / 2.0;
    alpha * area_err + (1.0 - alpha) * circ_err
}
