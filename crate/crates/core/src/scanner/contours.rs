//! Suzuki-Abe border following.
//!
//! A raster scan finds the starting pixel of every outer border (of a
//! 1-component) and hole border (of a 0-component), follows it with 8-
//! connectivity and labels it, and derives the parent of each border from
//! the label of the last border crossed on the same row.

/// A pixel position `(x, y)`.
pub type Pixel = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contour {
    pub points: Vec<Pixel>,
    /// Hole borders separate a 1-component from a 0-component inside it.
    pub is_hole: bool,
}

impl Contour {
    /// Shoelace area of the closed pixel path.
    pub fn area(&self) -> f64 {
        let n = self.points.len();
        let twice: i64 = (0..n)
            .map(|i| {
                let (x0, y0) = self.points[i];
                let (x1, y1) = self.points[(i + 1) % n];
                x0 as i64 * y1 as i64 - x1 as i64 * y0 as i64
            })
            .sum();
        twice.unsigned_abs() as f64 / 2.0
    }
}

/// Tree links per contour, `None` for absent neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Links {
    pub next: Option<usize>,
    pub previous: Option<usize>,
    pub first_child: Option<usize>,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ContourHierarchy {
    pub contours: Vec<Contour>,
    pub links: Vec<Links>,
}

impl ContourHierarchy {
    pub fn len(&self) -> usize {
        self.contours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contours.is_empty()
    }

    /// Children of contour `i` in sibling order.
    pub fn children(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.links[i].first_child;
        while let Some(c) = cur {
            out.push(c);
            cur = self.links[c].next;
        }
        out
    }

    /// Contours without a parent, in sibling order.
    pub fn roots(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = (0..self.len()).find(|&i| self.links[i].parent.is_none());
        while let Some(c) = cur {
            out.push(c);
            cur = self.links[c].next;
        }
        out
    }

    fn from_parents(contours: Vec<Contour>, parents: Vec<Option<usize>>) -> Self {
        let mut links = vec![Links::default(); contours.len()];
        let mut last_child: Vec<Option<usize>> = vec![None; contours.len()];
        let mut last_root = None;
        for (i, &parent) in parents.iter().enumerate() {
            links[i].parent = parent;
            let prev = match parent {
                Some(p) => last_child[p].replace(i),
                None => last_root.replace(i),
            };
            links[i].previous = prev;
            match (prev, parent) {
                (Some(q), _) => links[q].next = Some(i),
                (None, Some(p)) => links[p].first_child = Some(i),
                (None, None) => {}
            }
        }
        Self { contours, links }
    }
}

// clockwise from east in image coordinates (y down)
const OFFSETS: [(isize, isize); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];

fn direction(from: (isize, isize), to: (isize, isize)) -> usize {
    let d = (to.0 - from.0, to.1 - from.1);
    OFFSETS.iter().position(|&o| o == d).expect("8-neighbor")
}

/// All borders of the binary image with their containment hierarchy.
/// Pixels outside the image count as 0.
pub fn trace_contours(img: &crate::raster::BinaryImage) -> ContourHierarchy {
    let (w, h) = (img.width() as isize + 2, img.height() as isize + 2);
    let mut f = vec![0i32; (w * h) as usize];
    for y in 0..img.height() {
        for x in 0..img.width() {
            f[(y as isize + 1) as usize * w as usize + x + 1] = img.get(x, y) as i32;
        }
    }
    let idx = |x: isize, y: isize| (y * w + x) as usize;

    let mut contours: Vec<Contour> = Vec::new();
    let mut parents: Vec<Option<usize>> = Vec::new();
    // label 1 is the frame, a hole border; label k ≥ 2 is contour k − 2
    let kind_of = |label: i32, contours: &[Contour]| if label == 1 { true } else { contours[(label - 2) as usize].is_hole };
    let parent_of = |label: i32, parents: &[Option<usize>]| if label == 1 { None } else { parents[(label - 2) as usize] };

    for y in 1..h - 1 {
        let mut lnbd = 1i32;
        for x in 1..w - 1 {
            let v = f[idx(x, y)];
            let start = if v == 1 && f[idx(x - 1, y)] == 0 {
                Some((false, (x - 1, y)))
            } else if v >= 1 && f[idx(x + 1, y)] == 0 {
                if v > 1 {
                    lnbd = v;
                }
                Some((true, (x + 1, y)))
            } else {
                None
            };

            if let Some((is_hole, from)) = start {
                let nbd = contours.len() as i32 + 2;
                let outer_kind = kind_of(lnbd, &contours);
                let parent_label = if is_hole == outer_kind { parent_of(lnbd, &parents) } else { (lnbd > 1).then(|| (lnbd - 2) as usize) };
                let points = follow(&mut f, w, (x, y), from, nbd);
                contours.push(Contour { points, is_hole });
                parents.push(parent_label);
            }

            let v = f[idx(x, y)];
            if v != 1 && v != 0 {
                lnbd = v.abs();
            }
        }
    }
    ContourHierarchy::from_parents(contours, parents)
}

fn follow(f: &mut [i32], w: isize, start: (isize, isize), from: (isize, isize), nbd: i32) -> Vec<Pixel> {
    let at = |p: (isize, isize)| (p.1 * w + p.0) as usize;
    let out = |p: (isize, isize)| (p.0 as usize - 1, p.1 as usize - 1);

    // clockwise from the entry neighbor for the first nonzero pixel
    let d0 = direction(start, from);
    let first = (0..8).map(|k| (d0 + k) % 8).map(|d| (start.0 + OFFSETS[d].0, start.1 + OFFSETS[d].1)).find(|&p| f[at(p)] != 0);
    let Some(first) = first else {
        f[at(start)] = -nbd;
        return vec![out(start)];
    };

    let mut points = Vec::new();
    let (mut prev, mut cur) = (first, start);
    loop {
        points.push(out(cur));
        // counterclockwise from the pixel after `prev`
        let dp = direction(cur, prev);
        let mut east_is_zero = false;
        let mut next = prev;
        for k in 1..=8 {
            let d = (dp + 8 - k) % 8;
            let p = (cur.0 + OFFSETS[d].0, cur.1 + OFFSETS[d].1);
            if f[at(p)] != 0 {
                next = p;
                break;
            }
            if d == 0 {
                east_is_zero = true;
            }
        }
        if east_is_zero {
            f[at(cur)] = -nbd;
        } else if f[at(cur)] == 1 {
            f[at(cur)] = nbd;
        }
        if next == start && cur == first {
            break;
        }
        prev = cur;
        cur = next;
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::BinaryImage;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn from_rows(rows: &[&str]) -> BinaryImage {
        let h = rows.len();
        let w = rows[0].len();
        BinaryImage::from_fn(w, h, |x, y| rows[y].as_bytes()[x] == b'#')
    }

    fn assert_closed(h: &ContourHierarchy) {
        for c in &h.contours {
            let (a, b) = (c.points[0], *c.points.last().unwrap());
            assert!(a.0.abs_diff(b.0) <= 1 && a.1.abs_diff(b.1) <= 1, "open contour");
            for pair in c.points.windows(2) {
                assert!(pair[0].0.abs_diff(pair[1].0) <= 1 && pair[0].1.abs_diff(pair[1].1) <= 1);
            }
        }
    }

    fn assert_consistent(h: &ContourHierarchy) {
        for i in 0..h.len() {
            let l = h.links[i];
            if let Some(n) = l.next {
                assert_eq!(h.links[n].previous, Some(i));
                assert_eq!(h.links[n].parent, l.parent);
            }
            if let Some(c) = l.first_child {
                assert_eq!(h.links[c].parent, Some(i));
                assert_eq!(h.links[c].previous, None);
            }
            // parent chains terminate
            let mut cur = l.parent;
            let mut steps = 0;
            while let Some(p) = cur {
                cur = h.links[p].parent;
                steps += 1;
                assert!(steps <= h.len());
            }
        }
        let counted: usize = h.roots().len() + (0..h.len()).map(|i| h.children(i).len()).sum::<usize>();
        assert_eq!(counted, h.len());
    }

    #[test]
    fn empty_image_has_no_contours() {
        let h = trace_contours(&BinaryImage::new(8, 8));
        assert!(h.is_empty());
    }

    #[test]
    fn single_square() {
        let h = trace_contours(&from_rows(&["......", ".####.", ".####.", ".####.", "......"]));
        assert_eq!(h.len(), 1);
        assert!(!h.contours[0].is_hole);
        assert_eq!(h.links[0].parent, None);
        assert_eq!(h.contours[0].points.len(), 10);
        assert_eq!(h.contours[0].area(), 6.0);
        assert_closed(&h);
    }

    #[test]
    fn single_pixel_and_touching_border() {
        let h = trace_contours(&from_rows(&["#..", "...", "..#"]));
        assert_eq!(h.len(), 2);
        assert_eq!(h.contours[0].points, vec![(0, 0)]);
        let full = trace_contours(&BinaryImage::from_fn(4, 4, |_, _| true));
        assert_eq!(full.len(), 1);
    }

    #[test]
    fn ring_with_dot_is_a_chain() {
        let h = trace_contours(&from_rows(&[
            "#########",
            "#.......#",
            "#.......#",
            "#...#...#",
            "#.......#",
            "#.......#",
            "#########",
        ]));
        assert_eq!(h.len(), 3);
        assert_eq!((h.contours[0].is_hole, h.contours[1].is_hole, h.contours[2].is_hole), (false, true, false));
        assert_eq!(h.links[0].parent, None);
        assert_eq!(h.links[1].parent, Some(0));
        assert_eq!(h.links[2].parent, Some(1));
        assert_consistent(&h);
        assert_closed(&h);
    }

    #[test]
    fn diagonal_pixels_are_one_component() {
        let h = trace_contours(&from_rows(&["#...", ".#..", "..#.", "...."]));
        assert_eq!(h.len(), 1);
        assert_eq!(h.contours[0].points.len(), 4);
    }

    #[test]
    fn siblings_link_both_ways() {
        let h = trace_contours(&from_rows(&[
            "###########",
            "#.........#",
            "#.##...##.#",
            "#.##...##.#",
            "#.........#",
            "###########",
        ]));
        assert_eq!(h.len(), 4);
        assert_eq!(h.children(1), vec![2, 3]);
        assert_consistent(&h);
    }

    /// Containment oracle: a pixel off the path of `outer` lies inside it by
    /// the even-odd rule, probed slightly off-center to avoid vertices.
    fn encloses(outer: &Contour, p: Pixel) -> bool {
        if outer.points.contains(&p) {
            return false;
        }
        let (px, py) = (p.0 as f64 + 0.25, p.1 as f64 + 0.125);
        let n = outer.points.len();
        let mut inside = false;
        for i in 0..n {
            let (x0, y0) = (outer.points[i].0 as f64, outer.points[i].1 as f64);
            let (x1, y1) = (outer.points[(i + 1) % n].0 as f64, outer.points[(i + 1) % n].1 as f64);
            if (y0 > py) != (y1 > py) && px < x0 + (py - y0) / (y1 - y0) * (x1 - x0) {
                inside = !inside;
            }
        }
        inside
    }

    #[test]
    fn parents_match_a_containment_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            // nested squares with random fill, spaced so borders never touch
            let size = 40;
            let img = BinaryImage::from_fn(size, size, |x, y| {
                let ring = x.min(y).min(size - 1 - x).min(size - 1 - y);
                ring / 3 % 2 == 0
            });
            let mut img = img;
            for _ in 0..rng.random_range(0..6) {
                let (x, y) = (rng.random_range(0..size), rng.random_range(0..size));
                img.set(x, y, !img.get(x, y));
            }
            let h = trace_contours(&img);
            assert_consistent(&h);
            assert_closed(&h);
            for j in 0..h.len() {
                // borders of one component can share pixels, so any strictly
                // enclosed point counts
                let enclosing: Vec<usize> = (0..h.len())
                    .filter(|&i| i != j && h.contours[i].points.len() > 2)
                    .filter(|&i| h.contours[j].points.iter().any(|&p| encloses(&h.contours[i], p)))
                    .collect();
                let innermost = enclosing.iter().copied().min_by(|&a, &b| h.contours[a].area().total_cmp(&h.contours[b].area()));
                if h.contours[j].points.len() > 2 {
                    let mut chain = Vec::new();
                    let mut cur = h.links[j].parent;
                    while let Some(c) = cur {
                        chain.push(c);
                        cur = h.links[c].parent;
                    }
                    let mut expected = enclosing.clone();
                    expected.sort();
                    chain.sort();
                    assert_eq!(chain, expected, "ancestors of contour {j}");
                    assert_eq!(h.links[j].parent, innermost);
                }
            }
        }
    }
}
