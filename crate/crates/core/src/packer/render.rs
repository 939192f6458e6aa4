use std::fmt::Write as _;

use crate::geometry::{BBox, Point};
use crate::raster::RasterImage;

use super::ClaycodeDocument;

/// Pixels on the longer side of an SVG.
pub const SVG_SIZE: f64 = 1024.0;

/// Uniform scale from canvas coordinates to a pixel grid, y pointing down,
/// with the canvas centered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanvasTransform {
    canvas: BBox,
    scale: f64,
    offset: (f64, f64),
}

impl CanvasTransform {
    pub fn fit(canvas: BBox, width: f64, height: f64) -> Self {
        let scale = (width / canvas.width()).min(height / canvas.height());
        let offset = ((width - canvas.width() * scale) / 2.0, (height - canvas.height() * scale) / 2.0);
        Self { canvas, scale, offset }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn to_pixel(&self, p: Point) -> Point {
        Point::new(
            (p.x - self.canvas.min.x) * self.scale + self.offset.0,
            (self.canvas.max.y - p.y) * self.scale + self.offset.1,
        )
    }

    pub fn to_canvas(&self, px: Point) -> Point {
        Point::new(
            (px.x - self.offset.0) / self.scale + self.canvas.min.x,
            self.canvas.max.y - (px.y - self.offset.1) / self.scale,
        )
    }
}

fn svg_extent(canvas: BBox) -> (f64, f64) {
    let long = canvas.width().max(canvas.height());
    (SVG_SIZE * canvas.width() / long, SVG_SIZE * canvas.height() / long)
}

/// SVG 1.1 text with one `<polygon>` per node, painted in pre-order over
/// the background.
pub fn render_svg(doc: &ClaycodeDocument) -> String {
    let (w, h) = svg_extent(doc.canvas);
    let t = CanvasTransform::fit(doc.canvas, w, h);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.3}\" height=\"{h:.3}\" viewBox=\"0 0 {w:.3} {h:.3}\">"
    );
    let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{w:.3}\" height=\"{h:.3}\" fill=\"{}\"/>", doc.style.background);
    if let Some(root) = &doc.root {
        root.walk(&mut |node| {
            out.push_str("<polygon points=\"");
            for (i, &v) in node.polygon.vertices().iter().enumerate() {
                let p = t.to_pixel(v);
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{:.3},{:.3}", p.x, p.y);
            }
            let _ = writeln!(out, "\" fill=\"{}\"/>", node.color);
        });
    }
    out.push_str("</svg>\n");
    out
}

/// Scanline fill of every node in paint order; a pixel takes the color of
/// the last polygon containing its center.
pub fn rasterize(doc: &ClaycodeDocument, width: usize, height: usize) -> RasterImage {
    assert!(width >= 64 && height >= 64, "raster must be at least 64x64");
    let mut img = RasterImage::filled_rgb(width, height, doc.style.background.0);
    let t = CanvasTransform::fit(doc.canvas, width as f64, height as f64);
    let mut crossings = Vec::new();
    if let Some(root) = &doc.root {
        root.walk(&mut |node| {
            let pts: Vec<Point> = node.polygon.vertices().iter().map(|&v| t.to_pixel(v)).collect();
            let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.y), hi.max(p.y)));
            let first = (lo - 0.5).ceil().max(0.0) as usize;
            let last = ((hi - 0.5).floor().min(height as f64 - 1.0)).max(-1.0);
            if last < first as f64 {
                return;
            }
            for y in first..=last as usize {
                let yc = y as f64 + 0.5;
                crossings.clear();
                for i in 0..pts.len() {
                    let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
                    // half-open rule so shared vertices count once
                    if (a.y <= yc) != (b.y <= yc) {
                        crossings.push(a.x + (yc - a.y) / (b.y - a.y) * (b.x - a.x));
                    }
                }
                crossings.sort_by(f64::total_cmp);
                for span in crossings.chunks_exact(2) {
                    let x0 = (span[0] - 0.5).ceil().max(0.0) as usize;
                    let x1 = (span[1] - 0.5).ceil().min(width as f64);
                    if x1 <= x0 as f64 {
                        continue;
                    }
                    for x in x0..x1 as usize {
                        img.set_pixel(x, y, &node.color.0);
                    }
                }
            }
        });
    }
    img
}

#[cfg(test)]
mod tests {
    use super::super::{pack_auto, ClaycodeDocument, Color, Style};
    use super::*;
    use crate::bittree::TopologyTree;
    use crate::geometry::Polygon;

    fn walkthrough_doc() -> ClaycodeDocument {
        let tree: TopologyTree = "((()()())())".parse().unwrap();
        pack_auto(&tree, &Polygon::unit_square(), &Style::default()).unwrap()
    }

    #[test]
    fn empty_document_is_background_only() {
        let doc = ClaycodeDocument::blank(Polygon::unit_square(), Style::default());
        let svg = render_svg(&doc);
        assert!(svg.contains("<rect"));
        assert!(!svg.contains("<polygon"));
        let img = rasterize(&doc, 64, 64);
        assert!(img.data().iter().all(|&v| v == 255));
    }

    #[test]
    fn one_polygon_per_node() {
        let doc = walkthrough_doc();
        assert_eq!(render_svg(&doc).matches("<polygon").count(), 6);
        assert_eq!(doc.node_count(), 6);
    }

    #[test]
    fn svg_matches_golden_file() {
        let svg = render_svg(&walkthrough_doc());
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/walkthrough.svg");
        if std::env::var_os("CLAYCODE_BLESS").is_some() {
            std::fs::write(path, &svg).unwrap();
        }
        let golden = std::fs::read_to_string(path).expect("golden file; regenerate with CLAYCODE_BLESS=1");
        assert_eq!(svg, golden);
    }

    #[test]
    fn transform_round_trips() {
        let canvas = BBox { min: Point::new(-1.0, 2.0), max: Point::new(3.0, 4.0) };
        let t = CanvasTransform::fit(canvas, 200.0, 200.0);
        let p = Point::new(0.5, 3.1);
        let back = t.to_canvas(t.to_pixel(p));
        assert!(back.distance(p) < 1e-12);
        // top left of the canvas maps to the top of the centered band
        let tl = t.to_pixel(Point::new(-1.0, 4.0));
        assert!((tl.x - 0.0).abs() < 1e-12 && (tl.y - 50.0).abs() < 1e-12);
    }

    #[test]
    fn raster_colors_follow_polygons() {
        let doc = walkthrough_doc();
        let img = rasterize(&doc, 256, 256);
        assert_eq!(img.pixel(0, 0), &Color::WHITE.0);
        let t = CanvasTransform::fit(doc.canvas, 256.0, 256.0);
        let root = doc.root.as_ref().unwrap();
        let mut leaves = Vec::new();
        root.walk(&mut |n| {
            if n.children.is_empty() {
                leaves.push(n);
            }
        });
        for leaf in leaves {
            let c = t.to_pixel(leaf.polygon.interior_point());
            assert_eq!(img.pixel(c.x as usize, c.y as usize), &leaf.color.0);
        }
        // every pixel agrees with a point-in-polygon oracle on its center
        for y in (0..256).step_by(7) {
            for x in (0..256).step_by(7) {
                let p = t.to_canvas(Point::new(x as f64 + 0.5, y as f64 + 0.5));
                let mut expected = doc.style.background;
                root.walk(&mut |n| {
                    if n.polygon.contains(p) {
                        expected = n.color;
                    }
                });
                let near_edge = {
                    let mut d = f64::INFINITY;
                    root.walk(&mut |n| d = d.min(n.polygon.boundary_distance(p)));
                    d * t.scale() < 1e-6
                };
                if !near_edge {
                    assert_eq!(img.pixel(x, y), &expected.0, "pixel {x},{y}");
                }
            }
        }
    }
}
