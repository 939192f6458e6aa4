//! Tree → nested polygons.
//!
//! Every node pads its polygon twice by `φ/2`: the first inset is the
//! region that gets drawn, the second leaves a `φ`-wide band of the node's
//! own color around its children. What remains is split among the children
//! by repeated straight cuts, each chosen by random search to balance area
//! against footprint while keeping the pieces round.

mod render;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bittree::TopologyTree;
use crate::error::{invalid, Error, Result};
use crate::geometry::{cut_error, pad, random_cut, BBox, Polygon};
use crate::raster::luma;

pub use render::{rasterize, render_svg, CanvasTransform};

/// Early stop once this many consecutive valid samples fail to improve the
/// best error by more than [`CONVERGENCE_DELTA`].
pub const CONVERGENCE_WINDOW: usize = 200;
pub const CONVERGENCE_DELTA: f64 = 1e-4;

/// Cut attempts allowed per requested valid sample.
const ATTEMPTS_PER_SAMPLE: usize = 25;

/// Minimum luma difference between colors that touch in a drawing.
pub const MIN_CONTRAST: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Color(pub [u8; 3]);

impl Color {
    pub const BLACK: Color = Color([0, 0, 0]);
    pub const WHITE: Color = Color([255, 255, 255]);

    pub fn luma(self) -> u8 {
        luma(self.0)
    }

    /// Which side of mid-gray the color binarizes to.
    pub fn is_light(self) -> bool {
        self.luma() > 127
    }

    pub fn hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hex())
    }
}

impl FromStr for Color {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let hex = s.strip_prefix('#').unwrap_or(s);
        if hex.len() != 6 || !hex.is_ascii() {
            return Err(invalid(format!("color {s:?} is not #rrggbb")));
        }
        let channel = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| invalid(format!("color {s:?} is not #rrggbb")));
        Ok(Color([channel(0)?, channel(2)?, channel(4)?]))
    }
}

impl Serialize for Color {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.hex())
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Rendering and search parameters for the packer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Style {
    /// Weight of area proportionality against circularity.
    pub alpha: f64,
    /// Fill colors cycled by depth.
    pub palette: Vec<Color>,
    pub background: Color,
    pub seed: u64,
    /// Valid cuts sampled per binary partition.
    pub max_cut_samples: usize,
    /// Factor applied to φ after each failed attempt.
    pub phi_decay: f64,
    /// Give up once φ drops below this fraction of `√A(P)`.
    pub phi_min_fraction: f64,
    /// Quiet zone around the shape, as a fraction of its larger side.
    pub margin: f64,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            alpha: 0.6,
            palette: vec![Color::BLACK, Color::WHITE],
            background: Color::WHITE,
            seed: 0,
            max_cut_samples: 400,
            phi_decay: 0.85,
            phi_min_fraction: 1e-3,
            margin: 0.05,
        }
    }
}

impl Style {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn color_at(&self, depth: usize) -> Color {
        self.palette[depth % self.palette.len()]
    }

    /// Parameter ranges plus the contrast rule: every pair of colors that can
    /// touch (background/root and consecutive palette entries, cyclically)
    /// must fall on opposite sides of mid-gray and differ by
    /// [`MIN_CONTRAST`] in luma.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(invalid("alpha must lie in [0, 1]"));
        }
        if self.palette.is_empty() {
            return Err(invalid("palette must not be empty"));
        }
        if self.max_cut_samples == 0 {
            return Err(invalid("max_cut_samples must be positive"));
        }
        if !(self.phi_decay > 0.0 && self.phi_decay < 1.0) {
            return Err(invalid("phi_decay must lie in (0, 1)"));
        }
        if !(self.phi_min_fraction > 0.0 && self.phi_min_fraction < 1.0) {
            return Err(invalid("phi_min_fraction must lie in (0, 1)"));
        }
        if !(0.0..0.5).contains(&self.margin) {
            return Err(invalid("margin must lie in [0, 0.5)"));
        }
        let n = self.palette.len();
        let mut pairs = vec![(self.background, self.palette[0])];
        if n > 1 {
            pairs.extend((0..n).map(|i| (self.palette[i], self.palette[(i + 1) % n])));
        } else {
            pairs.push((self.palette[0], self.palette[0]));
        }
        for (a, b) in pairs {
            let diff = (a.luma() as i32 - b.luma() as i32).abs();
            if a.is_light() == b.is_light() || diff < MIN_CONTRAST {
                return Err(invalid(format!("colors {a} and {b} touch but are not contrasted enough")));
            }
        }
        Ok(())
    }
}

/// A drawn region and the regions nested inside it.
#[derive(Debug, Clone, PartialEq)]
pub struct PackedNode {
    pub polygon: Polygon,
    pub color: Color,
    pub depth: usize,
    pub children: Vec<PackedNode>,
}

impl PackedNode {
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(PackedNode::node_count).sum::<usize>()
    }

    /// The nesting structure as a plain tree.
    pub fn topology(&self) -> TopologyTree {
        TopologyTree::with_children(self.children.iter().map(PackedNode::topology).collect())
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a PackedNode)) {
        visit(self);
        for child in &self.children {
            child.walk(visit);
        }
    }
}

/// A packed code ready to render.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaycodeDocument {
    pub root: Option<PackedNode>,
    pub shape: Polygon,
    pub canvas: BBox,
    pub phi: f64,
    pub source_tree: TopologyTree,
    pub style: Style,
}

impl ClaycodeDocument {
    /// A document with nothing drawn on it.
    pub fn blank(shape: Polygon, style: Style) -> Self {
        let canvas = canvas_for(&shape, &style);
        Self { root: None, shape, canvas, phi: 0.0, source_tree: TopologyTree::leaf(), style }
    }

    pub fn node_count(&self) -> usize {
        self.root.as_ref().map_or(0, PackedNode::node_count)
    }
}

fn canvas_for(shape: &Polygon, style: &Style) -> BBox {
    let bb = shape.bbox();
    bb.expand(style.margin * bb.width().max(bb.height()))
}

/// Area fraction requested at each step of the iterative peeling:
/// `F(Tᵢ) / Σ_{j≥i} F(Tⱼ)` for every child but the last.
pub fn partition_weights(footprints: &[u64]) -> Vec<f64> {
    let mut rest: u64 = footprints.iter().sum();
    let mut weights = Vec::with_capacity(footprints.len().saturating_sub(1));
    for &f in &footprints[..footprints.len().saturating_sub(1)] {
        weights.push(f as f64 / rest as f64);
        rest -= f;
    }
    weights
}

/// Best of up to `max_cut_samples` random cuts under the binary partition
/// error. The first returned polygon is the one matched to `w1`.
///
/// Candidates are scored on the parent rescaled to unit area, so the
/// area term is a fraction and the trade-off against circularity does not
/// depend on how deep in the drawing the polygon sits.
pub fn polygon_cut<R: Rng + ?Sized>(poly: &Polygon, w1: f64, style: &Style, rng: &mut R) -> Result<(Polygon, Polygon)> {
    assert!(w1 > 0.0 && w1 < 1.0, "cut weight must lie in (0, 1)");
    let scale = 1.0 / poly.area().sqrt();
    let unit = poly.map_points(|p| p * scale);
    let budget = style.max_cut_samples * ATTEMPTS_PER_SAMPLE;

    let mut best: Option<(f64, (Polygon, Polygon))> = None;
    let mut best_err = f64::INFINITY;
    let (mut valid, mut stale) = (0, 0);
    for _ in 0..budget {
        let Some(cut) = random_cut(&unit, rng) else { continue };
        valid += 1;
        let forward = cut_error(&unit, &cut.left, &cut.right, w1, style.alpha);
        let backward = cut_error(&unit, &cut.right, &cut.left, w1, style.alpha);
        let (err, pair) = if forward <= backward { (forward, (cut.left, cut.right)) } else { (backward, (cut.right, cut.left)) };
        if err < best_err - CONVERGENCE_DELTA {
            stale = 0;
        } else {
            stale += 1;
        }
        if err < best_err {
            best_err = err;
            best = Some((err, pair));
        }
        if valid >= style.max_cut_samples || stale >= CONVERGENCE_WINDOW {
            break;
        }
    }
    let (_, (first, second)) = best.ok_or(Error::CutFailure { attempts: budget })?;
    let back = 1.0 / scale;
    Ok((first.map_points(|p| p * back), second.map_points(|p| p * back)))
}

/// Splits `poly` into one piece per child, in the given order, with areas
/// following the children's footprints.
pub fn partition<R: Rng + ?Sized>(poly: &Polygon, children: &[TopologyTree], style: &Style, rng: &mut R) -> Result<Vec<Polygon>> {
    if children.is_empty() {
        return Err(invalid("partition needs at least one child"));
    }
    let footprints: Vec<u64> = children.iter().map(TopologyTree::footprint).collect();
    let mut pieces = Vec::with_capacity(children.len());
    let mut rest = poly.clone();
    for w in partition_weights(&footprints) {
        let (piece, remainder) = polygon_cut(&rest, w, style, rng)?;
        pieces.push(piece);
        rest = remainder;
    }
    pieces.push(rest);
    Ok(pieces)
}

/// One packing attempt at a fixed `phi`; `None` when some region cannot be
/// drawn with that thickness.
pub fn pack<R: Rng + ?Sized>(tree: &TopologyTree, poly: &Polygon, phi: f64, style: &Style, rng: &mut R) -> Option<PackedNode> {
    assert!(phi > 0.0, "padding constant must be positive");
    pack_node(tree, poly, phi, 0, style, rng)
}

fn pack_node<R: Rng + ?Sized>(tree: &TopologyTree, poly: &Polygon, phi: f64, depth: usize, style: &Style, rng: &mut R) -> Option<PackedNode> {
    let drawn = pad(poly, phi / 2.0)?;
    // also for leaves: this is what guarantees their thickness
    let inner = pad(&drawn, phi / 2.0)?;

    let mut order: Vec<&TopologyTree> = tree.children().iter().collect();
    order.sort_by_key(|c| std::cmp::Reverse(c.footprint()));
    let mut children = Vec::with_capacity(order.len());
    if !order.is_empty() {
        let sorted: Vec<TopologyTree> = order.iter().map(|&c| c.clone()).collect();
        let pieces = partition(&inner, &sorted, style, rng).ok()?;
        for (child, piece) in order.into_iter().zip(&pieces) {
            children.push(pack_node(child, piece, phi, depth + 1, style, rng)?);
        }
    }
    Some(PackedNode { polygon: drawn, color: style.color_at(depth), depth, children })
}

/// The values of φ tried by [`pack_auto`], largest first.
pub fn phi_schedule(tree: &TopologyTree, shape: &Polygon, style: &Style) -> Vec<f64> {
    let area = shape.area();
    let floor = style.phi_min_fraction * area.sqrt();
    let mut phi = (area / tree.total_footprint() as f64).sqrt();
    let mut schedule = Vec::new();
    while phi >= floor {
        schedule.push(phi);
        phi *= style.phi_decay;
    }
    schedule
}

/// Packs with the largest φ from [`phi_schedule`] that succeeds.
pub fn pack_auto(tree: &TopologyTree, shape: &Polygon, style: &Style) -> Result<ClaycodeDocument> {
    style.validate()?;
    for phi in phi_schedule(tree, shape, style) {
        let mut rng = ChaCha8Rng::seed_from_u64(style.seed);
        if let Some(root) = pack(tree, shape, phi, style, &mut rng) {
            return Ok(ClaycodeDocument {
                root: Some(root),
                shape: shape.clone(),
                canvas: canvas_for(shape, style),
                phi,
                source_tree: tree.clone(),
                style: style.clone(),
            });
        }
    }
    Err(Error::Unpackable {
        total_footprint: tree.total_footprint(),
        min_phi: style.phi_min_fraction * shape.area().sqrt(),
    })
}
