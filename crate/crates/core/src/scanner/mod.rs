//! Raster image → decoded messages.
//!
//! The image is converted to gray, optionally smoothed, binarized, and
//! traced into a contour hierarchy. Every region with enough nested
//! structure is tried as a code root; only frames that pass the CRC are
//! reported. Both polarities of the binary image are tried, so light-on-dark
//! codes decode as well.

mod contours;
mod filter;
mod topology;

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bittree::{Scheme, TopologyTree};
use crate::error::{invalid, Result};
use crate::framing::extract_messages;
use crate::raster::{BinaryImage, RasterImage};

pub use contours::{trace_contours, Contour, ContourHierarchy, Links, Pixel};
pub use filter::{adaptive_threshold, bilateral_filter, otsu_level, to_grayscale, BilateralParams, ThresholdParams};
pub use topology::{candidate_roots, hierarchy_to_tree, GlobalTopologyTree};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanParams {
    pub bilateral: BilateralParams,
    pub threshold: ThresholdParams,
    /// Contours enclosing fewer pixels than this are noise.
    pub min_contour_area: f64,
    /// A region needs strictly more descendants than this to be a candidate.
    pub candidate_min_descendants: usize,
}

impl Default for ScanParams {
    fn default() -> Self {
        Self {
            bilateral: BilateralParams::default(),
            threshold: ThresholdParams::default(),
            min_contour_area: 4.0,
            candidate_min_descendants: 10,
        }
    }
}

impl ScanParams {
    /// Defaults for photographs and other files: smoothing on.
    pub fn for_files() -> Self {
        let mut params = Self::default();
        params.bilateral.enabled = true;
        params
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(b) = self.threshold.block_size {
            if b < 3 || b % 2 == 0 {
                return Err(invalid("block_size must be odd and at least 3"));
            }
        }
        if self.candidate_min_descendants == 0 {
            return Err(invalid("candidate_min_descendants must be at least 1"));
        }
        if self.bilateral.enabled && (self.bilateral.sigma_spatial <= 0.0 || self.bilateral.sigma_range <= 0.0) {
            return Err(invalid("bilateral sigmas must be positive"));
        }
        if !(self.min_contour_area >= 0.0) || !(self.threshold.flat_contrast >= 0.0) || !self.threshold.k.is_finite() {
            return Err(invalid("scan parameters out of range"));
        }
        Ok(())
    }
}

/// What a scan found, with counts for diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub messages: Vec<String>,
    pub candidate_count: usize,
    pub node_count: usize,
    pub timing_ms: f64,
}

/// Binarized image after filtering.
pub fn binarize(img: &RasterImage, params: &ScanParams) -> BinaryImage {
    let gray = to_grayscale(img);
    let smooth = bilateral_filter(&gray, &params.bilateral);
    adaptive_threshold(&smooth, &params.threshold)
}

/// Candidate trees from both polarities of a binary image, and the total
/// node count of the two global trees.
pub fn candidates(binary: &BinaryImage, params: &ScanParams) -> (Vec<TopologyTree>, usize) {
    let mut out = Vec::new();
    let mut nodes = 0;
    for b in [binary.clone(), binary.invert()] {
        let tree = hierarchy_to_tree(&trace_contours(&b), params.min_contour_area);
        nodes += tree.node_count();
        out.extend(candidate_roots(&tree, params.candidate_min_descendants).into_iter().map(|(_, t)| t));
    }
    (out, nodes)
}

pub fn scan_report(img: &RasterImage, params: &ScanParams, scheme: Scheme) -> ScanReport {
    let start = Instant::now();
    let binary = binarize(img, params);
    let (cands, node_count) = candidates(&binary, params);
    let messages: BTreeSet<String> = extract_messages(&cands, scheme);
    ScanReport {
        messages: messages.into_iter().collect(),
        candidate_count: cands.len(),
        node_count,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// All validated messages in the image.
pub fn scan(img: &RasterImage, params: &ScanParams, scheme: Scheme) -> BTreeSet<String> {
    scan_report(img, params, scheme).messages.into_iter().collect()
}

pub fn scan_file(path: impl AsRef<Path>, params: &ScanParams, scheme: Scheme) -> Result<ScanReport> {
    let img = RasterImage::load(path)?;
    Ok(scan_report(&img, params, scheme))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framing::{build_code_tree, RedundancyLevel};
    use crate::geometry::Polygon;
    use crate::packer::{pack_auto, rasterize, Color, Style};

    fn code_image(msg: &str, size: usize, seed: u64) -> RasterImage {
        let tree = build_code_tree(msg, RedundancyLevel::SINGLE, Scheme::Squares).unwrap();
        let doc = pack_auto(&tree, &Polygon::unit_square(), &Style::with_seed(seed)).unwrap();
        rasterize(&doc, size, size)
    }

    #[test]
    fn blank_images_decode_nothing() {
        let params = ScanParams::default();
        assert!(scan(&RasterImage::filled_gray(128, 128, 255), &params, Scheme::Squares).is_empty());
        assert!(scan(&RasterImage::filled_rgb(64, 80, [0, 0, 0]), &params, Scheme::Squares).is_empty());
    }

    #[test]
    fn hello_round_trip() {
        let img = code_image("hello", 1024, 0);
        let found = scan(&img, &ScanParams::default(), Scheme::Squares);
        assert_eq!(found, BTreeSet::from(["hello".to_string()]));
    }

    #[test]
    fn rendered_code_is_a_candidate() {
        let tree = build_code_tree("hello", RedundancyLevel::SINGLE, Scheme::Squares).unwrap();
        let doc = pack_auto(&tree, &Polygon::unit_square(), &Style::default()).unwrap();
        let binary = binarize(&rasterize(&doc, 1024, 1024), &ScanParams::default());
        let (cands, _) = candidates(&binary, &ScanParams::default());
        assert!(cands.iter().any(|c| c.is_isomorphic(&tree)));
    }

    #[test]
    fn two_codes_side_by_side() {
        let (a, b) = (code_image("left", 512, 1), code_image("right", 512, 2));
        let mut img = RasterImage::filled_rgb(1024, 512, [255, 255, 255]);
        for y in 0..512 {
            for x in 0..512 {
                img.set_pixel(x, y, a.pixel(x, y));
                img.set_pixel(x + 512, y, b.pixel(x, y));
            }
        }
        let found = scan(&img, &ScanParams::default(), Scheme::Squares);
        assert_eq!(found, BTreeSet::from(["left".to_string(), "right".to_string()]));
    }

    #[test]
    fn inverted_codes_decode() {
        let tree = build_code_tree("dark", RedundancyLevel::SINGLE, Scheme::Squares).unwrap();
        let style = Style { palette: vec![Color::WHITE, Color::BLACK], background: Color::BLACK, ..Style::default() };
        let doc = pack_auto(&tree, &Polygon::unit_square(), &style).unwrap();
        let found = scan(&rasterize(&doc, 768, 768), &ScanParams::default(), Scheme::Squares);
        assert_eq!(found, BTreeSet::from(["dark".to_string()]));
    }

    #[test]
    fn params_parse_and_validate() {
        let p: ScanParams = serde_json::from_str(r#"{"threshold": {"block_size": 31, "k": 3}}"#).unwrap();
        assert_eq!(p.threshold.block_size, Some(31));
        assert_eq!(p.candidate_min_descendants, 10);
        assert!(p.validate().is_ok());
        let bad = ScanParams { threshold: ThresholdParams { block_size: Some(4), ..ThresholdParams::default() }, ..ScanParams::default() };
        assert!(bad.validate().is_err());
        assert!(ScanParams::for_files().bilateral.enabled);
    }
}
