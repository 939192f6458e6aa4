//! Grayscale conversion, edge-preserving smoothing and binarization.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::raster::{luma, BinaryImage, RasterImage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BilateralParams {
    pub enabled: bool,
    /// Half-width of the square window, in pixels.
    pub radius: usize,
    pub sigma_spatial: f64,
    pub sigma_range: f64,
}

impl Default for BilateralParams {
    fn default() -> Self {
        Self { enabled: false, radius: 4, sigma_spatial: 3.0, sigma_range: 30.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdParams {
    /// Odd window side; `None` picks the odd number nearest to
    /// `max(width, height) / 20`.
    pub block_size: Option<usize>,
    /// Offset subtracted from the local mean.
    pub k: f64,
    /// Windows whose standard deviation is below this value carry no edge;
    /// their pixels are compared against the global Otsu level instead.
    /// Zero disables the fallback.
    pub flat_contrast: f64,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        Self { block_size: None, k: 5.0, flat_contrast: 40.0 }
    }
}

impl ThresholdParams {
    pub fn block_size_for(&self, width: usize, height: usize) -> usize {
        self.block_size.unwrap_or_else(|| {
            let target = width.max(height) as f64 / 20.0;
            let odd = 2.0 * ((target - 1.0) / 2.0).round() + 1.0;
            (odd as usize).max(3)
        })
    }
}

/// Luma of each pixel; gray input is returned unchanged.
pub fn to_grayscale(img: &RasterImage) -> RasterImage {
    if img.channels() == 1 {
        return img.clone();
    }
    let data = img.data().chunks_exact(3).map(|c| luma([c[0], c[1], c[2]])).collect();
    RasterImage::new(img.width(), img.height(), 1, data).expect("sized buffer")
}

/// Gaussian bilateral filter with clamped borders. Identity when disabled.
pub fn bilateral_filter(img: &RasterImage, params: &BilateralParams) -> RasterImage {
    assert_eq!(img.channels(), 1, "bilateral filter expects a gray image");
    if !params.enabled || params.radius == 0 {
        return img.clone();
    }
    let (w, h) = (img.width(), img.height());
    let r = params.radius as isize;
    let side = 2 * params.radius + 1;
    let spatial: Vec<f64> = (-r..=r)
        .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
        .map(|(dx, dy)| (-((dx * dx + dy * dy) as f64) / (2.0 * params.sigma_spatial.powi(2))).exp())
        .collect();
    let range: Vec<f64> = (0..256).map(|d| (-((d * d) as f64) / (2.0 * params.sigma_range.powi(2))).exp()).collect();
    let src = img.data();
    let clamp = |v: isize, hi: usize| v.clamp(0, hi as isize - 1) as usize;

    let mut out = vec![0u8; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, px) in row.iter_mut().enumerate() {
            let center = src[y * w + x] as isize;
            let (mut num, mut den) = (0.0, 0.0);
            for dy in -r..=r {
                let sy = clamp(y as isize + dy, h);
                for dx in -r..=r {
                    let sx = clamp(x as isize + dx, w);
                    let v = src[sy * w + sx] as isize;
                    let weight = spatial[(dy + r) as usize * side + (dx + r) as usize] * range[(v - center).unsigned_abs()];
                    num += weight * v as f64;
                    den += weight;
                }
            }
            *px = (num / den).round() as u8;
        }
    });
    RasterImage::new(w, h, 1, out).expect("sized buffer")
}

/// Otsu's level: pixels strictly above it form the bright class. The first
/// maximizer is taken, so the level is always a value present in the image.
pub fn otsu_level(img: &RasterImage) -> u8 {
    let mut hist = [0u64; 256];
    for &v in img.data() {
        hist[v as usize] += 1;
    }
    let total: u64 = hist.iter().sum();
    let sum_all: f64 = hist.iter().enumerate().map(|(v, &c)| v as f64 * c as f64).sum();
    let (mut below, mut sum_below) = (0u64, 0.0);
    let (mut best, mut level) = (-1.0, 0u8);
    for t in 0..256 {
        below += hist[t];
        sum_below += t as f64 * hist[t] as f64;
        if hist[t] == 0 || below == total {
            continue;
        }
        let above = total - below;
        let m0 = sum_below / below as f64;
        let m1 = (sum_all - sum_below) / above as f64;
        let between = below as f64 * above as f64 * (m0 - m1).powi(2);
        if between > best {
            best = between;
            level = t as u8;
        }
    }
    level
}

/// Summed-area table with a zero first row and column.
struct Integral {
    width: usize,
    sum: Vec<f64>,
    sq: Vec<f64>,
}

impl Integral {
    fn new(img: &RasterImage) -> Self {
        let (w, h) = (img.width(), img.height());
        let stride = w + 1;
        let mut sum = vec![0.0; stride * (h + 1)];
        let mut sq = vec![0.0; stride * (h + 1)];
        for y in 0..h {
            let (mut row, mut row_sq) = (0.0, 0.0);
            for x in 0..w {
                let v = img.data()[y * w + x] as f64;
                row += v;
                row_sq += v * v;
                sum[(y + 1) * stride + x + 1] = sum[y * stride + x + 1] + row;
                sq[(y + 1) * stride + x + 1] = sq[y * stride + x + 1] + row_sq;
            }
        }
        Self { width: w, sum, sq }
    }

    /// Sum and sum of squares over `[x0, x1) × [y0, y1)`.
    fn window(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> (f64, f64) {
        let s = self.width + 1;
        let at = |t: &[f64]| t[y1 * s + x1] - t[y0 * s + x1] - t[y1 * s + x0] + t[y0 * s + x0];
        (at(&self.sum), at(&self.sq))
    }
}

/// `B(x, y) = 1` iff `I(x, y) > mean − K` over the block clipped to the
/// image, except in windows flatter than `flat_contrast`, where the global
/// Otsu level decides.
pub fn adaptive_threshold(img: &RasterImage, params: &ThresholdParams) -> BinaryImage {
    assert_eq!(img.channels(), 1, "thresholding expects a gray image");
    let (w, h) = (img.width(), img.height());
    let block = params.block_size_for(w, h);
    assert!(block >= 3 && block % 2 == 1, "block size must be odd and at least 3");
    let half = block / 2;
    let table = Integral::new(img);
    let level = if params.flat_contrast > 0.0 { otsu_level(img) as f64 } else { 0.0 };
    let flat = params.flat_contrast * params.flat_contrast;

    let mut out = BinaryImage::new(w, h);
    let rows: Vec<Vec<bool>> = (0..h)
        .into_par_iter()
        .map(|y| {
            let (y0, y1) = (y.saturating_sub(half), (y + half + 1).min(h));
            (0..w)
                .map(|x| {
                    let (x0, x1) = (x.saturating_sub(half), (x + half + 1).min(w));
                    let n = ((x1 - x0) * (y1 - y0)) as f64;
                    let (sum, sq) = table.window(x0, y0, x1, y1);
                    let v = img.data()[y * w + x] as f64;
                    if params.flat_contrast > 0.0 && sq * n - sum * sum < flat * n * n {
                        v > level
                    } else {
                        (v + params.k) * n > sum
                    }
                })
                .collect()
        })
        .collect();
    for (y, row) in rows.into_iter().enumerate() {
        for (x, b) in row.into_iter().enumerate() {
            out.set(x, y, b);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn exact(block: usize, k: f64) -> ThresholdParams {
        ThresholdParams { block_size: Some(block), k, flat_contrast: 0.0 }
    }

    fn disk(size: usize, r: f64, inside: u8, outside: u8) -> RasterImage {
        let c = size as f64 / 2.0;
        RasterImage::from_fn_gray(size, size, |x, y| {
            let d = ((x as f64 + 0.5 - c).powi(2) + (y as f64 + 0.5 - c).powi(2)).sqrt();
            if d < r { inside } else { outside }
        })
    }

    #[test]
    fn grayscale_conversion() {
        let rgb = RasterImage::new(2, 1, 3, vec![255, 255, 255, 255, 0, 0]).unwrap();
        let g = to_grayscale(&rgb);
        assert_eq!(g.data(), &[255, 76]);
        assert_eq!(to_grayscale(&g), g);
    }

    #[test]
    fn block_size_defaults() {
        let p = ThresholdParams::default();
        assert_eq!(p.block_size_for(1024, 1024), 51);
        assert_eq!(p.block_size_for(100, 40), 5);
        assert_eq!(p.block_size_for(20, 20), 3);
    }

    #[test]
    fn bilateral_keeps_constants_and_is_optional() {
        let flat = RasterImage::filled_gray(20, 20, 77);
        let on = BilateralParams { enabled: true, ..BilateralParams::default() };
        assert_eq!(bilateral_filter(&flat, &on), flat);
        let noisy = RasterImage::from_fn_gray(9, 9, |x, y| (x * 31 + y * 17) as u8);
        assert_eq!(bilateral_filter(&noisy, &BilateralParams::default()), noisy);
    }

    #[test]
    fn bilateral_denoises_but_keeps_the_edge() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (w, h) = (64, 48);
        let clean = |x: usize| if x < 32 { 60.0 } else { 190.0 };
        let mut noisy = RasterImage::filled_gray(w, h, 0);
        for y in 0..h {
            for x in 0..w {
                let n: f64 = (0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0;
                noisy.set_pixel(x, y, &[(clean(x) + 8.0 * n).round().clamp(0.0, 255.0) as u8]);
            }
        }
        let params = BilateralParams { enabled: true, ..BilateralParams::default() };
        let out = bilateral_filter(&noisy, &params);
        let std = |img: &RasterImage| {
            let vals: Vec<f64> = (0..h).flat_map(|y| (4..24).map(move |x| (x, y))).map(|(x, y)| img.pixel(x, y)[0] as f64).collect();
            let m = vals.iter().sum::<f64>() / vals.len() as f64;
            (vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / vals.len() as f64).sqrt()
        };
        assert!(std(&noisy) > 2.0 * std(&out), "{} vs {}", std(&noisy), std(&out));
        for y in 0..h {
            // the largest jump in each row stays at the true edge
            let jump = (1..w).max_by_key(|&x| (out.pixel(x, y)[0] as i32 - out.pixel(x - 1, y)[0] as i32).abs()).unwrap();
            assert!((jump as isize - 32).abs() <= 1, "row {y}: edge at {jump}");
        }
    }

    #[test]
    fn constant_images_follow_the_sign_of_k() {
        let flat = RasterImage::filled_gray(30, 30, 120);
        assert_eq!(adaptive_threshold(&flat, &exact(5, 5.0)).count_ones(), 900);
        assert_eq!(adaptive_threshold(&flat, &exact(5, -5.0)).count_ones(), 0);
    }

    #[test]
    fn matches_a_direct_mean_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut img = RasterImage::filled_gray(23, 17, 0);
        for v in img.data_mut() {
            *v = rng.random();
        }
        for (block, k) in [(3, 0.0), (5, 7.0), (9, -3.0), (31, 5.0)] {
            let b = adaptive_threshold(&img, &exact(block, k));
            let half = block as isize / 2;
            for y in 0..17isize {
                for x in 0..23isize {
                    let mut vals = Vec::new();
                    for yy in (y - half).max(0)..=(y + half).min(16) {
                        for xx in (x - half).max(0)..=(x + half).min(22) {
                            vals.push(img.pixel(xx as usize, yy as usize)[0] as f64);
                        }
                    }
                    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                    let v = img.pixel(x as usize, y as usize)[0] as f64;
                    assert_eq!(b.get(x as usize, y as usize), v > mean - k);
                }
            }
        }
    }

    #[test]
    fn black_disk_on_white() {
        let img = disk(101, 30.0, 0, 255);
        let b = adaptive_threshold(&img, &ThresholdParams::default());
        for y in 0..101 {
            for x in 0..101 {
                let d = ((x as f64 + 0.5 - 50.5).powi(2) + (y as f64 + 0.5 - 50.5).powi(2)).sqrt();
                if d < 29.0 {
                    assert!(!b.get(x, y), "inside at {x},{y}");
                } else if d > 31.0 {
                    assert!(b.get(x, y), "outside at {x},{y}");
                }
            }
        }
        // without the flat fallback the disk's core flips to one
        let plain = adaptive_threshold(&img, &exact(5, 5.0));
        assert!(plain.get(50, 50));
    }

    #[test]
    fn affine_intensity_changes_commute() {
        let base = RasterImage::from_fn_gray(64, 64, |x, y| {
            let ring = ((x as f64 - 30.0).powi(2) + (y as f64 - 34.0).powi(2)).sqrt();
            let v = if (ring as usize / 6) % 2 == 0 { 20 } else { 100 };
            (v + (x * 7 + y * 3) % 9) as u8
        });
        for (a, b) in [(2.0, 10.0), (1.0, 60.0), (2.0, 0.0)] {
            let mapped = RasterImage::from_fn_gray(64, 64, |x, y| (a * base.pixel(x, y)[0] as f64 + b) as u8);
            for flat in [0.0, 12.0] {
                let p = ThresholdParams { block_size: Some(9), k: 5.0, flat_contrast: flat };
                let q = ThresholdParams { k: a * 5.0, flat_contrast: a * flat, ..p.clone() };
                assert_eq!(adaptive_threshold(&base, &p), adaptive_threshold(&mapped, &q));
            }
        }
    }

    #[test]
    fn otsu_splits_two_levels() {
        let img = RasterImage::from_fn_gray(10, 10, |x, _| if x < 3 { 40 } else { 200 });
        assert_eq!(otsu_level(&img), 40);
        assert_eq!(otsu_level(&RasterImage::filled_gray(4, 4, 9)), 0);
    }
}
