//! Structured scenes without codes: checkerboards, blobs and glyph rows.

use rand::Rng;

use crate::raster::RasterImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Checkerboard,
    Blobs,
    Glyphs,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [NoiseKind::Checkerboard, NoiseKind::Blobs, NoiseKind::Glyphs];
}

fn contrasting_pair<R: Rng + ?Sized>(rng: &mut R) -> (u8, u8) {
    let dark = rng.random_range(0..90);
    let light = rng.random_range(170..=255);
    if rng.random_bool(0.5) { (dark, light) } else { (light, dark) }
}

/// A gray image of the given kind.
pub fn structured_noise<R: Rng + ?Sized>(kind: NoiseKind, width: usize, height: usize, rng: &mut R) -> RasterImage {
    let (ink, paper) = contrasting_pair(rng);
    let mut img = RasterImage::filled_gray(width, height, paper);
    match kind {
        NoiseKind::Checkerboard => {
            let cell = rng.random_range(6..48usize);
            let (ox, oy) = (rng.random_range(0..cell), rng.random_range(0..cell));
            let angle: f64 = rng.random_range(-0.6..0.6);
            let (s, c) = angle.sin_cos();
            for y in 0..height {
                for x in 0..width {
                    let (fx, fy) = (x as f64 + ox as f64, y as f64 + oy as f64);
                    let (u, v) = (c * fx + s * fy, -s * fx + c * fy);
                    if ((u / cell as f64).floor() + (v / cell as f64).floor()) as i64 % 2 == 0 {
                        img.set_pixel(x, y, &[ink]);
                    }
                }
            }
        }
        NoiseKind::Blobs => {
            let count = rng.random_range(20..120);
            let scale = width.min(height) as f64;
            for _ in 0..count {
                let (cx, cy) = (rng.random_range(0.0..width as f64), rng.random_range(0.0..height as f64));
                let (rx, ry) = (rng.random_range(0.01..0.12) * scale, rng.random_range(0.01..0.12) * scale);
                // some blobs are rings, and rings may hold a dot
                let ring = rng.random_bool(0.3).then(|| rng.random_range(0.3..0.8));
                let dot = ring.is_some() && rng.random_bool(0.5);
                let color = if rng.random_bool(0.7) { ink } else { paper };
                for y in (cy - ry).max(0.0) as usize..((cy + ry) as usize + 1).min(height) {
                    for x in (cx - rx).max(0.0) as usize..((cx + rx) as usize + 1).min(width) {
                        let d = ((x as f64 - cx) / rx).powi(2) + ((y as f64 - cy) / ry).powi(2);
                        let inside = match ring {
                            Some(inner) => d <= 1.0 && (d >= inner * inner || (dot && d <= 0.04)),
                            None => d <= 1.0,
                        };
                        if inside {
                            img.set_pixel(x, y, &[color]);
                        }
                    }
                }
            }
        }
        NoiseKind::Glyphs => {
            let size = rng.random_range(8..28usize);
            let (gw, gh) = (5usize, 7usize);
            let px = (size / gh).max(1);
            let mut y0 = rng.random_range(0..size);
            while y0 + gh * px < height {
                let mut x0 = rng.random_range(0..size);
                while x0 + gw * px < width {
                    if rng.random_bool(0.85) {
                        let bitmap: Vec<bool> = (0..gw * gh).map(|_| rng.random_bool(0.45)).collect();
                        for gy in 0..gh {
                            for gx in 0..gw {
                                if bitmap[gy * gw + gx] {
                                    for y in y0 + gy * px..y0 + (gy + 1) * px {
                                        for x in x0 + gx * px..x0 + (gx + 1) * px {
                                            img.set_pixel(x, y, &[ink]);
                                        }
                                    }
                                }
                            }
                        }
                    }
                    x0 += (gw + 1) * px;
                }
                y0 += (gh + 2) * px;
            }
        }
    }
    img
}
