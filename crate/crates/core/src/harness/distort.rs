//! Image-space stand-ins for the bent, occluded and tilted prints of the
//! robustness experiments.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::packer::Color;
use crate::raster::RasterImage;

/// Peak displacement at `omega = 1`, as a fraction of the image width.
pub const WARP_AMPLITUDE: f64 = 0.04;

/// Camera distance for [`perspective`], in image widths.
pub const CAMERA_DISTANCE: f64 = 2.0;

/// A wave `z = ω·sin(νx·x)·cos(νy·y)` over coordinates scaled so one image
/// side spans `2π`, applied as an in-plane displacement along `∇z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpSpec {
    pub omega: f64,
    pub nu_x: f64,
    pub nu_y: f64,
}

impl WarpSpec {
    pub fn new(omega: f64, nu_x: f64, nu_y: f64) -> Result<Self> {
        let spec = Self { omega, nu_x, nu_y };
        spec.validate()?;
        Ok(spec)
    }

    /// A spec with the given amplitude and random frequencies.
    pub fn random<R: Rng + ?Sized>(omega: f64, rng: &mut R) -> Result<Self> {
        Self::new(omega, rng.random_range(1.0..=2.0), rng.random_range(1.0..=2.0))
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.omega) {
            return Err(invalid("omega must lie in [0, 1]"));
        }
        if !(1.0..=2.0).contains(&self.nu_x) || !(1.0..=2.0).contains(&self.nu_y) {
            return Err(invalid("wave frequencies must lie in [1, 2]"));
        }
        Ok(())
    }

    pub fn max_displacement_px(&self, width: usize) -> f64 {
        self.omega * WARP_AMPLITUDE * width as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OcclusionSpec {
    /// Covered fraction of the image area.
    pub psi: f64,
    /// Square center, as fractions of width and height.
    pub rho_x: f64,
    pub rho_y: f64,
    pub color: Color,
}

impl OcclusionSpec {
    pub fn new(psi: f64, rho_x: f64, rho_y: f64) -> Self {
        Self { psi, rho_x, rho_y, color: Color([255, 0, 0]) }
    }

    pub fn side_px(&self, width: usize, height: usize) -> usize {
        (self.psi * (width * height) as f64).sqrt().round() as usize
    }

    /// Top-left corner and side of the square in pixels.
    pub fn square(&self, width: usize, height: usize) -> Result<(usize, usize, usize)> {
        if !(0.0..=1.0).contains(&self.psi) {
            return Err(invalid("psi must lie in [0, 1]"));
        }
        let side = self.side_px(width, height);
        let x0 = (self.rho_x * width as f64 - side as f64 / 2.0).round();
        let y0 = (self.rho_y * height as f64 - side as f64 / 2.0).round();
        if x0 < 0.0 || y0 < 0.0 || x0 as usize + side > width || y0 as usize + side > height {
            return Err(invalid("occluder must lie entirely inside the image"));
        }
        Ok((x0 as usize, y0 as usize, side))
    }

    /// A random placement keeping the square inside the image.
    pub fn random<R: Rng + ?Sized>(psi: f64, width: usize, height: usize, rng: &mut R) -> Self {
        let side = (psi * (width * height) as f64).sqrt().round();
        let mut span = |len: usize| {
            let half = (side / 2.0 + 1.0) / len as f64;
            if half >= 0.5 { 0.5 } else { rng.random_range(half..=1.0 - half) }
        };
        let rho_x = span(width);
        let rho_y = span(height);
        Self::new(psi, rho_x, rho_y)
    }
}

/// Camera tilt in degrees about the image x and y axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct PerspectiveSpec {
    phi_x: f64,
    phi_y: f64,
}

impl PerspectiveSpec {
    /// Both angles must have magnitude in `[10, 20]` degrees.
    pub fn new(phi_x: f64, phi_y: f64) -> Result<Self> {
        for phi in [phi_x, phi_y] {
            if !(10.0..=20.0).contains(&phi.abs()) {
                return Err(invalid(format!("scanning angle {phi} is outside ±[10, 20] degrees")));
            }
        }
        Ok(Self { phi_x, phi_y })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut angle = || rng.random_range(10.0..=20.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        Self { phi_x: angle(), phi_y: angle() }
    }

    pub fn phi_x(&self) -> f64 {
        self.phi_x
    }

    pub fn phi_y(&self) -> f64 {
        self.phi_y
    }
}

impl TryFrom<(f64, f64)> for PerspectiveSpec {
    type Error = crate::Error;

    fn try_from((x, y): (f64, f64)) -> Result<Self> {
        Self::new(x, y)
    }
}

impl From<PerspectiveSpec> for (f64, f64) {
    fn from(p: PerspectiveSpec) -> Self {
        (p.phi_x, p.phi_y)
    }
}

/// Bilinear sample at integer-grid coordinates, clamped to the image.
fn sample(img: &RasterImage, x: f64, y: f64, out: &mut [u8]) {
    let (w, h) = (img.width(), img.height());
    let x = x.clamp(0.0, (w - 1) as f64);
    let y = y.clamp(0.0, (h - 1) as f64);
    let (x0, y0) = (x.floor() as usize, y.floor() as usize);
    let (x1, y1) = ((x0 + 1).min(w - 1), (y0 + 1).min(h - 1));
    let (fx, fy) = (x - x0 as f64, y - y0 as f64);
    for c in 0..img.channels() {
        let p = |xx: usize, yy: usize| img.pixel(xx, yy)[c] as f64;
        let top = p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx;
        let bottom = p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx;
        out[c] = (top * (1.0 - fy) + bottom * fy).round() as u8;
    }
}

/// Output pixel `p` takes the input at `source(p)`.
fn remap(img: &RasterImage, source: impl Fn(f64, f64) -> (f64, f64) + Sync) -> RasterImage {
    use rayon::prelude::*;
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let mut data = vec![0u8; w * h * ch];
    data.par_chunks_mut(w * ch).enumerate().for_each(|(y, row)| {
        for x in 0..w {
            let (sx, sy) = source(x as f64, y as f64);
            sample(img, sx, sy, &mut row[x * ch..(x + 1) * ch]);
        }
    });
    RasterImage::new(w, h, ch, data).expect("sized buffer")
}

/// Displaces the image along the normalized gradient of a random-phase
/// wave. `omega = 0` returns the input unchanged.
pub fn warp_image<R: Rng + ?Sized>(img: &RasterImage, spec: &WarpSpec, rng: &mut R) -> RasterImage {
    let (theta_x, theta_y) = (rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
    if spec.omega == 0.0 {
        return img.clone();
    }
    let (w, h) = (img.width() as f64, img.height() as f64);
    let (kx, ky) = (spec.nu_x * TAU / w, spec.nu_y * TAU / h);
    let grad = move |x: f64, y: f64| {
        let (ax, ay) = (kx * x + theta_x, ky * y + theta_y);
        (kx * ax.cos() * ay.cos(), -ky * ax.sin() * ay.sin())
    };
    let mut peak: f64 = 0.0;
    for y in 0..img.height() {
        for x in 0..img.width() {
            let (gx, gy) = grad(x as f64, y as f64);
            peak = peak.max(gx.hypot(gy));
        }
    }
    let scale = spec.max_displacement_px(img.width()) / peak;
    remap(img, move |x, y| {
        let (gx, gy) = grad(x, y);
        (x - scale * gx, y - scale * gy)
    })
}

/// Paints the occluding square.
pub fn occlude(img: &RasterImage, spec: &OcclusionSpec) -> Result<RasterImage> {
    let (x0, y0, side) = spec.square(img.width(), img.height())?;
    let mut out = img.clone();
    for y in y0..y0 + side {
        for x in x0..x0 + side {
            out.paint(x, y, spec.color.0);
        }
    }
    Ok(out)
}

type Mat3 = [[f64; 3]; 3];

fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

fn invert(m: &Mat3) -> Mat3 {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    [
        [c(1, 2, 1, 2) / det, -c(0, 2, 1, 2) / det, c(0, 1, 1, 2) / det],
        [-c(1, 2, 0, 2) / det, c(0, 2, 0, 2) / det, -c(0, 1, 0, 2) / det],
        [c(1, 2, 0, 1) / det, -c(0, 2, 0, 1) / det, c(0, 1, 0, 1) / det],
    ]
}

fn apply(m: &Mat3, x: f64, y: f64) -> (f64, f64) {
    let z = m[2][0] * x + m[2][1] * y + m[2][2];
    ((m[0][0] * x + m[0][1] * y + m[0][2]) / z, (m[1][0] * x + m[1][1] * y + m[1][2]) / z)
}

/// Image of the plane under rotation `Rx(φx)·Ry(φy)` about its center, seen
/// by a pinhole camera at [`CAMERA_DISTANCE`] widths whose focal length
/// makes the untilted plane map onto itself.
pub(crate) fn homography(phi_x_deg: f64, phi_y_deg: f64, width: f64, height: f64) -> Mat3 {
    let (ax, ay) = (phi_x_deg.to_radians(), phi_y_deg.to_radians());
    let rx = [[1.0, 0.0, 0.0], [0.0, ax.cos(), -ax.sin()], [0.0, ax.sin(), ax.cos()]];
    let ry = [[ay.cos(), 0.0, ay.sin()], [0.0, 1.0, 0.0], [-ay.sin(), 0.0, ay.cos()]];
    let r = mul(&rx, &ry);
    let d = CAMERA_DISTANCE * width;
    // plane point (X, Y, 0) lands at R·(X, Y, 0) + (0, 0, d)
    let extrinsic = [[r[0][0], r[0][1], 0.0], [r[1][0], r[1][1], 0.0], [r[2][0], r[2][1], d]];
    let intrinsic = [[d, 0.0, width / 2.0], [0.0, d, height / 2.0], [0.0, 0.0, 1.0]];
    let center = [[1.0, 0.0, -width / 2.0], [0.0, 1.0, -height / 2.0], [0.0, 0.0, 1.0]];
    mul(&intrinsic, &mul(&extrinsic, &center))
}

/// Projective remap of a tilted view; sources outside the image are clamped
/// to its edge.
pub fn perspective(img: &RasterImage, spec: &PerspectiveSpec) -> RasterImage {
    let h = homography(spec.phi_x, spec.phi_y, img.width() as f64, img.height() as f64);
    let inv = invert(&h);
    // pixel centers sit at half-integers in the plane
    remap(img, move |x, y| {
        let (sx, sy) = apply(&inv, x + 0.5, y + 0.5);
        (sx - 0.5, sy - 0.5)
    })
}
