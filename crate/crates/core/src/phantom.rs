//! Deterministic test phantoms and grayscale file loading.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::image::ImageGrid;
use crate::pgm::read_pgm;

#[derive(Debug, Clone, PartialEq)]
pub enum PhantomKind {
    /// Centered binary disk of radius `size / 4` pixels.
    Disk,
    /// Modified Shepp-Logan head phantom (ten ellipses, values in `[0, 1]`).
    SheppLogan,
    /// Smooth sum of anisotropic Gaussian blobs with no mirror symmetry.
    ///
    /// Shepp-Logan is almost symmetric about its vertical axis, which makes
    /// projections at θ and π-θ nearly identical and angular ordering
    /// ill-posed; this phantom stands in for the asymmetric specimens that
    /// unknown-view pipelines actually face.
    Blobs,
    /// Square grayscale PGM from disk, values scaled to `[0, 1]`.
    FromFile(PathBuf),
}

/// `(intensity, semi_axis_a, semi_axis_b, x0, y0, rotation_deg)` in the
/// unit square `[-1, 1]^2`; the value at a point is the sum of intensities
/// of the ellipses containing it.
const SHEPP_LOGAN_ELLIPSES: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0),
    (-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0),
    (-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0),
    (0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0),
    (0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0),
    (0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0),
    (0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0),
    (0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0),
    (0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0),
];

/// `(x0, y0, sigma_x, sigma_y, rotation, amplitude)` in unit coordinates.
const BLOB_TABLE: [(f64, f64, f64, f64, f64, f64); 5] = [
    (0.35, 0.1, 0.18, 0.30, 0.4, 1.0),
    (-0.3, -0.25, 0.25, 0.12, 1.1, 0.8),
    (-0.05, 0.4, 0.10, 0.10, 0.0, 0.6),
    (0.1, -0.45, 0.22, 0.08, 2.3, 0.9),
    (-0.45, 0.3, 0.08, 0.16, 0.9, 0.7),
];

pub fn make_phantom(kind: &PhantomKind, size: usize) -> Result<ImageGrid> {
    match kind {
        PhantomKind::Disk => disk(size),
        PhantomKind::SheppLogan => shepp_logan(size),
        PhantomKind::Blobs => blobs(size),
        PhantomKind::FromFile(path) => {
            let img = read_pgm(path)?;
            // already in [0, 1]; stretch to full range for comparability
            Ok(img.rescaled_unit())
        }
    }
}

fn disk(size: usize) -> Result<ImageGrid> {
    let mut img = ImageGrid::zeros(size)?;
    let c = img.center();
    let r2 = (size as f64 / 4.0) * (size as f64 / 4.0);
    let s = img.size();
    let px = img.pixels_mut();
    for i in 0..s {
        let y = i as f64 - c;
        for j in 0..s {
            let x = j as f64 - c;
            if x * x + y * y <= r2 {
                px[i * s + j] = 1.0;
            }
        }
    }
    Ok(img)
}

fn shepp_logan(size: usize) -> Result<ImageGrid> {
    if size < 16 {
        return Err(Error::InvalidInput(format!(
            "shepp_logan needs size >= 16, got {size}"
        )));
    }
    let mut img = ImageGrid::zeros(size)?;
    let c = img.center();
    let half = size as f64 / 2.0;
    let s = img.size();
    let px = img.pixels_mut();
    for i in 0..s {
        let v = (i as f64 - c) / half;
        for j in 0..s {
            let u = (j as f64 - c) / half;
            let mut val = 0.0;
            for &(a, sa, sb, x0, y0, phi_deg) in &SHEPP_LOGAN_ELLIPSES {
                let phi = phi_deg.to_radians();
                let (sp, cp) = phi.sin_cos();
                let du = u - x0;
                let dv = v - y0;
                let ur = cp * du + sp * dv;
                let vr = -sp * du + cp * dv;
                if (ur / sa) * (ur / sa) + (vr / sb) * (vr / sb) <= 1.0 {
                    val += a;
                }
            }
            px[i * s + j] = val.max(0.0);
        }
    }
    let (_, hi) = img.min_max();
    if hi > 0.0 {
        for v in img.pixels_mut() {
            *v /= hi;
        }
    }
    Ok(img)
}

fn blobs(size: usize) -> Result<ImageGrid> {
    let mut img = ImageGrid::zeros(size)?;
    let c = img.center();
    let half = size as f64 / 2.0;
    let s = img.size();
    let px = img.pixels_mut();
    for i in 0..s {
        let y = (i as f64 - c) / half;
        for j in 0..s {
            let x = (j as f64 - c) / half;
            let mut v = 0.0;
            for &(x0, y0, sx, sy, rot, amp) in &BLOB_TABLE {
                let (sr, cr) = rot.sin_cos();
                let dx = x - x0;
                let dy = y - y0;
                let u = cr * dx + sr * dy;
                let w = -sr * dx + cr * dy;
                v += amp * (-(u * u) / (2.0 * sx * sx) - (w * w) / (2.0 * sy * sy)).exp();
            }
            px[i * s + j] = v;
        }
    }
    let (_, hi) = img.min_max();
    if hi > 0.0 {
        for v in img.pixels_mut() {
            *v /= hi;
        }
    }
    Ok(img)
}
