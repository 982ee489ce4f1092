//! Reconstruction and angle-estimate quality measures.
//!
//! Reconstructions from unknown views are identifiable only up to a global
//! rotation and reflection, so image metrics are normally taken after
//! aligning the estimate to the reference: by the offset recovered from
//! angle estimates when ground-truth angles exist, else by an exhaustive
//! 1-degree rotation/reflection search maximizing the correlation
//! coefficient.

use crate::circular_distance;
use crate::error::{Error, Result};
use crate::image::ImageGrid;
use crate::wrap_angle;

/// How an estimated angle sequence maps onto the reference:
/// `aligned_i = wrap(s * est_i + rotation)` with `s = -1` when `reflected`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alignment {
    pub rotation: f64,
    pub reflected: bool,
}

impl Alignment {
    pub fn identity() -> Self {
        Alignment {
            rotation: 0.0,
            reflected: false,
        }
    }

    pub fn apply(&self, angle: f64) -> f64 {
        let s = if self.reflected { -1.0 } else { 1.0 };
        wrap_angle(s * angle + self.rotation)
    }
}

#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub rrmse: f64,
    pub cc: f64,
    pub ssim: f64,
    pub mad_degrees: Option<f64>,
    pub alignment: Alignment,
}

impl MetricsReport {
    /// Slash-separated `RRMSE/CC/SSIM` triplet, two decimals.
    pub fn triplet(&self) -> String {
        format!("{:.2}/{:.2}/{:.2}", self.rrmse, self.cc, self.ssim)
    }
}

fn check_same_size(est: &ImageGrid, gt: &ImageGrid) -> Result<()> {
    if est.size() != gt.size() {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", gt.size()),
            actual: format!("{0}x{0}", est.size()),
        });
    }
    Ok(())
}

/// `‖est - gt‖₂ / ‖gt‖₂`
pub fn rrmse(est: &ImageGrid, gt: &ImageGrid) -> Result<f64> {
    check_same_size(est, gt)?;
    let den = gt.l2_norm();
    if den == 0.0 {
        return Err(Error::UndefinedMetric("RRMSE against all-zero reference".into()));
    }
    let num: f64 = est
        .pixels()
        .iter()
        .zip(gt.pixels())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(num / den)
}

/// Pearson correlation over pixels.
pub fn correlation(est: &ImageGrid, gt: &ImageGrid) -> Result<f64> {
    check_same_size(est, gt)?;
    let n = est.pixels().len() as f64;
    let mu_e: f64 = est.pixels().iter().sum::<f64>() / n;
    let mu_g: f64 = gt.pixels().iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_e = 0.0;
    let mut var_g = 0.0;
    for (&e, &g) in est.pixels().iter().zip(gt.pixels()) {
        cov += (e - mu_e) * (g - mu_g);
        var_e += (e - mu_e) * (e - mu_e);
        var_g += (g - mu_g) * (g - mu_g);
    }
    if var_e == 0.0 || var_g == 0.0 {
        return Err(Error::UndefinedMetric(
            "correlation with a constant image".into(),
        ));
    }
    Ok(cov / (var_e * var_g).sqrt())
}

const SSIM_WINDOW: usize = 7;
const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_C1: f64 = 0.01 * 0.01;
pub const SSIM_C2: f64 = 0.03 * 0.03;

fn gaussian_window() -> [f64; SSIM_WINDOW * SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW * SSIM_WINDOW];
    let c = (SSIM_WINDOW as f64 - 1.0) / 2.0;
    let mut sum = 0.0;
    for i in 0..SSIM_WINDOW {
        for j in 0..SSIM_WINDOW {
            let dy = i as f64 - c;
            let dx = j as f64 - c;
            let v = (-(dx * dx + dy * dy) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
            w[i * SSIM_WINDOW + j] = v;
            sum += v;
        }
    }
    for v in &mut w {
        *v /= sum;
    }
    w
}

/// Mean local SSIM with a 7x7 Gaussian window (σ = 1.5) and the standard
/// stabilizers on unit dynamic range. Inputs are min-max rescaled to
/// `[0, 1]` internally, each on its own range.
pub fn ssim(est: &ImageGrid, gt: &ImageGrid) -> Result<f64> {
    check_same_size(est, gt)?;
    let s = est.size();
    if s < SSIM_WINDOW {
        return Err(Error::InvalidInput(format!(
            "SSIM needs images of side >= {SSIM_WINDOW}"
        )));
    }
    let a = est.rescaled_unit();
    let b = gt.rescaled_unit();
    let w = gaussian_window();
    let mut total = 0.0;
    let mut count = 0usize;
    for i0 in 0..=(s - SSIM_WINDOW) {
        for j0 in 0..=(s - SSIM_WINDOW) {
            let mut mu_a = 0.0;
            let mut mu_b = 0.0;
            let mut aa = 0.0;
            let mut bb = 0.0;
            let mut ab = 0.0;
            for i in 0..SSIM_WINDOW {
                for j in 0..SSIM_WINDOW {
                    let wv = w[i * SSIM_WINDOW + j];
                    let va = a.get(i0 + i, j0 + j);
                    let vb = b.get(i0 + i, j0 + j);
                    mu_a += wv * va;
                    mu_b += wv * vb;
                    aa += wv * va * va;
                    bb += wv * vb * vb;
                    ab += wv * va * vb;
                }
            }
            let var_a = aa - mu_a * mu_a;
            let var_b = bb - mu_b * mu_b;
            let cov = ab - mu_a * mu_b;
            let num = (2.0 * mu_a * mu_b + SSIM_C1) * (2.0 * cov + SSIM_C2);
            let den = (mu_a * mu_a + mu_b * mu_b + SSIM_C1) * (var_a + var_b + SSIM_C2);
            total += num / den;
            count += 1;
        }
    }
    Ok(total / count as f64)
}

/// Mean absolute circular difference (degrees) between estimated and true
/// angles, minimized over a global rotation and reflection of the estimated
/// sequence. Both slices are indexed by the same projection.
pub fn mad_angles(est: &[f64], gt: &[f64]) -> Result<(f64, Alignment)> {
    if est.len() != gt.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} angles", gt.len()),
            actual: format!("{}", est.len()),
        });
    }
    if est.is_empty() {
        return Err(Error::InvalidInput("no angles to compare".into()));
    }
    let mut best = (f64::INFINITY, Alignment::identity());
    for reflected in [false, true] {
        let s = if reflected { -1.0 } else { 1.0 };
        // candidate rotations: those aligning some pair exactly
        for anchor in 0..est.len() {
            let rotation = wrap_angle(gt[anchor] - s * est[anchor]);
            let a = Alignment { rotation, reflected };
            let mean: f64 = est
                .iter()
                .zip(gt)
                .map(|(&e, &g)| circular_distance(a.apply(e), g))
                .sum::<f64>()
                / est.len() as f64;
            if mean < best.0 {
                best = (mean, a);
            }
        }
    }
    Ok((best.0.to_degrees(), best.1))
}

/// Undo the rotation/reflection implied by an angle alignment on the
/// reconstructed image: if the estimate's angles relate to the truth by
/// `θ̂ = s·θ + δ`, the reconstruction is the truth rotated by δ (and
/// mirrored when `s = -1`), so we invert that here.
pub fn align_image(est: &ImageGrid, alignment: &Alignment) -> ImageGrid {
    if alignment.reflected {
        // est = rot_δ(flip(gt))  =>  gt = flip(rot_{-δ}(est))
        est.rotated(-alignment.rotation, false).rotated(0.0, true)
    } else {
        est.rotated(-alignment.rotation, false)
    }
}

/// Exhaustive 1-degree rotation (and reflection) search maximizing CC.
pub fn align_by_cc_search(est: &ImageGrid, gt: &ImageGrid) -> Result<(ImageGrid, Alignment)> {
    check_same_size(est, gt)?;
    let mut best: Option<(f64, ImageGrid, Alignment)> = None;
    for reflected in [false, true] {
        for deg in 0..360 {
            let alignment = Alignment {
                rotation: (deg as f64).to_radians(),
                reflected,
            };
            let candidate = align_image(est, &alignment);
            let cc = correlation(&candidate, gt).unwrap_or(-2.0);
            if best.as_ref().map_or(true, |(b, _, _)| cc > *b) {
                best = Some((cc, candidate, alignment));
            }
        }
    }
    let (_, img, alignment) = best.expect("search space is nonempty");
    Ok((img, alignment))
}

/// How to quotient out the rotation/reflection ambiguity before comparing.
#[derive(Debug, Clone)]
pub enum AlignMode<'a> {
    /// Compare as-is.
    None,
    /// Use the alignment recovered from (estimated, true) angle sequences.
    ByAngles {
        est_angles: &'a [f64],
        gt_angles: &'a [f64],
    },
    /// 1-degree exhaustive rotation/reflection search maximizing CC.
    BySearch,
}

/// Full report: align per `mode`, then RRMSE / CC / SSIM (and MAD when
/// angles were provided).
pub fn report(est: &ImageGrid, gt: &ImageGrid, mode: AlignMode) -> Result<MetricsReport> {
    let (aligned, alignment, mad) = match mode {
        AlignMode::None => (est.clone(), Alignment::identity(), None),
        AlignMode::ByAngles {
            est_angles,
            gt_angles,
        } => {
            let (mad, alignment) = mad_angles(est_angles, gt_angles)?;
            (align_image(est, &alignment), alignment, Some(mad))
        }
        AlignMode::BySearch => {
            let (img, alignment) = align_by_cc_search(est, gt)?;
            (img, alignment, None)
        }
    };
    Ok(MetricsReport {
        rrmse: rrmse(&aligned, gt)?,
        cc: correlation(&aligned, gt)?,
        ssim: ssim(&aligned, gt)?,
        mad_degrees: mad,
        alignment,
    })
}
