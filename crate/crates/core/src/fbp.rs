//! Filtered back projection.
//!
//! Filtering and backprojection are split so that optimization loops can
//! ramp-filter every projection once and re-backproject many times with
//! different angle assignments (filtering depends only on the samples).
//!
//! The ramp is the band-limited spatial-domain kernel
//! `h(0) = 1/(4 dρ²)`, `h(n) = -1/(π n dρ)²` for odd `n`, `0` for even
//! `n != 0`, applied by FFT convolution with zero padding; the optional Hann
//! variant tapers the ramp's frequency response.
//!
//! Backprojection discretizes `(1/2)∫ Q_θ dθ` over the full circle with
//! Voronoi quadrature weights — half the circular gap between each view's
//! angular neighbors — which reduces to the classical `π / N` for uniformly
//! spaced views and stays unbiased when the view density is non-uniform.
//! Pixels outside the inscribed circle are zeroed.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::image::ImageGrid;
use crate::sinogram::Sinogram;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbpFilter {
    RamLak,
    Hann,
}

impl FbpFilter {
    pub fn name(&self) -> &'static str {
        match self {
            FbpFilter::RamLak => "ramlak",
            FbpFilter::Hann => "hann",
        }
    }
}

/// Ramp-filtered projections, detached from any angle assignment.
#[derive(Debug, Clone)]
pub struct FilteredProjections {
    filtered: Vec<Vec<f64>>,
    detector_count: usize,
    detector_spacing: f64,
}

impl FilteredProjections {
    pub fn len(&self) -> usize {
        self.filtered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filtered.is_empty()
    }

    pub fn detector_count(&self) -> usize {
        self.detector_count
    }
}

fn plan_pair(len: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    let mut planner = FftPlanner::new();
    (planner.plan_fft_forward(len), planner.plan_fft_inverse(len))
}

/// Frequency response of the (optionally windowed) band-limited ramp on a
/// length-`padded` circular buffer with sample spacing `d_rho`.
fn ramp_frequency_response(padded: usize, d_rho: f64, filter: FbpFilter) -> Vec<f64> {
    let mut kernel = vec![Complex::new(0.0, 0.0); padded];
    let inv = 1.0 / (d_rho * d_rho);
    kernel[0] = Complex::new(0.25 * inv, 0.0);
    let mut n = 1usize;
    while n < padded / 2 + 1 {
        let v = -inv / (std::f64::consts::PI * n as f64).powi(2);
        kernel[n] = Complex::new(v, 0.0);
        kernel[padded - n] = Complex::new(v, 0.0);
        n += 2;
    }
    let (fwd, _) = plan_pair(padded);
    fwd.process(&mut kernel);
    let mut response: Vec<f64> = kernel.iter().map(|c| c.re).collect();
    if filter == FbpFilter::Hann {
        let half = padded / 2;
        for (k, r) in response.iter_mut().enumerate() {
            let f = if k <= half { k } else { padded - k } as f64 / half as f64;
            *r *= 0.5 * (1.0 + (std::f64::consts::PI * f).cos());
        }
    }
    response
}

/// Ramp-filter every projection of a sinogram (angles, known or not, are
/// irrelevant here).
pub fn filter_projections(sinogram: &Sinogram, filter: FbpFilter) -> FilteredProjections {
    let m = sinogram.detector_count();
    // pad to at least twice the projection length to keep the circular
    // convolution linear over the support
    let padded = (2 * m).next_power_of_two().max(64);
    let d_rho = 1.0; // filtering in detector-index units; spacing applied at use
    let response = ramp_frequency_response(padded, d_rho, filter);
    let (fwd, inv) = plan_pair(padded);
    let scale = d_rho / padded as f64; // conv * d_rho, fft unnormalized
    let filtered: Vec<Vec<f64>> = sinogram
        .projections()
        .par_iter()
        .map(|p| {
            let mut buf = vec![Complex::new(0.0, 0.0); padded];
            for (k, &v) in p.samples().iter().enumerate() {
                buf[k] = Complex::new(v, 0.0);
            }
            fwd.process(&mut buf);
            for (b, r) in buf.iter_mut().zip(&response) {
                *b *= r;
            }
            inv.process(&mut buf);
            buf[..m].iter().map(|c| c.re * scale).collect()
        })
        .collect();
    FilteredProjections {
        filtered,
        detector_count: m,
        detector_spacing: 1.0,
    }
}

/// A single view's quadrature weight may exceed the uniform share `π / N`
/// by at most this factor. Uncapped Voronoi weights make lone views in
/// sparsely covered sectors dominate the image, which amplifies any error
/// in their assigned angles.
const VIEW_WEIGHT_CAP: f64 = 2.0;

/// Quadrature weight per view for `(1/2)∫ Q_θ dθ`: half the circular
/// Voronoi gap around each angle, capped at a small multiple of the uniform
/// share. Uniformly spaced angles get exactly `π / N` each.
fn view_quadrature_weights(angles: &[f64]) -> Vec<f64> {
    let n = angles.len();
    let tau = std::f64::consts::TAU;
    if n == 1 {
        return vec![std::f64::consts::PI];
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        crate::wrap_angle(angles[a])
            .partial_cmp(&crate::wrap_angle(angles[b]))
            .expect("finite angles")
    });
    let sorted: Vec<f64> = order.iter().map(|&i| crate::wrap_angle(angles[i])).collect();
    // forward gap from each sorted view to the next; the last wraps around,
    // so the gaps always sum to 2π and duplicated angles get zero-width
    // slices of the shared cell
    let forward: Vec<f64> = (0..n)
        .map(|k| {
            let d = sorted[(k + 1) % n] - sorted[k];
            if k + 1 == n {
                d.rem_euclid(tau)
            } else {
                d.max(0.0)
            }
        })
        .collect();
    let cap = VIEW_WEIGHT_CAP * std::f64::consts::PI / n as f64;
    let mut weights = vec![0.0; n];
    for k in 0..n {
        let d_prev = forward[(k + n - 1) % n];
        let d_next = forward[k];
        // half the Voronoi cell, then the 1/2 of the full-circle integral
        weights[order[k]] = (0.25 * (d_prev + d_next)).min(cap);
    }
    weights
}

/// Backproject a subset of filtered projections at the given angles.
///
/// `subset[i]` indexes into `filtered`; `angles[i]` is the view angle for
/// that projection. The output is `output_size` pixels per side covering the
/// same world extent as the detector array.
pub fn backproject_subset(
    filtered: &FilteredProjections,
    subset: &[usize],
    angles: &[f64],
    output_size: usize,
) -> Result<ImageGrid> {
    if subset.len() != angles.len() || subset.is_empty() {
        return Err(Error::InvalidInput(
            "backprojection needs one angle per selected projection".into(),
        ));
    }
    if output_size < 2 {
        return Err(Error::InvalidInput(format!(
            "output_size must be >= 2, got {output_size}"
        )));
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= filtered.filtered.len()) {
        return Err(Error::InvalidInput(format!(
            "projection index {bad} out of range"
        )));
    }
    let m = filtered.detector_count;
    let d_rho = filtered.detector_spacing;
    let width = m as f64 * d_rho;
    let out_spacing = width / output_size as f64;
    let c_out = (output_size as f64 - 1.0) / 2.0;
    let det_center = (m as f64 - 1.0) / 2.0;
    let weights = view_quadrature_weights(angles);
    let trig: Vec<(f64, f64)> = angles.iter().map(|a| a.sin_cos()).collect();
    let r2 = (output_size as f64 / 2.0) * (output_size as f64 / 2.0);

    let rows: Vec<Vec<f64>> = (0..output_size)
        .into_par_iter()
        .map(|i| {
            let y = (i as f64 - c_out) * out_spacing;
            let mut row = vec![0.0; output_size];
            for (j, out) in row.iter_mut().enumerate() {
                let xi = j as f64 - c_out;
                let yi = i as f64 - c_out;
                if xi * xi + yi * yi > r2 {
                    continue;
                }
                let x = xi * out_spacing;
                let mut acc = 0.0;
                for ((t, &idx), &w) in trig.iter().zip(subset).zip(&weights) {
                    let (sin_t, cos_t) = *t;
                    let rho = x * cos_t + y * sin_t;
                    let u = rho / d_rho + det_center;
                    if u < 0.0 || u > (m - 1) as f64 {
                        continue;
                    }
                    let u0 = u.floor();
                    let frac = u - u0;
                    let q = &filtered.filtered[idx];
                    let k = u0 as usize;
                    let v = if k + 1 < m {
                        (1.0 - frac) * q[k] + frac * q[k + 1]
                    } else {
                        q[k]
                    };
                    acc += w * v;
                }
                *out = acc;
            }
            row
        })
        .collect();

    let mut pixels = Vec::with_capacity(output_size * output_size);
    for row in rows {
        pixels.extend(row);
    }
    ImageGrid::new(output_size, pixels, out_spacing)
}

/// Classical FBP: every projection must carry an angle.
pub fn fbp_reconstruct(
    sinogram: &Sinogram,
    filter: FbpFilter,
    output_size: usize,
) -> Result<ImageGrid> {
    let angles = sinogram.angles().ok_or_else(|| {
        Error::InvalidInput("FBP requires an angle on every projection".into())
    })?;
    let filtered = filter_projections(sinogram, filter);
    let subset: Vec<usize> = (0..sinogram.len()).collect();
    backproject_subset(&filtered, &subset, &angles, output_size)
}
