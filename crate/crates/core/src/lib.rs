//! Reconstruction of a 2D image from unordered, noisy 1D parallel-beam
//! projections taken at unknown angles drawn from an unknown distribution.
//!
//! The pipeline:
//!
//! 1. [`radon`] / [`fbp`] — forward projection and filtered back projection.
//! 2. [`noise`] / [`pca`] — Gaussian measurement noise and PCA denoising.
//! 3. [`ordering`] — Laplacian-eigenmap angular ordering of unlabeled
//!    projections.
//! 4. [`dist`] — circular angle-distribution models (von Mises mixture and
//!    binned PMF) with order-statistics machinery.
//! 5. [`cve`] — the alternating estimator: assign angles from order
//!    statistics, reconstruct, score held-out projections, and update the
//!    distribution parameters by numeric gradients / mirror descent.
//! 6. [`metrics`] — RRMSE / CC / SSIM / MAD with rotation-reflection
//!    alignment.

pub mod cve;
pub mod dist;
pub mod error;
pub mod fbp;
pub mod image;
pub mod metrics;
pub mod noise;
pub mod ordering;
pub mod pca;
pub mod pgm;
pub mod phantom;
pub mod radon;
pub mod seed;
pub mod sinogram;

pub use error::{Error, Result};
pub use image::ImageGrid;
pub use sinogram::{Projection, Sinogram};

/// Wrap a finite angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(std::f64::consts::TAU);
    // rem_euclid can return TAU itself for inputs a hair below 0.
    if w >= std::f64::consts::TAU {
        0.0
    } else {
        w
    }
}

/// Shortest circular distance between two angles, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn wrap_angle_covers_edge_cases() {
        assert_eq!(wrap_angle(0.0), 0.0);
        assert_eq!(wrap_angle(TAU), 0.0);
        assert!((wrap_angle(TAU + 0.1) - 0.1).abs() < 1e-12);
        assert!((wrap_angle(-0.1) - (TAU - 0.1)).abs() < 1e-12);
        let w = wrap_angle(-1e-18);
        assert!((0.0..TAU).contains(&w));
    }

    #[test]
    fn circular_distance_is_symmetric_and_short() {
        assert!((circular_distance(0.1, TAU - 0.1) - 0.2).abs() < 1e-12);
        assert!((circular_distance(TAU - 0.1, 0.1) - 0.2).abs() < 1e-12);
        assert_eq!(circular_distance(1.0, 1.0), 0.0);
    }
}
