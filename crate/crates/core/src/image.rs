//! Square raster of real-valued density samples.
//!
//! Pixel `(row, col)` has world coordinates
//! `x = (col - (S-1)/2) * spacing`, `y = (row - (S-1)/2) * spacing`,
//! so the origin sits at the image center. The inscribed circle of the
//! `S x S` square has radius `S * spacing / 2`; everything tomographic in
//! this crate treats pixels outside that circle as empty.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    size: usize,
    pixel_spacing: f64,
    pixels: Vec<f64>, // row-major, size * size
}

impl ImageGrid {
    /// Build a grid from row-major pixel data. `size >= 2`, all values finite.
    pub fn new(size: usize, pixels: Vec<f64>, pixel_spacing: f64) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidInput(format!(
                "image size must be >= 2, got {size}"
            )));
        }
        if pixels.len() != size * size {
            return Err(Error::DimensionMismatch {
                expected: format!("{} pixels", size * size),
                actual: format!("{}", pixels.len()),
            });
        }
        if !(pixel_spacing.is_finite() && pixel_spacing > 0.0) {
            return Err(Error::InvalidInput(format!(
                "pixel spacing must be finite and positive, got {pixel_spacing}"
            )));
        }
        if pixels.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "image contains non-finite pixel values".into(),
            ));
        }
        Ok(ImageGrid {
            size,
            pixel_spacing,
            pixels,
        })
    }

    pub fn zeros(size: usize) -> Result<Self> {
        ImageGrid::new(size, vec![0.0; size * size], 1.0)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn pixel_spacing(&self) -> f64 {
        self.pixel_spacing
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Mutable pixel access; callers must keep values finite.
    pub fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.size + col]
    }

    /// Center offset in index units: pixel `(r, c)` sits at
    /// `((c - center) * spacing, (r - center) * spacing)`.
    #[inline]
    pub fn center(&self) -> f64 {
        (self.size as f64 - 1.0) / 2.0
    }

    /// Half the image side in world units; also the inscribed-circle radius.
    #[inline]
    pub fn half_extent(&self) -> f64 {
        self.size as f64 * self.pixel_spacing / 2.0
    }

    /// Bilinear sample at world coordinates; zero outside the pixel grid.
    #[inline]
    pub fn sample_bilinear(&self, x: f64, y: f64) -> f64 {
        let c = self.center();
        let fj = x / self.pixel_spacing + c;
        let fi = y / self.pixel_spacing + c;
        if !(fj > -1.0 && fi > -1.0 && fj < self.size as f64 && fi < self.size as f64) {
            return 0.0;
        }
        let j0 = fj.floor();
        let i0 = fi.floor();
        let tx = fj - j0;
        let ty = fi - i0;
        let j0 = j0 as isize;
        let i0 = i0 as isize;
        let at = |i: isize, j: isize| -> f64 {
            if i < 0 || j < 0 || i >= self.size as isize || j >= self.size as isize {
                0.0
            } else {
                self.pixels[i as usize * self.size + j as usize]
            }
        };
        let v00 = at(i0, j0);
        let v01 = at(i0, j0 + 1);
        let v10 = at(i0 + 1, j0);
        let v11 = at(i0 + 1, j0 + 1);
        (1.0 - ty) * ((1.0 - tx) * v00 + tx * v01) + ty * ((1.0 - tx) * v10 + tx * v11)
    }

    /// Copy with pixels outside the inscribed circle zeroed.
    pub fn masked_to_inscribed_circle(&self) -> ImageGrid {
        let mut out = self.clone();
        out.mask_inscribed_circle_in_place();
        out
    }

    pub(crate) fn mask_inscribed_circle_in_place(&mut self) {
        let c = self.center();
        let r2 = (self.size as f64 / 2.0) * (self.size as f64 / 2.0);
        for i in 0..self.size {
            let y = i as f64 - c;
            for j in 0..self.size {
                let x = j as f64 - c;
                if x * x + y * y > r2 {
                    self.pixels[i * self.size + j] = 0.0;
                }
            }
        }
    }

    pub fn sum(&self) -> f64 {
        self.pixels.iter().sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.pixels.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.pixels {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    /// Min-max rescale to `[0, 1]`; a constant image maps to all zeros.
    pub fn rescaled_unit(&self) -> ImageGrid {
        let (lo, hi) = self.min_max();
        let mut out = self.clone();
        if hi > lo {
            let inv = 1.0 / (hi - lo);
            for v in &mut out.pixels {
                *v = (*v - lo) * inv;
            }
        } else {
            out.pixels.fill(0.0);
        }
        out
    }

    /// Rotate by `angle` about the center (optionally mirroring `y -> -y`
    /// first), with bilinear resampling. The output pixel at world `(x, y)`
    /// takes the value of the input at the pre-image of `(x, y)`.
    pub fn rotated(&self, angle: f64, reflect: bool) -> ImageGrid {
        let (sin_a, cos_a) = angle.sin_cos();
        let c = self.center();
        let mut pixels = vec![0.0; self.size * self.size];
        for i in 0..self.size {
            let y = (i as f64 - c) * self.pixel_spacing;
            for j in 0..self.size {
                let x = (j as f64 - c) * self.pixel_spacing;
                // inverse rotation of the output coordinate
                let xr = cos_a * x + sin_a * y;
                let yr = -sin_a * x + cos_a * y;
                let ys = if reflect { -yr } else { yr };
                pixels[i * self.size + j] = self.sample_bilinear(xr, ys);
            }
        }
        ImageGrid {
            size: self.size,
            pixel_spacing: self.pixel_spacing,
            pixels,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_construction() {
        assert!(ImageGrid::new(1, vec![0.0], 1.0).is_err());
        assert!(ImageGrid::new(2, vec![0.0; 3], 1.0).is_err());
        assert!(ImageGrid::new(2, vec![f64::NAN, 0.0, 0.0, 0.0], 1.0).is_err());
        assert!(ImageGrid::new(2, vec![0.0; 4], 0.0).is_err());
    }

    #[test]
    fn bilinear_interpolates_pixel_centers_exactly() {
        let img = ImageGrid::new(2, vec![1.0, 2.0, 3.0, 4.0], 1.0).unwrap();
        // pixel centers at (+-0.5, +-0.5)
        assert_eq!(img.sample_bilinear(-0.5, -0.5), 1.0);
        assert_eq!(img.sample_bilinear(0.5, -0.5), 2.0);
        assert_eq!(img.sample_bilinear(-0.5, 0.5), 3.0);
        assert_eq!(img.sample_bilinear(0.5, 0.5), 4.0);
        // midpoint
        assert!((img.sample_bilinear(0.0, 0.0) - 2.5).abs() < 1e-12);
        // far outside
        assert_eq!(img.sample_bilinear(10.0, 0.0), 0.0);
    }

    #[test]
    fn mask_zeroes_corners_keeps_center() {
        let mut img = ImageGrid::new(8, vec![1.0; 64], 1.0).unwrap();
        img.mask_inscribed_circle_in_place();
        assert_eq!(img.get(0, 0), 0.0);
        assert_eq!(img.get(4, 4), 1.0);
    }

    #[test]
    fn rotation_by_zero_is_identity() {
        let img = ImageGrid::new(4, (0..16).map(|v| v as f64).collect(), 1.0).unwrap();
        let rot = img.rotated(0.0, false);
        for (a, b) in img.pixels().iter().zip(rot.pixels()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn double_reflection_is_identity_on_circle_support() {
        let mut img = ImageGrid::zeros(16).unwrap();
        img.pixels_mut()[5 * 16 + 7] = 1.0;
        let back = img.rotated(0.0, true).rotated(0.0, true);
        let diff: f64 = img
            .pixels()
            .iter()
            .zip(back.pixels())
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(diff < 1e-12, "diff = {diff}");
    }
}
