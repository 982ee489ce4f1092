//! Projections and sinograms, plus their CSV wire format.
//!
//! CSV schema: header row `angle,s_0,...,s_{S-1}`, one row per projection,
//! with the angle cell left empty when the acquisition angle is unknown.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::wrap_angle;

/// One 1D parallel-beam projection; `angle` is present only when the true
/// acquisition angle is known (simulation, oracle baselines).
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    samples: Vec<f64>,
    angle: Option<f64>,
}

impl Projection {
    pub fn new(samples: Vec<f64>, angle: Option<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("projection with no samples".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "projection contains non-finite samples".into(),
            ));
        }
        let angle = match angle {
            Some(a) if !a.is_finite() => {
                return Err(Error::InvalidInput(format!("non-finite angle {a}")));
            }
            Some(a) => Some(wrap_angle(a)),
            None => None,
        };
        Ok(Projection { samples, angle })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn angle(&self) -> Option<f64> {
        self.angle
    }

    pub(crate) fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }
}

/// Ordered collection of projections sharing one detector geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    projections: Vec<Projection>,
    detector_count: usize,
}

impl Sinogram {
    pub fn new(projections: Vec<Projection>) -> Result<Self> {
        let first = projections
            .first()
            .ok_or_else(|| Error::InvalidInput("sinogram needs at least one projection".into()))?;
        let detector_count = first.samples.len();
        if projections.iter().any(|p| p.samples.len() != detector_count) {
            return Err(Error::DimensionMismatch {
                expected: format!("{detector_count} samples in every projection"),
                actual: "mixed projection lengths".into(),
            });
        }
        Ok(Sinogram {
            projections,
            detector_count,
        })
    }

    pub fn len(&self) -> usize {
        self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }

    pub fn detector_count(&self) -> usize {
        self.detector_count
    }

    pub fn projections(&self) -> &[Projection] {
        &self.projections
    }

    pub(crate) fn projections_mut(&mut self) -> &mut [Projection] {
        &mut self.projections
    }

    /// All angles, or `None` if any projection is unlabeled.
    pub fn angles(&self) -> Option<Vec<f64>> {
        self.projections.iter().map(|p| p.angle).collect()
    }

    /// Mean absolute sample value across the whole sinogram.
    pub fn mean_abs(&self) -> f64 {
        let total: f64 = self
            .projections
            .iter()
            .flat_map(|p| p.samples.iter())
            .map(|v| v.abs())
            .sum();
        total / (self.len() * self.detector_count) as f64
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str("angle");
        for j in 0..self.detector_count {
            out.push_str(&format!(",s_{j}"));
        }
        out.push('\n');
        for p in &self.projections {
            match p.angle {
                Some(a) => out.push_str(&format!("{a}")),
                None => {}
            }
            for v in &p.samples {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn from_csv_str(text: &str, origin: &Path) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(origin, "empty sinogram CSV"))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.first() != Some(&"angle") || cols.len() < 2 {
            return Err(Error::parse(origin, "header must be angle,s_0,...,s_{S-1}"));
        }
        let s = cols.len() - 1;
        for (j, col) in cols[1..].iter().enumerate() {
            if *col != format!("s_{j}") {
                return Err(Error::parse(origin, format!("unexpected column {col}")));
            }
        }
        let mut projections = Vec::new();
        for (ln, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != s + 1 {
                return Err(Error::parse(
                    origin,
                    format!("row {}: expected {} fields, got {}", ln + 2, s + 1, fields.len()),
                ));
            }
            let angle = if fields[0].is_empty() {
                None
            } else {
                Some(fields[0].parse::<f64>().map_err(|_| {
                    Error::parse(origin, format!("row {}: bad angle {:?}", ln + 2, fields[0]))
                })?)
            };
            let samples = fields[1..]
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|_| {
                        Error::parse(origin, format!("row {}: bad sample {f:?}", ln + 2))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            projections.push(Projection::new(samples, angle)?);
        }
        Sinogram::new(projections)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Sinogram::from_csv_str(&text, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn proj(vals: &[f64], angle: Option<f64>) -> Projection {
        Projection::new(vals.to_vec(), angle).unwrap()
    }

    #[test]
    fn wraps_angles_on_construction() {
        let p = proj(&[1.0, 2.0], Some(7.0));
        assert!(p.angle().unwrap() < std::f64::consts::TAU);
    }

    #[test]
    fn csv_round_trip_preserves_values_exactly() {
        let sino = Sinogram::new(vec![
            proj(&[1.0, 0.25, -3.5e-7], Some(1.234567890123)),
            proj(&[0.0, 2.0, 4.0], None),
        ])
        .unwrap();
        let text = sino.to_csv_string();
        let back = Sinogram::from_csv_str(&text, &PathBuf::from("mem")).unwrap();
        assert_eq!(sino, back);
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = Sinogram::new(vec![proj(&[1.0, 2.0], None), proj(&[1.0], None)]);
        assert!(err.is_err());
    }

    #[test]
    fn empty_angle_cell_means_unknown() {
        let text = "angle,s_0,s_1\n,1,2\n0.5,3,4\n";
        let sino = Sinogram::from_csv_str(text, &PathBuf::from("mem")).unwrap();
        assert_eq!(sino.projections()[0].angle(), None);
        assert_eq!(sino.projections()[1].angle(), Some(0.5));
        assert!(sino.angles().is_none());
    }
}
