//! PCA denoising of sinograms: project mean-centered projections onto the
//! leading principal components of the projection set.
//!
//! The covariance is taken over the S detector samples (S x S eigenproblem,
//! cost independent of N). `Auto` keeps the components whose eigenvalues
//! rise above a Marchenko-Pastur bulk edge estimated from the trailing half
//! of the spectrum.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::sinogram::{Projection, Sinogram};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentCount {
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone)]
pub struct PcaReport {
    /// Sample-covariance eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub components_kept: usize,
}

pub fn pca_denoise(sinogram: &Sinogram, count: ComponentCount) -> Result<Sinogram> {
    pca_denoise_with_report(sinogram, count).map(|(s, _)| s)
}

pub fn pca_denoise_with_report(
    sinogram: &Sinogram,
    count: ComponentCount,
) -> Result<(Sinogram, PcaReport)> {
    let n = sinogram.len();
    let s = sinogram.detector_count();
    if let ComponentCount::Fixed(c) = count {
        if c < 1 {
            return Err(Error::InvalidInput("component_count must be >= 1".into()));
        }
        if c >= n {
            return Err(Error::InvalidInput(format!(
                "component_count {c} must be < N = {n}"
            )));
        }
    }

    // mean projection
    let mut mean = vec![0.0; s];
    for p in sinogram.projections() {
        for (m, &v) in mean.iter_mut().zip(p.samples()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }

    // S x S sample covariance of centered projections
    let mut cov = DMatrix::<f64>::zeros(s, s);
    for p in sinogram.projections() {
        let d: Vec<f64> = p.samples().iter().zip(&mean).map(|(v, m)| v - m).collect();
        for i in 0..s {
            let di = d[i];
            if di == 0.0 {
                continue;
            }
            for j in i..s {
                cov[(i, j)] += di * d[j];
            }
        }
    }
    let denom = (n.max(2) - 1) as f64;
    for i in 0..s {
        for j in i..s {
            let v = cov[(i, j)] / denom;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }

    let eig = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    let keep = match count {
        ComponentCount::Fixed(c) => c.min(s),
        ComponentCount::Auto => auto_component_count(&eigenvalues, n, s),
    };

    let basis: Vec<DVector<f64>> = order[..keep]
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();

    let mean_v = DVector::from_column_slice(&mean);
    let projections: Vec<Projection> = sinogram
        .projections()
        .iter()
        .map(|p| {
            let x = DVector::from_column_slice(p.samples()) - &mean_v;
            let mut y = mean_v.clone();
            for b in &basis {
                let coeff = b.dot(&x);
                y.axpy(coeff, b, 1.0);
            }
            Projection::new(y.iter().copied().collect(), p.angle())
        })
        .collect::<Result<Vec<_>>>()?;

    Ok((
        Sinogram::new(projections)?,
        PcaReport {
            eigenvalues,
            components_kept: keep,
        },
    ))
}

/// Smallest leading set of eigenvalues above the Marchenko-Pastur bulk edge
/// `σ̂²(1 + sqrt(S/N))²`. The noise variance σ̂² is taken as the median
/// eigenvalue — the upper boundary of the noise-dominated trailing half of
/// the spectrum, which for a pure MP bulk sits near σ² while the deeper
/// tail underestimates it. Always keeps at least one component.
fn auto_component_count(eigenvalues_desc: &[f64], n: usize, s: usize) -> usize {
    let sigma2 = eigenvalues_desc[eigenvalues_desc.len() / 2];
    let gamma = s as f64 / n as f64;
    let edge = sigma2 * (1.0 + gamma.sqrt()).powi(2);
    let kept = eigenvalues_desc.iter().take_while(|&&l| l > edge).count();
    kept.clamp(1, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{add_noise, NoiseConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel_l2(a: &Sinogram, b: &Sinogram) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (pa, pb) in a.projections().iter().zip(b.projections()) {
            for (x, y) in pa.samples().iter().zip(pb.samples()) {
                num += (x - y) * (x - y);
                den += y * y;
            }
        }
        (num / den.max(1e-300)).sqrt()
    }

    fn random_sinogram(n: usize, s: usize, seed: u64) -> Sinogram {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Sinogram::new(
            (0..n)
                .map(|_| {
                    Projection::new((0..s).map(|_| rng.random::<f64>()).collect(), None).unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn full_rank_reconstruction_is_identity() {
        let sino = random_sinogram(40, 16, 1);
        let out = pca_denoise(&sino, ComponentCount::Fixed(16)).unwrap();
        assert!(rel_l2(&out, &sino) < 1e-8);
    }

    #[test]
    fn zero_sinogram_stays_zero() {
        let sino = Sinogram::new(
            (0..10)
                .map(|_| Projection::new(vec![0.0; 8], None).unwrap())
                .collect(),
        )
        .unwrap();
        let out = pca_denoise(&sino, ComponentCount::Fixed(2)).unwrap();
        assert!(out
            .projections()
            .iter()
            .all(|p| p.samples().iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn rank_one_plus_noise_denoises_well() {
        let s = 64;
        let n = 400;
        let template: Vec<f64> = (0..s)
            .map(|j| {
                let t = (j as f64 - 32.0) / 10.0;
                (-(t * t)).exp() * 5.0
            })
            .collect();
        let clean = Sinogram::new(
            (0..n)
                .map(|_| Projection::new(template.clone(), None).unwrap())
                .collect(),
        )
        .unwrap();
        let noisy = add_noise(&clean, &NoiseConfig::new(0.3, 99).unwrap()).unwrap();
        let denoised = pca_denoise(&noisy, ComponentCount::Fixed(1)).unwrap();
        let noisy_err = rel_l2(&noisy, &clean);
        let den_err = rel_l2(&denoised, &clean);
        assert!(
            den_err <= 0.25 * noisy_err,
            "denoised {den_err} vs noisy {noisy_err}"
        );
    }

    #[test]
    fn denoising_is_a_projection() {
        let sino = random_sinogram(60, 24, 3);
        let once = pca_denoise(&sino, ComponentCount::Fixed(5)).unwrap();
        let twice = pca_denoise(&once, ComponentCount::Fixed(5)).unwrap();
        assert!(rel_l2(&twice, &once) < 1e-8);
    }

    #[test]
    fn eigenvalues_are_nonincreasing() {
        let sino = random_sinogram(50, 20, 4);
        let (_, report) = pca_denoise_with_report(&sino, ComponentCount::Fixed(3)).unwrap();
        for w in report.eigenvalues.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
    }

    #[test]
    fn rejects_too_many_components() {
        let sino = random_sinogram(10, 8, 5);
        assert!(pca_denoise(&sino, ComponentCount::Fixed(10)).is_err());
        assert!(pca_denoise(&sino, ComponentCount::Fixed(0)).is_err());
    }

    #[test]
    fn auto_keeps_spike_over_bulk() {
        let s = 32;
        let n = 300;
        let template: Vec<f64> = (0..s).map(|j| (j as f64 * 0.3).sin() * 4.0).collect();
        let clean = Sinogram::new(
            (0..n)
                .map(|_| Projection::new(template.clone(), None).unwrap())
                .collect(),
        )
        .unwrap();
        let noisy = add_noise(&clean, &NoiseConfig::new(0.2, 17).unwrap()).unwrap();
        let (_, report) = pca_denoise_with_report(&noisy, ComponentCount::Auto).unwrap();
        assert!(report.components_kept >= 1);
        assert!(report.components_kept <= 4, "kept {}", report.components_kept);
    }
}
