//! scratch: phantom variants optimized for low-rank sinograms (dev aid)
use uvt_core::dist::{AngleDistribution, DistModel, MvfComponent, MvfParams};
use uvt_core::noise::{add_noise, NoiseConfig};
use uvt_core::ordering::{laplacian_eigenmap_order, KernelScale};
use uvt_core::pca::{pca_denoise_with_report, ComponentCount};
use uvt_core::phantom::{make_phantom, PhantomKind};
use uvt_core::radon::radon_forward;
use uvt_core::seed::derive_seed;
use uvt_core::ImageGrid;

fn order_mad(perm: &[usize], angles: &[f64]) -> f64 {
    let n = perm.len();
    let mut st = angles.to_vec();
    st.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut est = vec![0.0; n];
    for (k, &idx) in perm.iter().enumerate() { est[idx] = st[k]; }
    uvt_core::metrics::mad_angles(&est, angles).unwrap().0
}

fn gauss(size: usize, blobs: &[(f64, f64, f64, f64, f64, f64)]) -> ImageGrid {
    let mut img = ImageGrid::zeros(size).unwrap();
    let c = img.center();
    let half = size as f64 / 2.0;
    let s = img.size();
    let px = img.pixels_mut();
    for i in 0..s {
        let y = (i as f64 - c) / half;
        for j in 0..s {
            let x = (j as f64 - c) / half;
            let mut v: f64 = 0.0;
            for &(x0, y0, sx, sy, rot, amp) in blobs {
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
    img
}

fn main() {
    // bigger, softer, heavily overlapping blobs: sinogram energy concentrates
    // in few azimuthal harmonics
    let soft = gauss(128, &[
        (0.30, 0.05, 0.30, 0.42, 0.4, 1.0),
        (-0.28, -0.22, 0.38, 0.22, 1.1, 0.85),
        (-0.08, 0.34, 0.22, 0.26, 0.0, 0.7),
        (0.10, -0.38, 0.34, 0.18, 2.3, 0.9),
    ]);
    let spread = make_phantom(&PhantomKind::Blobs, 128).unwrap();
    let true_dist = AngleDistribution::with_default_grid(DistModel::Mvf(MvfParams::new(vec![
        MvfComponent { weight: 0.6, mean: 1.2, concentration: 2.5 },
        MvfComponent { weight: 0.4, mean: 4.3, concentration: 2.0 },
    ]).unwrap())).unwrap();
    for (label, img) in [("soft   ", &soft), ("spread ", &spread)] {
        print!("{label}:");
        for seed in [0u64, 1, 2, 3, 4, 5, 6] {
            let angles = true_dist.sample_angles(1000, derive_seed(seed, "angles", 0));
            let clean = radon_forward(img, &angles, 128).unwrap();
            let cfg = NoiseConfig::new(0.15, derive_seed(seed, "noise", 0)).unwrap();
            let noisy = add_noise(&clean, &cfg).unwrap();
            let (den, rep) = pca_denoise_with_report(&noisy, ComponentCount::Auto).unwrap();
            let ord = laplacian_eigenmap_order(&den, KernelScale::Auto).unwrap();
            print!(" s{seed}:{:.1}(c{})", order_mad(&ord.permutation, &angles), rep.components_kept);
        }
        println!();
    }
}
