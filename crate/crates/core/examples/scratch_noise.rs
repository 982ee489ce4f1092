//! scratch: ordering under non-uniform density, symmetric vs asymmetric images
use nalgebra::DMatrix;
use uvt_core::dist::{AngleDistribution, DistModel, MvfComponent, MvfParams};
use uvt_core::noise::{add_noise, NoiseConfig};
use uvt_core::ordering::normalized_laplacian;
use uvt_core::pca::{pca_denoise, ComponentCount};
use uvt_core::phantom::{make_phantom, PhantomKind};
use uvt_core::radon::radon_forward;
use uvt_core::{ImageGrid, Sinogram};
use std::f64::consts::TAU;

fn dist2(sino: &Sinogram) -> Vec<Vec<f64>> {
    let n = sino.len();
    (0..n).map(|i| (0..n).map(|j| {
        sino.projections()[i].samples().iter().zip(sino.projections()[j].samples())
            .map(|(a, b)| (a - b) * (a - b)).sum()
    }).collect()).collect()
}

fn knn_order(d2: &Vec<Vec<f64>>, k: usize) -> Vec<usize> {
    let n = d2.len();
    let mut sigma2 = vec![0.0; n];
    let mut neigh: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut idx: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        idx.sort_by(|&a, &b| d2[i][a].partial_cmp(&d2[i][b]).unwrap());
        sigma2[i] = d2[i][idx[k - 1]].max(1e-300);
        neigh.push(idx[..k].to_vec());
    }
    let mut w = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for &j in &neigh[i] {
            let v = (-d2[i][j] / (sigma2[i] * sigma2[j]).sqrt()).exp();
            if v > w[(i, j)] { w[(i, j)] = v; w[(j, i)] = v; }
        }
        w[(i, i)] = 1.0;
    }
    let lap = normalized_laplacian(&w);
    let eig = lap.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let v1 = eig.eigenvectors.column(order[1]);
    let v2 = eig.eigenvectors.column(order[2]);
    let beta: Vec<f64> = (0..n).map(|i| v1[i].atan2(v2[i]).rem_euclid(TAU)).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| beta[a].partial_cmp(&beta[b]).unwrap());
    perm
}

fn order_mad(perm: &[usize], angles: &[f64]) -> f64 {
    let n = perm.len();
    let mut sorted_true = angles.to_vec();
    sorted_true.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut est = vec![0.0; n];
    for (k, &idx) in perm.iter().enumerate() { est[idx] = sorted_true[k]; }
    uvt_core::metrics::mad_angles(&est, angles).unwrap().0
}

/// smooth asymmetric blob phantom (no mirror symmetry)
fn blobs(size: usize) -> ImageGrid {
    let mut img = ImageGrid::zeros(size).unwrap();
    let c = img.center();
    let half = size as f64 / 2.0;
    // (x0, y0, sx, sy, rot, amp)
    let blobs = [
        (0.35, 0.1, 0.18, 0.30, 0.4, 1.0),
        (-0.3, -0.25, 0.25, 0.12, 1.1, 0.8),
        (-0.05, 0.4, 0.10, 0.10, 0.0, 0.6),
        (0.1, -0.45, 0.22, 0.08, 2.3, 0.9),
        (-0.45, 0.3, 0.08, 0.16, 0.9, 0.7),
    ];
    let s = img.size();
    let px = img.pixels_mut();
    for i in 0..s {
        let y = (i as f64 - c) / half;
        for j in 0..s {
            let x = (j as f64 - c) / half;
            let mut v = 0.0;
            for &(x0, y0, sx, sy, rot, amp) in &blobs {
                let (sr, cr) = (rot as f64).sin_cos();
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

fn run(label: &str, img: &ImageGrid, mvf: &AngleDistribution, noisy_case: bool) {
    let angles = mvf.sample_angles(1000, 77);
    let clean = radon_forward(img, &angles, 128).unwrap();
    let sino = if noisy_case {
        let noisy = add_noise(&clean, &NoiseConfig::new(0.15, 13).unwrap()).unwrap();
        pca_denoise(&noisy, ComponentCount::Auto).unwrap()
    } else {
        clean
    };
    let d2 = dist2(&sino);
    print!("{label}: ");
    for k in [4usize, 8, 12, 16, 24] {
        let perm = knn_order(&d2, k);
        print!(" k{k}:{:5.2}", order_mad(&perm, &angles));
    }
    println!();
}

fn main() {
    let shepp = make_phantom(&PhantomKind::SheppLogan, 128).unwrap();
    let blob = blobs(128);
    let strong = AngleDistribution::with_default_grid(DistModel::Mvf(MvfParams::new(vec![
        MvfComponent { weight: 0.6, mean: 1.2, concentration: 2.5 },
        MvfComponent { weight: 0.4, mean: 4.3, concentration: 2.0 },
    ]).unwrap())).unwrap();
    let mild = AngleDistribution::with_default_grid(DistModel::Mvf(MvfParams::new(vec![
        MvfComponent { weight: 0.55, mean: 1.2, concentration: 1.2 },
        MvfComponent { weight: 0.45, mean: 4.3, concentration: 1.0 },
    ]).unwrap())).unwrap();
    run("shepp  strong clean ", &shepp, &strong, false);
    run("shepp  mild   clean ", &shepp, &mild, false);
    run("blobs  strong clean ", &blob, &strong, false);
    run("blobs  strong noisy ", &blob, &strong, true);
    run("blobs  mild   noisy ", &blob, &mild, true);
    run("shepp  mild   noisy ", &shepp, &mild, true);
}
