//! scratch: per-candidate ordering quality vs tour-length selection (dev aid)
use nalgebra::DMatrix;
use uvt_core::dist::{AngleDistribution, DistModel, MvfComponent, MvfParams};
use uvt_core::noise::{add_noise, NoiseConfig};
use uvt_core::ordering::normalized_laplacian;
use uvt_core::pca::{pca_denoise, ComponentCount};
use uvt_core::phantom::{make_phantom, PhantomKind};
use uvt_core::radon::radon_forward;
use uvt_core::seed::derive_seed;
use uvt_core::Sinogram;
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
    let mut st = angles.to_vec();
    st.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut est = vec![0.0; n];
    for (k, &idx) in perm.iter().enumerate() { est[idx] = st[k]; }
    uvt_core::metrics::mad_angles(&est, angles).unwrap().0
}

fn tour(perm: &[usize], d2: &Vec<Vec<f64>>) -> f64 {
    let n = perm.len();
    (0..n).map(|k| d2[perm[k]][perm[(k + 1) % n]].sqrt()).sum()
}

fn main() {
    let img = make_phantom(&PhantomKind::Blobs, 128).unwrap();
    let true_dist = AngleDistribution::with_default_grid(DistModel::Mvf(MvfParams::new(vec![
        MvfComponent { weight: 0.6, mean: 1.2, concentration: 2.5 },
        MvfComponent { weight: 0.4, mean: 4.3, concentration: 2.0 },
    ]).unwrap())).unwrap();
    for seed in [0u64, 1, 2, 3, 4] {
        let angles = true_dist.sample_angles(1000, derive_seed(seed, "angles", 0));
        let clean = radon_forward(&img, &angles, 128).unwrap();
        let noisy = add_noise(&clean, &NoiseConfig::new(0.15, derive_seed(seed, "noise", 0)).unwrap()).unwrap();
        let den = pca_denoise(&noisy, ComponentCount::Auto).unwrap();
        let d2m = dist2(&den);
        print!("seed {seed}:");
        let mut best = (f64::INFINITY, 0usize, 0.0);
        for k in [4usize, 6, 8, 12, 16, 24, 32, 48, 64] {
            let perm = knn_order(&d2m, k);
            let t = tour(&perm, &d2m);
            let m = order_mad(&perm, &angles);
            print!(" k{k}:{m:.1}({t:.0})");
            if t < best.0 { best = (t, k, m); }
        }
        println!("  -> tour picks k={} mad={:.1}", best.1, best.2);
    }
}
