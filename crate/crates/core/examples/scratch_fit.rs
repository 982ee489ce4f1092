//! scratch: desk-scale end-to-end bring-up (dev aid, not shipped)
use std::time::Instant;
use uvt_core::cve::*;
use uvt_core::dist::{AngleDistribution, DistModel, MvfComponent, MvfParams};
use uvt_core::fbp::FbpFilter;
use uvt_core::metrics::{report, AlignMode};
use uvt_core::noise::{add_noise, NoiseConfig};
use uvt_core::pca::{pca_denoise, ComponentCount};
use uvt_core::phantom::{make_phantom, PhantomKind};
use uvt_core::radon::radon_forward;
use uvt_core::seed::derive_seed;

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0u64);
    let iters = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(40usize);
    let t0 = Instant::now();
    let img = make_phantom(&PhantomKind::Blobs, 128).unwrap();
    let gt = img.masked_to_inscribed_circle();
    let k1: f64 = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(2.5);
    let k2: f64 = std::env::args().nth(4).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let alpha: f64 = std::env::args().nth(5).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let true_dist = AngleDistribution::with_default_grid(DistModel::Mvf(MvfParams::new(vec![
        MvfComponent { weight: 0.6, mean: 1.2, concentration: k1 },
        MvfComponent { weight: 0.4, mean: 4.3, concentration: k2 },
    ]).unwrap())).unwrap();
    let angles = true_dist.sample_angles(1000, derive_seed(seed, "angles", 0));
    let clean = radon_forward(&img, &angles, 128).unwrap();
    let noisy = add_noise(&clean, &NoiseConfig::new(0.15, derive_seed(seed, "noise", 0)).unwrap()).unwrap();
    let den = pca_denoise(&noisy, ComponentCount::Auto).unwrap();
    println!("[{:6.1?}] data ready", t0.elapsed());

    let mut cfg = FitConfig::new(ModelSpec::Mvf { components: 2 });
    cfg.seed = derive_seed(seed, "fit", 0);
    cfg.max_iters = iters;
    cfg.step_size = alpha;
    {
        // ordering quality diagnostic
        let ord = uvt_core::ordering::laplacian_eigenmap_order(&den, cfg.kernel_scale).unwrap();
        let n = ord.permutation.len();
        let mut st = angles.clone();
        st.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut est = vec![0.0; n];
        for (k, &idx) in ord.permutation.iter().enumerate() { est[idx] = st[k]; }
        let (om, _) = uvt_core::metrics::mad_angles(&est, &angles).unwrap();
        println!("ordering mad = {om:.2} deg");
    }
    let fit_out = fit(&den, &cfg).unwrap();
    println!("[{:6.1?}] fit done ({} iters, converged at {:?})", t0.elapsed(), fit_out.trace.records.len(), fit_out.converged_at);

    let j: Vec<f64> = fit_out.trace.records.iter().map(|r| r.objective).collect();
    let sm = |a: usize, b: usize| -> f64 { j[a..b].iter().sum::<f64>() / (b - a) as f64 };
    let w = 10.min(j.len());
    println!("smoothed J: first {:.2}, last {:.2}", sm(0, w), sm(j.len() - w, j.len()));
    println!("final params: {:?}", fit_out.trace.records.last().map(|r| r.params.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>()));

    let gltu = baseline_gltu(&den, &cfg).unwrap();
    let orp = baseline_orp(&den, FbpFilter::RamLak, 128).unwrap();
    println!("[{:6.1?}] baselines done", t0.elapsed());

    let our_rep = report(&fit_out.image, &gt, AlignMode::ByAngles { est_angles: &fit_out.assigned_angles, gt_angles: &angles }).unwrap();
    let gltu_rep = report(&gltu.image, &gt, AlignMode::ByAngles { est_angles: &gltu.assigned_angles, gt_angles: &angles }).unwrap();
    let orp_rep = report(&orp, &gt, AlignMode::None).unwrap();
    println!("OUR  vs GT: rrmse={:.4} cc={:.4} ssim={:.4} mad={:.2}deg", our_rep.rrmse, our_rep.cc, our_rep.ssim, our_rep.mad_degrees.unwrap());
    println!("GLTU vs GT: rrmse={:.4} cc={:.4} ssim={:.4} mad={:.2}deg", gltu_rep.rrmse, gltu_rep.cc, gltu_rep.ssim, gltu_rep.mad_degrees.unwrap());
    println!("ORP  vs GT: rrmse={:.4} cc={:.4} ssim={:.4}", orp_rep.rrmse, orp_rep.cc, orp_rep.ssim);
    println!("[{:6.1?}] total", t0.elapsed());
}
