//! End-to-end checks of the `uvt` binary: every subcommand against real
//! files in a temp directory, plus byte-level reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn uvt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uvt"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("uvt_cli_{tag}_{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

fn run_ok(cmd: &mut Command) {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
}

fn uniform_dist_text() -> &'static str {
    "grid_size = 1024\nmodel = mvf\ncomponents = 1\nw_0 = 1\nmu_0 = 0\nkappa_0 = 0\n"
}

/// simulate -> fit -> baselines -> evaluate -> plotdata on a small problem.
#[test]
fn full_pipeline_round_trip() {
    let dir = workdir("pipeline");
    write(&dir.join("dist.txt"), uniform_dist_text());
    write(
        &dir.join("sim.cfg"),
        "phantom = blobs\nsize = 32\nprojections = 24\nnoise_sigma_rel = 0.05\n\
         dist_file = dist.txt\nmaster_seed = 7\n",
    );
    let sim_out = dir.join("sim");
    run_ok(uvt().args(["simulate", "--config"]).arg(dir.join("sim.cfg")).arg("--out").arg(&sim_out));
    for f in ["phantom.pgm", "clean.csv", "noisy.csv", "true_angles.csv", "true_dist.txt", "manifest.txt"] {
        assert!(sim_out.join(f).exists(), "missing {f}");
    }

    write(
        &dir.join("fit.cfg"),
        "sinogram = sim/noisy.csv\ndenoise = none\nmodel = mvf\ncomponents = 1\n\
         max_iters = 2\ngrid_size = 512\nmaster_seed = 7\n",
    );
    let fit_out = dir.join("fit");
    run_ok(uvt().args(["fit", "--config"]).arg(dir.join("fit.cfg")).arg("--out").arg(&fit_out));
    for f in ["recon.pgm", "est_dist.txt", "trace.csv", "assigned_angles.csv", "manifest.txt"] {
        assert!(fit_out.join(f).exists(), "missing {f}");
    }
    // trace schema: one row per iteration, finite J
    let trace = fs::read_to_string(fit_out.join("trace.csv")).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert!(lines[0].starts_with("iter,J,param_0"));
    assert_eq!(lines.len(), 1 + 2);
    for row in &lines[1..] {
        let j: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!(j.is_finite());
    }

    let gltu_out = dir.join("gltu");
    run_ok(uvt().args(["baseline", "gltu", "--config"]).arg(dir.join("fit.cfg")).arg("--out").arg(&gltu_out));
    assert!(gltu_out.join("gltu.pgm").exists());
    assert!(gltu_out.join("gltu_angles.csv").exists());

    write(
        &dir.join("orp.cfg"),
        "sinogram = sim/clean.csv\ndenoise = none\nmaster_seed = 7\n",
    );
    let orp_out = dir.join("orp");
    run_ok(uvt().args(["baseline", "orp", "--config"]).arg(dir.join("orp.cfg")).arg("--out").arg(&orp_out));
    assert!(orp_out.join("orp.pgm").exists());

    write(
        &dir.join("eval.cfg"),
        "gt = sim/phantom.pgm\nour = fit/recon.pgm\ngltu = gltu/gltu.pgm\norp = orp/orp.pgm\n\
         gt_angles = sim/true_angles.csv\nour_angles = fit/assigned_angles.csv\n\
         gltu_angles = gltu/gltu_angles.csv\n",
    );
    let eval_out = dir.join("eval");
    run_ok(uvt().args(["evaluate", "--config"]).arg(dir.join("eval.cfg")).arg("--out").arg(&eval_out));
    let metrics = fs::read_to_string(eval_out.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("pair,status,rrmse,cc,ssim,triplet,mad_degrees"));
    assert_eq!(metrics.lines().count(), 6, "{metrics}");
    for pair in ["our_vs_gt", "our_vs_orp", "gltu_vs_gt", "gltu_vs_orp", "orp_vs_gt"] {
        let row = metrics.lines().find(|l| l.starts_with(pair)).unwrap();
        assert!(row.contains(",ok,"), "{row}");
    }

    write(
        &dir.join("plot.cfg"),
        "trace = fit/trace.csv\ntrue_dist = sim/true_dist.txt\nest_dist = fit/est_dist.txt\n\
         est_angles = fit/assigned_angles.csv\ngt_angles = sim/true_angles.csv\n",
    );
    let plot_out = dir.join("plot");
    run_ok(uvt().args(["plotdata", "--config"]).arg(dir.join("plot.cfg")).arg("--out").arg(&plot_out));
    for f in ["convergence.csv", "dist_overlay.csv", "angle_diff_hist.csv"] {
        assert!(plot_out.join(f).exists(), "missing {f}");
    }
    // histogram counts sum to N
    let hist = fs::read_to_string(plot_out.join("angle_diff_hist.csv")).unwrap();
    let total: usize = hist.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 24);
}

/// The same master seed must reproduce simulation outputs byte for byte.
#[test]
fn simulate_is_byte_reproducible() {
    let dir = workdir("repro");
    write(&dir.join("dist.txt"), uniform_dist_text());
    write(
        &dir.join("sim.cfg"),
        "phantom = disk\nsize = 256\nprojections = 100\nnoise_sigma_rel = 0\n\
         dist_file = dist.txt\nmaster_seed = 3\n",
    );
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    run_ok(uvt().args(["simulate", "--config"]).arg(dir.join("sim.cfg")).arg("--out").arg(&out_a));
    run_ok(uvt().args(["simulate", "--config"]).arg(dir.join("sim.cfg")).arg("--out").arg(&out_b));
    for f in ["phantom.pgm", "clean.csv", "noisy.csv", "true_angles.csv"] {
        assert_eq!(
            fs::read(out_a.join(f)).unwrap(),
            fs::read(out_b.join(f)).unwrap(),
            "{f} differs between identical runs"
        );
    }
    // zero noise: noisy equals clean
    assert_eq!(
        fs::read(out_a.join("clean.csv")).unwrap(),
        fs::read(out_a.join("noisy.csv")).unwrap()
    );
    // disk + uniform: all projections of a disk are near-identical
    let clean = fs::read_to_string(out_a.join("clean.csv")).unwrap();
    let rows: Vec<Vec<f64>> = clean
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect();
    let first = &rows[0];
    let norm: f64 = first.iter().map(|v| v * v).sum::<f64>().sqrt();
    for row in &rows[1..] {
        let diff: f64 = row.iter().zip(first).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        assert!(diff / norm < 0.01, "disk projections vary by {}", diff / norm);
    }

    // manifest records the effective sigma derived from the 0.15 rule
    write(
        &dir.join("sim15.cfg"),
        "phantom = disk\nsize = 32\nprojections = 20\nnoise_sigma_rel = 0.15\n\
         dist_file = dist.txt\nmaster_seed = 3\n",
    );
    let out_c = dir.join("c");
    run_ok(uvt().args(["simulate", "--config"]).arg(dir.join("sim15.cfg")).arg("--out").arg(&out_c));
    let manifest = fs::read_to_string(out_c.join("manifest.txt")).unwrap();
    assert!(manifest.contains("config.noise_sigma_rel = 0.15"));
    let sigma_line = manifest
        .lines()
        .find(|l| l.starts_with("config.effective_sigma"))
        .unwrap();
    let sigma: f64 = sigma_line.split('=').nth(1).unwrap().trim().parse().unwrap();
    // sigma = 0.15 x mean |clean samples|, recomputed here from the file
    let clean = fs::read_to_string(out_c.join("clean.csv")).unwrap();
    let mut total = 0.0;
    let mut count = 0usize;
    for line in clean.lines().skip(1) {
        for v in line.split(',').skip(1) {
            total += v.parse::<f64>().unwrap().abs();
            count += 1;
        }
    }
    let expected = 0.15 * total / count as f64;
    assert!((sigma - expected).abs() < 1e-9 * expected.max(1.0));
}

/// est = gt must give the identity row 0 / 1 / 1.
#[test]
fn evaluate_identity_row() {
    let dir = workdir("eval_id");
    write(&dir.join("dist.txt"), uniform_dist_text());
    write(
        &dir.join("sim.cfg"),
        "phantom = shepp_logan\nsize = 32\nprojections = 8\nnoise_sigma_rel = 0\n\
         dist_file = dist.txt\nmaster_seed = 1\n",
    );
    let sim_out = dir.join("sim");
    run_ok(uvt().args(["simulate", "--config"]).arg(dir.join("sim.cfg")).arg("--out").arg(&sim_out));
    write(&dir.join("eval.cfg"), "gt = sim/phantom.pgm\nour = sim/phantom.pgm\n");
    let eval_out = dir.join("eval");
    run_ok(uvt().args(["evaluate", "--config"]).arg(dir.join("eval.cfg")).arg("--out").arg(&eval_out));
    let metrics = fs::read_to_string(eval_out.join("metrics.csv")).unwrap();
    let row = metrics.lines().find(|l| l.starts_with("our_vs_gt")).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    let rrmse: f64 = fields[2].parse().unwrap();
    let cc: f64 = fields[3].parse().unwrap();
    let ssim: f64 = fields[4].parse().unwrap();
    assert!(rrmse < 1e-9, "{row}");
    assert!((cc - 1.0).abs() < 1e-9);
    assert!((ssim - 1.0).abs() < 1e-9);
    assert_eq!(fields[5], "0.00/1.00/1.00");
    // unsupplied comparisons are flagged, not silently dropped
    assert!(metrics.lines().any(|l| l.starts_with("gltu_vs_gt,missing_input")));
    assert!(metrics.lines().any(|l| l.starts_with("orp_vs_gt,missing_input")));
}

/// Uniform overlay column is the constant circle density.
#[test]
fn plotdata_uniform_overlay_is_constant() {
    let dir = workdir("plot_uniform");
    write(&dir.join("true.txt"), uniform_dist_text());
    write(&dir.join("est.txt"), uniform_dist_text());
    write(&dir.join("plot.cfg"), "true_dist = true.txt\nest_dist = est.txt\noverlay_points = 64\n");
    let out = dir.join("out");
    run_ok(uvt().args(["plotdata", "--config"]).arg(dir.join("plot.cfg")).arg("--out").arg(&out));
    let overlay = fs::read_to_string(out.join("dist_overlay.csv")).unwrap();
    let expected = 1.0 / std::f64::consts::TAU;
    for line in overlay.lines().skip(1) {
        let mut fields = line.split(',');
        let _theta = fields.next().unwrap();
        for v in fields {
            let v: f64 = v.parse().unwrap();
            assert!((v - expected).abs() < 1e-9);
        }
    }
}

/// A 50-bin generating PMF is aggregated pairwise onto 25 bins for overlay.
#[test]
fn plotdata_aggregates_double_resolution_pmf() {
    let dir = workdir("plot_agg");
    let mut true_pmf = String::from("grid_size = 1600\nmodel = pmf\nbins = 50\n");
    let raw: Vec<f64> = (0..50).map(|i| 1.0 + (i as f64 * 0.37).sin().abs()).collect();
    let total: f64 = raw.iter().sum();
    for (i, v) in raw.iter().enumerate() {
        true_pmf.push_str(&format!("p_{i} = {}\n", v / total));
    }
    write(&dir.join("true.txt"), &true_pmf);
    let mut est_pmf = String::from("grid_size = 1600\nmodel = pmf\nbins = 25\n");
    for i in 0..25 {
        est_pmf.push_str(&format!("p_{i} = {}\n", 1.0 / 25.0));
    }
    write(&dir.join("est.txt"), &est_pmf);
    write(&dir.join("plot.cfg"), "true_dist = true.txt\nest_dist = est.txt\noverlay_points = 100\n");
    let out = dir.join("out");
    run_ok(uvt().args(["plotdata", "--config"]).arg(dir.join("plot.cfg")).arg("--out").arg(&out));
    let overlay = fs::read_to_string(out.join("dist_overlay.csv")).unwrap();
    // first sample of the aggregated truth: density of (p_0 + p_1) over the
    // doubled bin width
    let first = overlay.lines().nth(1).unwrap();
    let true_pdf: f64 = first.split(',').nth(1).unwrap().parse().unwrap();
    let bin_width = std::f64::consts::TAU / 25.0;
    let expected = (raw[0] + raw[1]) / total / bin_width;
    assert!(
        (true_pdf - expected).abs() < 1e-9,
        "{true_pdf} vs {expected}"
    );
}

/// Errors exit nonzero with a message.
#[test]
fn missing_config_key_fails_cleanly() {
    let dir = workdir("errs");
    write(&dir.join("bad.cfg"), "size = 32\n");
    let out = uvt()
        .args(["simulate", "--config"])
        .arg(dir.join("bad.cfg"))
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("dist_file"), "stderr: {stderr}");
}
