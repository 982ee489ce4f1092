//! `uvt simulate`: phantom -> sampled angles -> clean + noisy sinograms.

use std::path::Path;

use anyhow::{Context, Result};
use uvt_core::dist::AngleDistribution;
use uvt_core::noise::{add_noise, effective_sigma, NoiseConfig};
use uvt_core::pgm::{write_pgm, PgmDepth};
use uvt_core::phantom::make_phantom;
use uvt_core::radon::radon_forward;
use uvt_core::seed::derive_seed;

use crate::config::FlatConfig;
use crate::io_util::{write_angles_csv, write_manifest};

use super::{ensure_out_dir, master_seed, parse_phantom};

pub fn run(config: &Path, out: &Path, cli_seed: Option<u64>) -> Result<()> {
    let cfg = FlatConfig::load(config)?;
    ensure_out_dir(out)?;
    let seed = master_seed(&cfg, cli_seed)?;

    let (kind, _) = parse_phantom(&cfg)?;
    let size = cfg.get_usize("size", 128)?;
    let n = cfg.get_usize("projections", 1000)?;
    let sigma_rel = cfg.get_f64("noise_sigma_rel", 0.15)?;
    let dist_path = cfg.require_path("dist_file")?;
    let dist = AngleDistribution::load(&dist_path)?;

    let image = make_phantom(&kind, size)?;
    let angle_seed = derive_seed(seed, "angles", 0);
    let noise_seed = derive_seed(seed, "noise", 0);
    let angles = dist.sample_angles(n, angle_seed);
    let clean = radon_forward(&image, &angles, size)?;
    let noise_cfg = NoiseConfig::new(sigma_rel, noise_seed)?;
    let sigma = effective_sigma(&clean, &noise_cfg);
    let noisy = add_noise(&clean, &noise_cfg)?;

    write_pgm(&out.join("phantom.pgm"), &image, PgmDepth::Sixteen)?;
    clean.write_csv(&out.join("clean.csv"))?;
    noisy.write_csv(&out.join("noisy.csv"))?;
    write_angles_csv(&out.join("true_angles.csv"), &angles)?;
    dist.save(&out.join("true_dist.txt"))?;

    let mut resolved = cfg.resolved_entries();
    resolved.push(("effective_sigma".into(), format!("{sigma}")));
    write_manifest(
        &out.join("manifest.txt"),
        "simulate",
        seed,
        &resolved,
        &[("angles", angle_seed), ("noise", noise_seed)],
    )
    .context("writing manifest")?;
    println!(
        "simulated {n} projections of a {size}x{size} phantom (sigma = {sigma:.6})"
    );
    Ok(())
}
