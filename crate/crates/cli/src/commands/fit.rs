//! `uvt fit`: denoise, order, and run the cross-validation estimator.

use std::path::Path;

use anyhow::{Context, Result};
use uvt_core::cve;
use uvt_core::pgm::{write_pgm, PgmDepth};
use uvt_core::seed::derive_seed;

use crate::config::FlatConfig;
use crate::io_util::{write_angles_csv, write_manifest};

use super::{apply_denoise, ensure_out_dir, master_seed, parse_fit_config, read_sinogram};

pub fn run(config: &Path, out: &Path, cli_seed: Option<u64>) -> Result<()> {
    let cfg = FlatConfig::load(config)?;
    ensure_out_dir(out)?;
    let seed = master_seed(&cfg, cli_seed)?;

    let (raw_sino, _) = read_sinogram(&cfg)?;
    let (sino, _) = apply_denoise(&cfg, &raw_sino)?;
    let fit_seed = derive_seed(seed, "fit", 0);
    let fit_cfg = parse_fit_config(&cfg, fit_seed)?;

    let output = cve::fit(&sino, &fit_cfg).map_err(|e| anyhow::anyhow!("{e}"))?;

    write_pgm(
        &out.join("recon.pgm"),
        &output.image.rescaled_unit(),
        PgmDepth::Sixteen,
    )?;
    output.distribution.save(&out.join("est_dist.txt"))?;
    output.trace.write_csv(&out.join("trace.csv"))?;
    write_angles_csv(&out.join("assigned_angles.csv"), &output.assigned_angles)?;

    write_manifest(
        &out.join("manifest.txt"),
        "fit",
        seed,
        &cfg.resolved_entries(),
        &[("fit", fit_seed)],
    )
    .context("writing manifest")?;

    let iters = output.trace.records.len();
    match output.converged_at {
        Some(at) => println!("fit converged at iteration {at} ({iters} recorded)"),
        None => println!("fit ran {iters} iterations without hitting the tolerance"),
    }
    Ok(())
}
