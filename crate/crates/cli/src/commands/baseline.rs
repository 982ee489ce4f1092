//! `uvt baseline gltu | orp`: reference reconstructions.

use std::path::Path;

use anyhow::{Context, Result};
use uvt_core::cve::{baseline_gltu, baseline_orp};
use uvt_core::pgm::{write_pgm, PgmDepth};
use uvt_core::seed::derive_seed;

use crate::config::FlatConfig;
use crate::io_util::{write_angles_csv, write_manifest};

use super::{
    apply_denoise, ensure_out_dir, master_seed, parse_filter, parse_fit_config, read_sinogram,
};

pub fn run_gltu(config: &Path, out: &Path, cli_seed: Option<u64>) -> Result<()> {
    let cfg = FlatConfig::load(config)?;
    ensure_out_dir(out)?;
    let seed = master_seed(&cfg, cli_seed)?;
    let (raw_sino, _) = read_sinogram(&cfg)?;
    let (sino, _) = apply_denoise(&cfg, &raw_sino)?;
    let fit_cfg = parse_fit_config(&cfg, derive_seed(seed, "fit", 0))?;

    let output = baseline_gltu(&sino, &fit_cfg)?;
    write_pgm(
        &out.join("gltu.pgm"),
        &output.image.rescaled_unit(),
        PgmDepth::Sixteen,
    )?;
    write_angles_csv(&out.join("gltu_angles.csv"), &output.assigned_angles)?;
    write_manifest(
        &out.join("manifest.txt"),
        "baseline gltu",
        seed,
        &cfg.resolved_entries(),
        &[],
    )
    .context("writing manifest")?;
    println!("gltu baseline written");
    Ok(())
}

pub fn run_orp(config: &Path, out: &Path, cli_seed: Option<u64>) -> Result<()> {
    let cfg = FlatConfig::load(config)?;
    ensure_out_dir(out)?;
    let seed = master_seed(&cfg, cli_seed)?;
    let (raw_sino, _) = read_sinogram(&cfg)?;
    let (sino, _) = apply_denoise(&cfg, &raw_sino)?;
    let filter = parse_filter(&cfg)?;
    let output_size = cfg.get_usize("output_size", sino.detector_count())?;

    let image = baseline_orp(&sino, filter, output_size)?;
    write_pgm(
        &out.join("orp.pgm"),
        &image.rescaled_unit(),
        PgmDepth::Sixteen,
    )?;
    write_manifest(
        &out.join("manifest.txt"),
        "baseline orp",
        seed,
        &cfg.resolved_entries(),
        &[],
    )
    .context("writing manifest")?;
    println!("orp baseline written");
    Ok(())
}
