pub mod baseline;
pub mod evaluate;
pub mod fit;
pub mod plotdata;
pub mod simulate;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use uvt_core::cve::{FitConfig, InitMode, ModelSpec};
use uvt_core::fbp::FbpFilter;
use uvt_core::pca::{pca_denoise, ComponentCount};
use uvt_core::phantom::PhantomKind;
use uvt_core::Sinogram;

use crate::config::FlatConfig;

pub fn ensure_out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))
}

/// `master_seed` comes from the config unless the CLI flag overrides it.
pub fn master_seed(cfg: &FlatConfig, cli_seed: Option<u64>) -> Result<u64> {
    match cli_seed {
        Some(s) => Ok(s),
        None => cfg.get_u64("master_seed", 0),
    }
}

pub fn parse_phantom(cfg: &FlatConfig) -> Result<(PhantomKind, String)> {
    let raw = cfg.get_str("phantom", "shepp_logan");
    let kind = match raw.as_str() {
        "disk" => PhantomKind::Disk,
        "shepp_logan" => PhantomKind::SheppLogan,
        "blobs" => PhantomKind::Blobs,
        other => PhantomKind::FromFile(cfg.resolve_path(other)),
    };
    Ok((kind, raw))
}

pub fn parse_filter(cfg: &FlatConfig) -> Result<FbpFilter> {
    match cfg.get_str("filter", "ramlak").as_str() {
        "ramlak" => Ok(FbpFilter::RamLak),
        "hann" => Ok(FbpFilter::Hann),
        other => bail!("unknown filter {other:?} (expected ramlak | hann)"),
    }
}

/// `denoise = none | auto | <component count>`; applied before ordering and
/// reconstruction, as in the experiment pipeline.
pub fn apply_denoise(cfg: &FlatConfig, sino: &Sinogram) -> Result<(Sinogram, String)> {
    let raw = cfg.get_str("denoise", "auto");
    match raw.as_str() {
        "none" => Ok((sino.clone(), raw)),
        "auto" => Ok((pca_denoise(sino, ComponentCount::Auto)?, raw)),
        n => {
            let c: usize = n
                .parse()
                .with_context(|| format!("denoise must be none | auto | integer, got {n:?}"))?;
            Ok((pca_denoise(sino, ComponentCount::Fixed(c))?, raw))
        }
    }
}

pub fn read_sinogram(cfg: &FlatConfig) -> Result<(Sinogram, PathBuf)> {
    let path = cfg.require_path("sinogram")?;
    let sino = Sinogram::read_csv(&path)?;
    Ok((sino, path))
}

/// Assemble the estimator configuration shared by `fit` and `baseline gltu`.
pub fn parse_fit_config(cfg: &FlatConfig, seed: u64) -> Result<FitConfig> {
    let model = match cfg.get_str("model", "mvf").as_str() {
        "mvf" => ModelSpec::Mvf {
            components: cfg.get_usize("components", 2)?,
        },
        "pmf" => ModelSpec::Pmf {
            bins: cfg.get_usize("bins", 10)?,
        },
        other => bail!("unknown model {other:?} (expected mvf | pmf)"),
    };
    let mut fit_cfg = FitConfig::new(model);
    fit_cfg.step_size = cfg.get_f64("alpha", fit_cfg.step_size)?;
    fit_cfg.max_iters = cfg.get_usize("max_iters", fit_cfg.max_iters)?;
    fit_cfg.convergence_tol = cfg.get_f64("tol", fit_cfg.convergence_tol)?;
    fit_cfg.fd_step_mean = cfg.get_f64("fd_mean", fit_cfg.fd_step_mean)?;
    fit_cfg.fd_step_concentration = cfg.get_f64("fd_kappa", fit_cfg.fd_step_concentration)?;
    fit_cfg.fd_step_weight = cfg.get_f64("fd_weight", fit_cfg.fd_step_weight)?;
    fit_cfg.kappa_bounds = (
        cfg.get_f64("kappa_min", 0.0)?,
        cfg.get_f64("kappa_max", 50.0)?,
    );
    fit_cfg.split_fraction = cfg.get_f64("split_fraction", fit_cfg.split_fraction)?;
    fit_cfg.grid_size = cfg.get_usize("grid_size", fit_cfg.grid_size)?;
    if cfg.has("output_size") {
        fit_cfg.output_size = Some(cfg.require_usize("output_size")?);
    }
    fit_cfg.filter = parse_filter(cfg)?;
    fit_cfg.init = match cfg.get_str("init", "uniform").as_str() {
        "uniform" => InitMode::UniformLike,
        "random" => InitMode::RandomSeeded,
        other => bail!("unknown init {other:?} (expected uniform | random)"),
    };
    fit_cfg.seed = seed;
    Ok(fit_cfg)
}
