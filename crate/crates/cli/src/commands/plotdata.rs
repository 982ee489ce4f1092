//! `uvt plotdata`: CSVs behind the convergence and distribution plots.

use std::path::Path;

use anyhow::{bail, Context, Result};
use uvt_core::dist::{AngleDistribution, DistModel, PmfParams};
use uvt_core::metrics::mad_angles;
use uvt_core::wrap_angle;

use crate::config::FlatConfig;
use crate::io_util::{read_angles_csv, write_manifest};

use super::{ensure_out_dir, master_seed};

/// Pair up adjacent bins: a generating PMF with twice the bins of the
/// estimate is shown at the estimate's resolution.
fn aggregate_pairwise(dist: &AngleDistribution) -> Result<AngleDistribution> {
    let DistModel::Pmf(p) = dist.model() else {
        bail!("pairwise aggregation applies to PMF models only");
    };
    let probs = p.probabilities();
    let halved: Vec<f64> = probs.chunks(2).map(|c| c.iter().sum()).collect();
    Ok(AngleDistribution::new(
        DistModel::Pmf(PmfParams::new(halved)?),
        dist.grid_size(),
    )?)
}

fn overlay_csv(true_dist: &AngleDistribution, est_dist: &AngleDistribution, points: usize) -> String {
    let mut out = String::from("theta,true_pdf,est_pdf\n");
    for m in 0..points {
        let theta = m as f64 * std::f64::consts::TAU / points as f64;
        out.push_str(&format!(
            "{theta},{},{}\n",
            true_dist.pdf(theta),
            est_dist.pdf(theta)
        ));
    }
    out
}

fn convergence_csv(trace_text: &str, origin: &Path) -> Result<String> {
    let mut lines = trace_text.lines();
    let header = lines.next().context("empty trace file")?;
    if !header.starts_with("iter,J") {
        bail!("{}: not a fit trace (header {header:?})", origin.display());
    }
    let mut iters: Vec<(u64, f64)> = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let it: u64 = fields
            .next()
            .context("missing iter")?
            .parse()
            .with_context(|| format!("{}:{}: bad iter", origin.display(), ln + 2))?;
        let j: f64 = fields
            .next()
            .context("missing J")?
            .parse()
            .with_context(|| format!("{}:{}: bad J", origin.display(), ln + 2))?;
        iters.push((it, j));
    }
    let mut out = String::from("iter,J,J_smoothed10\n");
    for (i, (it, j)) in iters.iter().enumerate() {
        let start = i.saturating_sub(9);
        let window = &iters[start..=i];
        let smooth: f64 = window.iter().map(|(_, v)| v).sum::<f64>() / window.len() as f64;
        out.push_str(&format!("{it},{j},{smooth}\n"));
    }
    Ok(out)
}

fn histogram_csv(est: &[f64], gt: &[f64], bin_deg: f64) -> Result<String> {
    let (_, alignment) = mad_angles(est, gt)?;
    let bins = (360.0 / bin_deg).ceil() as usize;
    let mut counts = vec![0usize; bins.max(1)];
    for (&e, &g) in est.iter().zip(gt) {
        let aligned = alignment.apply(e);
        let diff = {
            let d = wrap_angle(aligned - g).to_degrees();
            d.min(360.0 - d)
        };
        let idx = ((diff / bin_deg) as usize).min(counts.len() - 1);
        counts[idx] += 1;
    }
    let mut out = String::from("bin_lo_deg,bin_hi_deg,count\n");
    for (i, c) in counts.iter().enumerate() {
        out.push_str(&format!("{},{},{c}\n", i as f64 * bin_deg, (i + 1) as f64 * bin_deg));
    }
    Ok(out)
}

pub fn run(config: &Path, out: &Path, cli_seed: Option<u64>) -> Result<()> {
    let cfg = FlatConfig::load(config)?;
    ensure_out_dir(out)?;
    let seed = master_seed(&cfg, cli_seed)?;
    let mut wrote_any = false;

    if let Some(trace_path) = cfg.get_opt_path("trace") {
        let text = std::fs::read_to_string(&trace_path)
            .with_context(|| format!("reading {}", trace_path.display()))?;
        let csv = convergence_csv(&text, &trace_path)?;
        std::fs::write(out.join("convergence.csv"), csv)?;
        wrote_any = true;
    }

    if let (Some(true_path), Some(est_path)) =
        (cfg.get_opt_path("true_dist"), cfg.get_opt_path("est_dist"))
    {
        let mut true_dist = AngleDistribution::load(&true_path)?;
        let est_dist = AngleDistribution::load(&est_path)?;
        // a 2x-resolution generating PMF is shown at the estimate's bin count
        if let (DistModel::Pmf(t), DistModel::Pmf(e)) = (true_dist.model(), est_dist.model()) {
            if t.probabilities().len() == 2 * e.probabilities().len() {
                true_dist = aggregate_pairwise(&true_dist)?;
            }
        }
        let points = cfg.get_usize("overlay_points", 720)?;
        std::fs::write(
            out.join("dist_overlay.csv"),
            overlay_csv(&true_dist, &est_dist, points),
        )?;
        wrote_any = true;
    }

    if let (Some(est_path), Some(gt_path)) =
        (cfg.get_opt_path("est_angles"), cfg.get_opt_path("gt_angles"))
    {
        let est = read_angles_csv(&est_path)?;
        let gt = read_angles_csv(&gt_path)?;
        let bin_deg = cfg.get_f64("hist_bin_deg", 5.0)?;
        std::fs::write(
            out.join("angle_diff_hist.csv"),
            histogram_csv(&est, &gt, bin_deg)?,
        )?;
        wrote_any = true;
    }

    if !wrote_any {
        bail!("plotdata needs at least one of: trace, true_dist + est_dist, est_angles + gt_angles");
    }
    write_manifest(
        &out.join("manifest.txt"),
        "plotdata",
        seed,
        &cfg.resolved_entries(),
        &[],
    )?;
    println!("plot data written");
    Ok(())
}
