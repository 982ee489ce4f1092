//! Small shared I/O helpers: angle CSVs and run manifests.

use std::path::Path;

use anyhow::{bail, Context, Result};

/// Write angles as `index,assigned_angle` rows.
pub fn write_angles_csv(path: &Path, angles: &[f64]) -> Result<()> {
    let mut out = String::from("index,assigned_angle\n");
    for (i, a) in angles.iter().enumerate() {
        out.push_str(&format!("{i},{a}\n"));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn read_angles_csv(path: &Path) -> Result<Vec<f64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("index,assigned_angle") => {}
        other => bail!(
            "{}: expected header `index,assigned_angle`, got {other:?}",
            path.display()
        ),
    }
    let mut angles = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let Some((idx, angle)) = line.split_once(',') else {
            bail!("{}:{}: expected two fields", path.display(), ln + 2);
        };
        let idx: usize = idx
            .parse()
            .with_context(|| format!("{}:{}: bad index", path.display(), ln + 2))?;
        if idx != angles.len() {
            bail!("{}:{}: indices must be dense from 0", path.display(), ln + 2);
        }
        angles.push(
            angle
                .parse::<f64>()
                .with_context(|| format!("{}:{}: bad angle", path.display(), ln + 2))?,
        );
    }
    Ok(angles)
}

/// Write the run manifest: resolved config, seeds, and the documented
/// numeric defaults that shaped the outputs.
pub fn write_manifest(
    path: &Path,
    command: &str,
    master_seed: u64,
    resolved: &[(String, String)],
    derived_seeds: &[(&str, u64)],
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("tool = uvt {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("command = {command}\n"));
    out.push_str(&format!("master_seed = {master_seed}\n"));
    for (name, seed) in derived_seeds {
        out.push_str(&format!("seed.{name} = {seed}\n"));
    }
    for (k, v) in resolved {
        out.push_str(&format!("config.{k} = {v}\n"));
    }
    // module defaults that are not config keys but shape the numbers
    out.push_str("default.detector_geometry = inscribed-circle, bin-center offsets\n");
    out.push_str("default.ray_step = 0.5 pixel, bilinear\n");
    out.push_str("default.backprojection_weight = pi / n_views\n");
    out.push_str("default.ordering = knn eigenmap sweep, tour-length selection\n");
    out.push_str("default.pca_auto = Marchenko-Pastur edge, median eigenvalue scale\n");
    out.push_str("default.ssim = 7x7 gaussian sigma 1.5, C1=1e-4, C2=9e-4\n");
    out.push_str("default.order_statistics = 4096-interval trapezoid grid, log domain\n");
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles_round_trip() {
        let dir = std::env::temp_dir().join(format!("uvt_io_{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("angles.csv");
        let angles = vec![0.5, 1.25, 6.1];
        write_angles_csv(&path, &angles).unwrap();
        assert_eq!(read_angles_csv(&path).unwrap(), angles);
    }
}
