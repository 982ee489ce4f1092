//! Joint image / angle-distribution estimation by cross-validation-error
//! descent.
//!
//! One ordering pass fixes the angular sequence of the unlabeled
//! projections. Each iteration then: assigns to the k-th sorted projection
//! the expected k-th order statistic of the current distribution estimate,
//! draws a fresh 80/20 reconstruction/validation split, reconstructs with
//! FBP from the reconstruction set, scores the validation set by the sum of
//! L2 residuals against re-projections, and updates the distribution
//! parameters from numeric gradients — exponentiated-gradient (mirror) steps
//! for simplex blocks, plain gradient steps with projection for means and
//! concentrations. The split is held fixed within one gradient computation
//! and re-drawn across iterations.
//!
//! The ramp filtering of FBP depends only on the projection samples, so all
//! N projections are filtered once up front; each objective evaluation just
//! re-backprojects a subset under its candidate angles.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error as ThisError;

use crate::dist::{
    order_stat_means_all, AngleDistribution, DistModel, MvfComponent, MvfParams, PmfParams,
    DEFAULT_GRID_SIZE, DEFAULT_KAPPA_MAX,
};
use crate::error::{Error, Result};
use crate::fbp::{backproject_subset, filter_projections, FbpFilter, FilteredProjections};
use crate::image::ImageGrid;
use crate::ordering::{laplacian_eigenmap_order, KernelScale, OrderingResult};
use crate::radon::radon_forward;
use crate::seed::derive_seed;
use crate::sinogram::Sinogram;
use crate::wrap_angle;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSpec {
    Mvf { components: usize },
    Pmf { bins: usize },
}

impl ModelSpec {
    pub fn param_count(&self) -> usize {
        match self {
            ModelSpec::Mvf { components } => 3 * components,
            ModelSpec::Pmf { bins } => *bins,
        }
    }

    pub fn param_names(&self) -> Vec<String> {
        match self {
            ModelSpec::Mvf { components } => {
                let mut names = Vec::with_capacity(3 * components);
                for prefix in ["w", "mu", "kappa"] {
                    for l in 0..*components {
                        names.push(format!("{prefix}_{l}"));
                    }
                }
                names
            }
            ModelSpec::Pmf { bins } => (0..*bins).map(|l| format!("p_{l}")).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum InitMode {
    /// Near-uniform start: equal weights, concentrations 0.5, equally
    /// spaced means (MVF) or equal bin probabilities (PMF).
    UniformLike,
    /// Random parameters drawn from the fit seed.
    RandomSeeded,
    /// Start from the given distribution.
    Explicit(AngleDistribution),
}

#[derive(Debug, Clone)]
pub struct FitConfig {
    pub model: ModelSpec,
    /// Mirror-descent / gradient step size α.
    pub step_size: f64,
    pub max_iters: usize,
    /// Relative change of the 10-iteration smoothed objective that counts
    /// as converged.
    pub convergence_tol: f64,
    pub fd_step_mean: f64,
    pub fd_step_concentration: f64,
    pub fd_step_weight: f64,
    pub kappa_bounds: (f64, f64),
    pub split_fraction: f64,
    pub seed: u64,
    pub init: InitMode,
    pub filter: FbpFilter,
    pub kernel_scale: KernelScale,
    pub grid_size: usize,
    /// Reconstruction side length; defaults to the detector count.
    pub output_size: Option<usize>,
}

impl FitConfig {
    pub fn new(model: ModelSpec) -> Self {
        FitConfig {
            model,
            step_size: 0.05,
            max_iters: 200,
            convergence_tol: 1e-4,
            fd_step_mean: 1e-2,
            fd_step_concentration: 1e-1,
            fd_step_weight: 1e-3,
            kappa_bounds: (0.0, DEFAULT_KAPPA_MAX),
            split_fraction: 0.8,
            seed: 0,
            init: InitMode::UniformLike,
            filter: FbpFilter::RamLak,
            kernel_scale: KernelScale::Auto,
            grid_size: DEFAULT_GRID_SIZE,
            output_size: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return Err(Error::InvalidInput("step_size must be positive".into()));
        }
        for (name, v) in [
            ("fd_step_mean", self.fd_step_mean),
            ("fd_step_concentration", self.fd_step_concentration),
            ("fd_step_weight", self.fd_step_weight),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive")));
            }
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(Error::InvalidInput("split_fraction must be in (0, 1)".into()));
        }
        let (lo, hi) = self.kappa_bounds;
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi >= lo) {
            return Err(Error::InvalidInput(format!(
                "bad concentration bounds [{lo}, {hi}]"
            )));
        }
        match self.model {
            ModelSpec::Mvf { components } if components < 1 => {
                return Err(Error::InvalidInput("MVF needs at least 1 component".into()));
            }
            ModelSpec::Pmf { bins } if bins < 2 => {
                return Err(Error::InvalidInput("PMF needs at least 2 bins".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Index split of the dataset into reconstruction and validation parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataSplit {
    pub recon: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Uniformly random disjoint split with `round(fraction * n)` reconstruction
/// entries. Deterministic given the rng state.
pub fn split_data(n: usize, fraction: f64, rng: &mut impl Rng) -> Result<DataSplit> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "split fraction must be in (0, 1), got {fraction}"
        )));
    }
    if n < 5 {
        return Err(Error::InvalidInput(format!(
            "need at least 5 projections to split, got {n}"
        )));
    }
    let n_recon = (fraction * n as f64).round() as usize;
    if n_recon == 0 || n_recon == n {
        return Err(Error::InvalidInput(format!(
            "split of {n} at fraction {fraction} leaves an empty part"
        )));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(rng);
    let mut recon = indices[..n_recon].to_vec();
    let mut validation = indices[n_recon..].to_vec();
    recon.sort_unstable();
    validation.sort_unstable();
    Ok(DataSplit { recon, validation })
}

/// Sum over validation pairs of `‖y - R(image, θ)‖₂`.
pub fn cross_validation_error(image: &ImageGrid, validation: &[(f64, &[f64])]) -> Result<f64> {
    if validation.is_empty() {
        return Ok(0.0);
    }
    let detector_count = validation[0].1.len();
    if validation.iter().any(|(_, y)| y.len() != detector_count) {
        return Err(Error::DimensionMismatch {
            expected: format!("{detector_count} samples per validation projection"),
            actual: "mixed lengths".into(),
        });
    }
    let angles: Vec<f64> = validation.iter().map(|(a, _)| *a).collect();
    let simulated = radon_forward(image, &angles, detector_count)?;
    let j = validation
        .iter()
        .zip(simulated.projections())
        .map(|((_, y), sim)| {
            y.iter()
                .zip(sim.samples())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .sum::<f64>();
    if !j.is_finite() {
        return Err(Error::Numerical("cross-validation error is non-finite".into()));
    }
    Ok(j)
}

/// Central finite differences of `objective`, one-sided where a bound blocks
/// a perturbation (`bounds[i]` as `(lower, upper)`); coordinates whose
/// bounds pin them exactly get gradient zero.
pub fn numeric_gradient<F>(
    objective: F,
    params: &[f64],
    steps: &[f64],
    bounds: &[Option<(f64, f64)>],
) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if steps.len() != params.len() || bounds.len() != params.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} steps and bounds", params.len()),
            actual: format!("{} steps, {} bounds", steps.len(), bounds.len()),
        });
    }
    if let Some(bad) = steps.iter().position(|&h| !(h.is_finite() && h > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "finite-difference step for parameter {bad} must be positive"
        )));
    }
    // the unperturbed objective is needed only for one-sided differences
    let needs_baseline = (0..params.len()).any(|i| {
        bounds[i].is_some_and(|(lo, hi)| params[i] + steps[i] > hi || params[i] - steps[i] < lo)
    });
    let baseline = if needs_baseline {
        Some(objective(params)?)
    } else {
        None
    };

    (0..params.len())
        .into_par_iter()
        .map(|i| {
            let h = steps[i];
            let (lo, hi) = bounds[i].unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
            let up_ok = params[i] + h <= hi;
            let down_ok = params[i] - h >= lo;
            let eval = |value: f64| -> Result<f64> {
                let mut point = params.to_vec();
                point[i] = value;
                let j = objective(&point)?;
                if !j.is_finite() {
                    return Err(Error::Numerical(format!(
                        "objective non-finite at perturbation of parameter {i}"
                    )));
                }
                Ok(j)
            };
            let g = match (up_ok, down_ok) {
                (true, true) => (eval(params[i] + h)? - eval(params[i] - h)?) / (2.0 * h),
                (true, false) => {
                    let base = match baseline {
                        Some(b) => b,
                        None => eval(params[i])?,
                    };
                    (eval(params[i] + h)? - base) / h
                }
                (false, true) => {
                    let base = match baseline {
                        Some(b) => b,
                        None => eval(params[i])?,
                    };
                    (base - eval(params[i] - h)?) / h
                }
                (false, false) => 0.0,
            };
            Ok(g)
        })
        .collect()
}

/// Exponentiated-gradient step on the probability simplex:
/// `w'_k = w_k exp(-α g_k) / Σ_l w_l exp(-α g_l)`.
pub fn mirror_step(weights: &[f64], grad: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if weights.len() != grad.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} gradient entries", weights.len()),
            actual: format!("{}", grad.len()),
        });
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::Numerical("non-finite gradient in mirror step".into()));
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidInput("non-finite step size".into()));
    }
    // subtract the max exponent so large gradients cannot overflow
    let exponents: Vec<f64> = grad.iter().map(|g| -alpha * g).collect();
    let m = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let unnormalized: Vec<f64> = weights
        .iter()
        .zip(&exponents)
        .map(|(w, e)| w * (e - m).exp())
        .collect();
    let total: f64 = unnormalized.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::Numerical(format!(
            "mirror step produced unnormalizable weights (sum {total})"
        )));
    }
    Ok(unnormalized.iter().map(|w| w / total).collect())
}

/// Project parameters to their feasible set: means wrap into `[0, 2π)`,
/// concentrations clamp to bounds, simplex blocks renormalize.
pub fn project_params(model: &ModelSpec, params: &[f64], kappa_bounds: (f64, f64)) -> Vec<f64> {
    let mut out = params.to_vec();
    match model {
        ModelSpec::Mvf { components } => {
            let l = *components;
            let wsum: f64 = out[..l].iter().sum();
            if wsum > 0.0 {
                for w in &mut out[..l] {
                    *w /= wsum;
                }
            }
            for mu in &mut out[l..2 * l] {
                *mu = wrap_angle(*mu);
            }
            for kappa in &mut out[2 * l..3 * l] {
                *kappa = kappa.clamp(kappa_bounds.0, kappa_bounds.1);
            }
        }
        ModelSpec::Pmf { .. } => {
            let total: f64 = out.iter().sum();
            if total > 0.0 {
                for p in &mut out {
                    *p /= total;
                }
            }
        }
    }
    out
}

/// Build the distribution a parameter vector describes. Simplex blocks are
/// renormalized and means wrapped, so gradient probes a finite difference
/// away from the simplex still evaluate a proper distribution.
pub fn dist_from_params(
    model: &ModelSpec,
    params: &[f64],
    grid_size: usize,
    kappa_bounds: (f64, f64),
) -> Result<AngleDistribution> {
    if params.len() != model.param_count() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} parameters", model.param_count()),
            actual: format!("{}", params.len()),
        });
    }
    let feasible = project_params(model, params, kappa_bounds);
    let dist_model = match model {
        ModelSpec::Mvf { components } => {
            let l = *components;
            DistModel::Mvf(MvfParams::new(
                (0..l)
                    .map(|i| MvfComponent {
                        weight: feasible[i],
                        mean: feasible[l + i],
                        concentration: feasible[2 * l + i],
                    })
                    .collect(),
            )?)
        }
        ModelSpec::Pmf { .. } => DistModel::Pmf(PmfParams::new(feasible)?),
    };
    AngleDistribution::new(dist_model, grid_size)
}

/// Flatten a distribution into the parameter-vector layout of its model.
pub fn params_from_dist(dist: &AngleDistribution) -> (ModelSpec, Vec<f64>) {
    match dist.model() {
        DistModel::Mvf(m) => {
            let l = m.components().len();
            let mut params = Vec::with_capacity(3 * l);
            params.extend(m.components().iter().map(|c| c.weight));
            params.extend(m.components().iter().map(|c| c.mean));
            params.extend(m.components().iter().map(|c| c.concentration));
            (ModelSpec::Mvf { components: l }, params)
        }
        DistModel::Pmf(p) => (
            ModelSpec::Pmf {
                bins: p.probabilities().len(),
            },
            p.probabilities().to_vec(),
        ),
    }
}

/// Angles for every projection: the k-th in placeholder order receives the
/// expected k-th order statistic of `dist`. Returned indexed by original
/// projection position.
pub fn assign_angles(ordering: &OrderingResult, dist: &AngleDistribution) -> Result<Vec<f64>> {
    let n = ordering.permutation.len();
    let means = order_stat_means_all(dist, n)?;
    let mut angles = vec![0.0; n];
    for (k, &original) in ordering.permutation.iter().enumerate() {
        angles[original] = means[k];
    }
    Ok(angles)
}

#[derive(Debug, Clone)]
pub struct FitIterationRecord {
    pub iteration: usize,
    pub objective: f64,
    /// Parameter snapshot at which the objective was evaluated.
    pub params: Vec<f64>,
    pub split_seed: u64,
}

#[derive(Debug, Clone)]
pub struct FitTrace {
    pub param_names: Vec<String>,
    pub records: Vec<FitIterationRecord>,
}

impl FitTrace {
    /// CSV rows `iter,J,param_0,...,param_{P-1}`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("iter,J");
        for i in 0..self.param_names.len() {
            out.push_str(&format!(",param_{i}"));
        }
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!("{},{}", r.iteration, r.objective));
            for p in &r.params {
                out.push_str(&format!(",{p}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    /// Mean objective over `window` records starting at `start` (clipped).
    pub fn smoothed_objective(&self, start: usize, window: usize) -> Option<f64> {
        let end = (start + window).min(self.records.len());
        let slice = self.records.get(start..end)?;
        if slice.is_empty() {
            return None;
        }
        Some(slice.iter().map(|r| r.objective).sum::<f64>() / slice.len() as f64)
    }
}

#[derive(Debug, Clone)]
pub struct FitOutput {
    pub image: ImageGrid,
    pub distribution: AngleDistribution,
    pub trace: FitTrace,
    /// Final assigned angle per original projection index.
    pub assigned_angles: Vec<f64>,
    pub ordering: OrderingResult,
    pub converged_at: Option<usize>,
}

#[derive(Debug, ThisError)]
pub enum FitError {
    #[error("objective became non-finite at iteration {iteration}")]
    NonFinite { iteration: usize, trace: FitTrace },
    #[error(transparent)]
    Core(#[from] Error),
}

struct Engine<'a> {
    sino: &'a Sinogram,
    filtered: FilteredProjections,
    ordering: OrderingResult,
    model: ModelSpec,
    grid_size: usize,
    kappa_bounds: (f64, f64),
    output_size: usize,
}

impl Engine<'_> {
    fn reconstruct(&self, angles: &[f64], subset: &[usize]) -> Result<ImageGrid> {
        let sub_angles: Vec<f64> = subset.iter().map(|&i| angles[i]).collect();
        backproject_subset(&self.filtered, subset, &sub_angles, self.output_size)
    }

    fn objective(&self, params: &[f64], split: &DataSplit) -> Result<f64> {
        let dist = dist_from_params(&self.model, params, self.grid_size, self.kappa_bounds)?;
        let angles = assign_angles(&self.ordering, &dist)?;
        let image = self.reconstruct(&angles, &split.recon)?;
        let validation: Vec<(f64, &[f64])> = split
            .validation
            .iter()
            .map(|&i| (angles[i], self.sino.projections()[i].samples()))
            .collect();
        cross_validation_error(&image, &validation)
    }

    /// Reconstruction from all projections under `dist`'s order-statistic
    /// angle assignment.
    fn full_reconstruction(&self, dist: &AngleDistribution) -> Result<(ImageGrid, Vec<f64>)> {
        let angles = assign_angles(&self.ordering, dist)?;
        let all: Vec<usize> = (0..self.sino.len()).collect();
        let image = self.reconstruct(&angles, &all)?;
        Ok((image, angles))
    }
}

fn initial_params(cfg: &FitConfig) -> Result<Vec<f64>> {
    match &cfg.init {
        InitMode::UniformLike => Ok(match cfg.model {
            ModelSpec::Mvf { components } => {
                let l = components;
                let mut p = vec![1.0 / l as f64; l];
                p.extend((0..l).map(|i| i as f64 * std::f64::consts::TAU / l as f64));
                p.extend(std::iter::repeat(0.5).take(l));
                p
            }
            ModelSpec::Pmf { bins } => vec![1.0 / bins as f64; bins],
        }),
        InitMode::RandomSeeded => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "init", 0));
            Ok(match cfg.model {
                ModelSpec::Mvf { components } => {
                    let l = components;
                    let raw: Vec<f64> = (0..l).map(|_| rng.random::<f64>() + 0.1).collect();
                    let total: f64 = raw.iter().sum();
                    let mut p: Vec<f64> = raw.iter().map(|v| v / total).collect();
                    p.extend((0..l).map(|_| rng.random::<f64>() * std::f64::consts::TAU));
                    let kappa_hi = cfg.kappa_bounds.1.min(5.0).max(cfg.kappa_bounds.0);
                    p.extend((0..l).map(|_| {
                        cfg.kappa_bounds.0 + rng.random::<f64>() * (kappa_hi - cfg.kappa_bounds.0)
                    }));
                    p
                }
                ModelSpec::Pmf { bins } => {
                    let raw: Vec<f64> = (0..bins).map(|_| rng.random::<f64>() + 0.1).collect();
                    let total: f64 = raw.iter().sum();
                    raw.iter().map(|v| v / total).collect()
                }
            })
        }
        InitMode::Explicit(dist) => {
            let (model, params) = params_from_dist(dist);
            if model != cfg.model {
                return Err(Error::InvalidInput(
                    "explicit initial distribution does not match the configured model".into(),
                ));
            }
            Ok(params)
        }
    }
}

/// Per-parameter finite-difference steps and feasibility bounds in the
/// layout of the parameter vector.
fn fd_steps_and_bounds(cfg: &FitConfig) -> (Vec<f64>, Vec<Option<(f64, f64)>>) {
    match cfg.model {
        ModelSpec::Mvf { components } => {
            let l = components;
            let mut steps = vec![cfg.fd_step_weight; l];
            steps.extend(std::iter::repeat(cfg.fd_step_mean).take(l));
            steps.extend(std::iter::repeat(cfg.fd_step_concentration).take(l));
            let mut bounds: Vec<Option<(f64, f64)>> = vec![Some((0.0, 1.0)); l];
            bounds.extend(std::iter::repeat(None).take(l)); // means wrap freely
            bounds.extend(std::iter::repeat(Some(cfg.kappa_bounds)).take(l));
            (steps, bounds)
        }
        ModelSpec::Pmf { bins } => {
            (vec![cfg.fd_step_weight; bins], vec![Some((0.0, 1.0)); bins])
        }
    }
}

/// Characteristic parameter scales used to compare gradient entries across
/// blocks before normalizing the update direction.
fn param_scales(cfg: &FitConfig) -> Vec<f64> {
    match cfg.model {
        ModelSpec::Mvf { components } => {
            let l = components;
            let mut s = vec![0.2; l]; // weights
            s.extend(std::iter::repeat(1.0).take(l)); // means, radians
            s.extend(std::iter::repeat(5.0).take(l)); // concentrations
            s
        }
        ModelSpec::Pmf { bins } => vec![1.0 / bins as f64; bins],
    }
}

/// One parameter update: per-block normalized-gradient steps.
///
/// The raw objective scales with the validation count and projection norms,
/// so each parameter block (weights | means | concentrations, or the PMF
/// simplex) is normalized by its own largest entry; α then caps that
/// block's per-iteration movement (α radians for means, 5α for
/// concentrations, exponent 2α for simplex blocks). Per-block rather than
/// global normalization keeps a strongly-driven block from freezing the
/// others.
fn update_params(
    cfg: &FitConfig,
    params: &[f64],
    grad: &[f64],
    iteration: usize,
) -> Result<Vec<f64>> {
    let normalized = |g: &[f64]| -> Vec<f64> {
        let m = g.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if m == 0.0 {
            vec![0.0; g.len()]
        } else {
            g.iter().map(|v| v / m).collect()
        }
    };
    // 1/t-style decay: large early moves, settling in the final stretch
    let alpha = cfg.step_size / (1.0 + iteration as f64 / STEP_DECAY_ITERS);
    let mut next = params.to_vec();
    match cfg.model {
        ModelSpec::Mvf { components } => {
            let l = components;
            let dir_w = normalized(&grad[..l]);
            let dir_mu = normalized(&grad[l..2 * l]);
            let dir_kappa = normalized(&grad[2 * l..3 * l]);
            let new_w = mirror_step(&params[..l], &dir_w, 2.0 * alpha)?;
            next[..l].copy_from_slice(&new_w);
            for i in 0..l {
                next[l + i] = params[l + i] - alpha * dir_mu[i];
                next[2 * l + i] = params[2 * l + i] - 5.0 * alpha * dir_kappa[i];
            }
        }
        ModelSpec::Pmf { .. } => {
            let new_p = mirror_step(params, &normalized(grad), 2.0 * alpha)?;
            next.copy_from_slice(&new_p);
        }
    }
    Ok(project_params(&cfg.model, &next, cfg.kappa_bounds))
}

const SMOOTHING_WINDOW: usize = 10;
const STEP_DECAY_ITERS: f64 = 40.0;

/// Run the full estimator on unordered, unlabeled projections.
pub fn fit(sino: &Sinogram, cfg: &FitConfig) -> std::result::Result<FitOutput, FitError> {
    cfg.validate()?;
    let n = sino.len();
    if n < 20 {
        return Err(FitError::Core(Error::InvalidInput(format!(
            "fit needs at least 20 projections, got {n}"
        ))));
    }
    let ordering = laplacian_eigenmap_order(sino, cfg.kernel_scale)?;
    let filtered = filter_projections(sino, cfg.filter);
    let engine = Engine {
        sino,
        filtered,
        ordering,
        model: cfg.model.clone(),
        grid_size: cfg.grid_size,
        kappa_bounds: cfg.kappa_bounds,
        output_size: cfg.output_size.unwrap_or_else(|| sino.detector_count()),
    };
    let (fd_steps, bounds) = fd_steps_and_bounds(cfg);
    let mut params = project_params(&cfg.model, &initial_params(cfg)?, cfg.kappa_bounds);

    let mut trace = FitTrace {
        param_names: cfg.model.param_names(),
        records: Vec::with_capacity(cfg.max_iters),
    };
    let mut converged_at = None;

    for iteration in 0..cfg.max_iters {
        let split_seed = derive_seed(cfg.seed, "split", iteration as u64);
        let mut split_rng = ChaCha8Rng::seed_from_u64(split_seed);
        let split = split_data(n, cfg.split_fraction, &mut split_rng)?;

        let objective = |p: &[f64]| engine.objective(p, &split);
        let current = objective(&params)?;
        if !current.is_finite() {
            return Err(FitError::NonFinite { iteration, trace });
        }
        trace.records.push(FitIterationRecord {
            iteration,
            objective: current,
            params: params.clone(),
            split_seed,
        });

        // converged when two adjacent smoothed windows agree to tolerance
        if trace.records.len() >= 2 * SMOOTHING_WINDOW {
            let t = trace.records.len();
            let now = trace.smoothed_objective(t - SMOOTHING_WINDOW, SMOOTHING_WINDOW);
            let prev = trace.smoothed_objective(t - 2 * SMOOTHING_WINDOW, SMOOTHING_WINDOW);
            if let (Some(now), Some(prev)) = (now, prev) {
                if (now - prev).abs() <= cfg.convergence_tol * prev.abs().max(f64::MIN_POSITIVE) {
                    converged_at = Some(iteration);
                    break;
                }
            }
        }

        let grad = numeric_gradient(objective, &params, &fd_steps, &bounds)?;
        params = update_params(cfg, &params, &grad, iteration)?;
    }

    let distribution = dist_from_params(&cfg.model, &params, cfg.grid_size, cfg.kappa_bounds)?;
    let (image, assigned_angles) = engine.full_reconstruction(&distribution)?;
    Ok(FitOutput {
        image,
        distribution,
        trace,
        assigned_angles,
        ordering: engine.ordering,
        converged_at,
    })
}

#[derive(Debug, Clone)]
pub struct BaselineOutput {
    pub image: ImageGrid,
    pub assigned_angles: Vec<f64>,
    pub ordering: OrderingResult,
}

/// Graph-Laplacian baseline assuming uniformly distributed angles: eigenmap
/// ordering, uniform order-statistic means, FBP on all projections.
pub fn baseline_gltu(sino: &Sinogram, cfg: &FitConfig) -> Result<BaselineOutput> {
    let ordering = laplacian_eigenmap_order(sino, cfg.kernel_scale)?;
    let filtered = filter_projections(sino, cfg.filter);
    let engine = Engine {
        sino,
        filtered,
        ordering,
        model: ModelSpec::Mvf { components: 1 },
        grid_size: cfg.grid_size,
        kappa_bounds: cfg.kappa_bounds,
        output_size: cfg.output_size.unwrap_or_else(|| sino.detector_count()),
    };
    let uniform = AngleDistribution::new(
        DistModel::Mvf(MvfParams::new(vec![MvfComponent {
            weight: 1.0,
            mean: 0.0,
            concentration: 0.0,
        }])?),
        cfg.grid_size,
    )?;
    let (image, assigned_angles) = engine.full_reconstruction(&uniform)?;
    Ok(BaselineOutput {
        image,
        assigned_angles,
        ordering: engine.ordering,
    })
}

/// Oracle baseline: FBP with the true angles carried by the sinogram.
pub fn baseline_orp(sino: &Sinogram, filter: FbpFilter, output_size: usize) -> Result<ImageGrid> {
    crate::fbp::fbp_reconstruct(sino, filter, output_size)
}
