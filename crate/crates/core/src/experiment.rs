//! Depth scaling experiments and mesh-size estimation.

use alloc::vec::Vec;

use crate::compile::{CompileOptions, MitmCompiler};
use crate::error::{Error, Result};
use crate::haar::{haar_random, haar_random_with, seeded_rng};
use crate::index::IndexMode;
use crate::math;
use crate::par::Stopwatch;
use crate::unitary::Unitary;
use crate::variants::{make_variants, GateSet, VariantMode};

/// Infidelities at or below this are reported as exact hits.
pub const EXACT_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub gate_set_seed: u64,
    pub mode: VariantMode,
    pub total_depth: usize,
    pub best_infidelity: f64,
    pub best_frobenius: f64,
    pub wall_seconds: f64,
    pub points: u64,
    pub index_mode: IndexMode,
    /// The target was reproduced to within [`EXACT_THRESHOLD`].
    pub exact: bool,
}

/// Least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// Depth against `log10(1 / median infidelity)`.
    pub infidelity_fit: Option<LinearFit>,
    /// Depth against `log10(1 / median Frobenius distance)`.
    pub frobenius_fit: Option<LinearFit>,
}

/// Ordinary least squares; needs two distinct abscissae.
pub fn fit_line(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(Error::invalid("points", "a line needs at least two points"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::invalid("points", "abscissae are all equal"));
    }
    let slope = sxy / sxx;
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        points: points.to_vec(),
    })
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// The gate set built from the Haar sample with this seed.
pub fn seeded_gate_set(seed: u64, mode: VariantMode) -> Result<GateSet> {
    make_variants(&haar_random(4, seed)?, mode)
}

/// Compiles `target` for every `(seed, depth)` pair and fits depth against
/// the per-depth median error. `on_row` sees each row as soon as it exists,
/// so callers can persist partial results if a later compile fails.
pub fn scaling_experiment(
    mode: VariantMode,
    target: &Unitary,
    seeds: &[u64],
    depths: &[usize],
    options: CompileOptions,
    mut on_row: impl FnMut(&ScalingRow),
) -> Result<ScalingReport> {
    if depths.is_empty() || seeds.is_empty() {
        return Err(Error::invalid("depths", "need at least one seed and one depth"));
    }
    if let Some(d) = depths.iter().find(|&&d| d % 2 == 1) {
        return Err(Error::invalid("depths", alloc::format!("{d} is odd")));
    }
    if depths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("depths", "must be strictly ascending"));
    }
    let mut rows = Vec::with_capacity(seeds.len() * depths.len());
    for &seed in seeds {
        let gs = seeded_gate_set(seed, mode)?;
        for &depth in depths {
            let clock = Stopwatch::start();
            let result = MitmCompiler::new(&gs, depth / 2, options)?.compile(target)?;
            let row = ScalingRow {
                gate_set_seed: seed,
                mode,
                total_depth: depth,
                best_infidelity: result.infidelity,
                best_frobenius: result.frobenius,
                wall_seconds: clock.seconds(),
                points: result.stats.points,
                index_mode: options.mode,
                exact: result.infidelity <= EXACT_THRESHOLD,
            };
            on_row(&row);
            rows.push(row);
        }
    }
    let infidelity_fit = median_fit(&rows, depths, |r| r.best_infidelity);
    let frobenius_fit = median_fit(&rows, depths, |r| r.best_frobenius);
    Ok(ScalingReport {
        rows,
        infidelity_fit,
        frobenius_fit,
    })
}

/// Fit over depths whose median error is positive; `None` if fewer than two.
pub fn median_fit(rows: &[ScalingRow], depths: &[usize], error: impl Fn(&ScalingRow) -> f64) -> Option<LinearFit> {
    let points: Vec<(f64, f64)> = depths
        .iter()
        .filter_map(|&d| {
            let mut errs: Vec<f64> = rows.iter().filter(|r| r.total_depth == d).map(&error).collect();
            if errs.is_empty() {
                return None;
            }
            let m = median(&mut errs);
            (m > 0.0).then(|| (math::log10(1.0 / m), d as f64))
        })
        .collect();
    fit_line(&points).ok()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshEstimate {
    /// Largest best-achievable infidelity over the sampled targets.
    pub infidelity: f64,
    /// Largest phase-aligned Frobenius distance over the sampled targets.
    pub frobenius: f64,
}

/// Sampled lower bound on the covering radius of the length-`2 * half_depth`
/// words. Targets are drawn in order from one stream, so a larger
/// `n_targets` extends the sample of a smaller one.
pub fn mesh_size_estimate(
    gs: &GateSet,
    half_depth: usize,
    n_targets: usize,
    seed: u64,
    options: CompileOptions,
) -> Result<MeshEstimate> {
    if n_targets == 0 {
        return Err(Error::invalid("n_targets", "must be at least 1"));
    }
    let compiler = MitmCompiler::new(gs, half_depth, options)?;
    let mut rng = seeded_rng(seed);
    let mut est = MeshEstimate {
        infidelity: 0.0,
        frobenius: 0.0,
    };
    for _ in 0..n_targets {
        let target = haar_random_with(gs.dim(), &mut rng)?;
        let r = compiler.compile(&target)?;
        est.infidelity = est.infidelity.max(r.infidelity);
        est.frobenius = est.frobenius.max(r.frobenius);
    }
    Ok(est)
}
