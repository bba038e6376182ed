//! Logical-error Monte Carlo for two noisy logical `X` gates.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};

use super::circuit::{Circuit, CircuitOp, Gate};
use super::codes::{
    build_repetition_mfqec, build_shor_mfqec, encode_repetition, encode_shor, encode_shor_state, shor_logical_x,
    Logical, REPETITION_QUBITS, SHOR_QUBITS,
};
use super::noise::{coherent_error, NoiseSites, NoiseSpec};
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::experiment::{fit_line, LinearFit};
use crate::haar::{seeded_rng, ExperimentRng};
use crate::math;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Protocol {
    /// One bare qubit.
    NoQec,
    /// Shor-encoded, no correction.
    EncodeOnly,
    /// Shor-encoded followed by one measurement-free correction round.
    MfQec,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::NoQec, Protocol::EncodeOnly, Protocol::MfQec];

    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::NoQec => "no_qec",
            Protocol::EncodeOnly => "encode_only",
            Protocol::MfQec => "mf_qec",
        }
    }
}

impl core::fmt::Display for Protocol {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::invalid("protocol", alloc::format!("unknown value `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QecReport {
    pub protocol: Protocol,
    pub epsilon: f64,
    pub logical_error_probability: f64,
    pub seed: u64,
}

/// Seed for sample `index` of a run with `master` seed; independent of
/// scheduling and shared by all protocols at that index.
pub fn sample_seed(master: u64, index: u64) -> u64 {
    let mut rng = ExperimentRng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

fn apply_noisy(state: &mut StateVector, op: &CircuitOp, epsilon: f64, rng: &mut ExperimentRng) -> Result<()> {
    state.apply(op)?;
    for q in op.qubits() {
        let e = coherent_error(epsilon, rng)?;
        state.apply(&CircuitOp::single(Gate::from_unitary(&e)?, q))?;
    }
    Ok(())
}

fn apply_logical_x_twice(
    state: &mut StateVector,
    ops: &[CircuitOp],
    epsilon: f64,
    rng: &mut ExperimentRng,
) -> Result<()> {
    for _ in 0..2 {
        for op in ops {
            apply_noisy(state, op, epsilon, rng)?;
        }
    }
    Ok(())
}

/// Runs one sample; the noise generator is seeded from `noise.seed`.
pub fn run_sample(protocol: Protocol, noise: &NoiseSpec) -> Result<QecReport> {
    run_sample_with(protocol, noise, &build_shor_mfqec())
}

fn run_sample_with(protocol: Protocol, noise: &NoiseSpec, shor: &Circuit) -> Result<QecReport> {
    let mut rng = seeded_rng(noise.seed);
    let eps = noise.epsilon;
    let fidelity = match protocol {
        Protocol::NoQec => {
            let ideal = StateVector::zero(1)?;
            let mut s = ideal.clone();
            apply_logical_x_twice(&mut s, &[CircuitOp::single(Gate::X, 0)], eps, &mut rng)?;
            s.register_fidelity(&ideal)?
        }
        Protocol::EncodeOnly | Protocol::MfQec => {
            let ideal = encode_shor(Logical::Zero);
            let mut data = ideal.clone();
            apply_logical_x_twice(&mut data, &shor_logical_x(), eps, &mut rng)?;
            if protocol == Protocol::EncodeOnly {
                data.register_fidelity(&ideal)?
            } else {
                let mut full = StateVector::embed(&data, SHOR_QUBITS)?;
                for op in shor.ops() {
                    match noise.sites {
                        NoiseSites::LogicalOpsOnly => full.apply(op)?,
                        NoiseSites::AllGates => apply_noisy(&mut full, op, eps, &mut rng)?,
                    }
                }
                full.register_fidelity(&ideal)?
            }
        }
    };
    Ok(QecReport {
        protocol,
        epsilon: eps,
        logical_error_probability: (1.0 - fidelity).clamp(0.0, 1.0),
        seed: noise.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonSampling {
    /// Every sample uses its grid point exactly.
    Grid,
    /// Log-uniform within the geometric cell around each grid point.
    LogUniformCell,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub protocols: Vec<Protocol>,
    pub epsilons: Vec<f64>,
    pub samples_per_point: usize,
    pub seed: u64,
    pub sites: NoiseSites,
    pub sampling: EpsilonSampling,
}

/// `points` values evenly spaced in `log10` over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo) || points == 0 {
        return Err(Error::invalid(
            "epsilon_grid",
            "need 0 < lo <= hi and at least one point",
        ));
    }
    if points == 1 {
        return Ok(alloc::vec![lo]);
    }
    let (a, b) = (math::log10(lo), math::log10(hi));
    Ok((0..points)
        .map(|i| math::powf(10.0, a + (b - a) * i as f64 / (points - 1) as f64))
        .collect())
}

fn cell_bounds(grid: &[f64], i: usize) -> (f64, f64) {
    let g = grid[i];
    let ratio = |j: usize| math::sqrt(grid[j + 1] / grid[j]);
    let below = if i > 0 && grid[i - 1] > 0.0 {
        ratio(i - 1)
    } else if i + 1 < grid.len() {
        ratio(i)
    } else {
        1.0
    };
    let above = if i + 1 < grid.len() { ratio(i) } else { below };
    (g / below, (g * above).min(1.0 - 1e-12))
}

/// Reports grouped by protocol, then by grid point and sample index.
pub fn sweep(config: &SweepConfig) -> Result<Vec<QecReport>> {
    if config.samples_per_point == 0 {
        return Err(Error::invalid("samples_per_point", "must be at least 1"));
    }
    if config.protocols.is_empty() {
        return Err(Error::invalid("protocols", "must not be empty"));
    }
    for &e in &config.epsilons {
        NoiseSpec::new(e, config.sites, 0)?;
    }
    let per_point = config.samples_per_point;
    let jobs = config.epsilons.len() * per_point;
    let needs_shor = config.protocols.contains(&Protocol::MfQec);
    let shor = if needs_shor {
        build_shor_mfqec()
    } else {
        Circuit::new(SHOR_QUBITS)
    };
    let results = par::map_range(jobs, |job| -> Result<Vec<QecReport>> {
        let point = job / per_point;
        let seed = sample_seed(config.seed, job as u64);
        let grid_eps = config.epsilons[point];
        let epsilon = match config.sampling {
            EpsilonSampling::Grid => grid_eps,
            EpsilonSampling::LogUniformCell if grid_eps == 0.0 => 0.0,
            EpsilonSampling::LogUniformCell => {
                let (lo, hi) = cell_bounds(&config.epsilons, point);
                let mut rng = ExperimentRng::seed_from_u64(seed);
                rng.set_stream(u64::MAX);
                let u: f64 = rng.random();
                math::powf(10.0, math::log10(lo) + u * (math::log10(hi) - math::log10(lo)))
            }
        };
        let noise = NoiseSpec::new(epsilon, config.sites, seed)?;
        config
            .protocols
            .iter()
            .map(|&p| run_sample_with(p, &noise, &shor))
            .collect()
    });
    let mut by_job = Vec::with_capacity(jobs);
    for r in results {
        by_job.push(r?);
    }
    let mut out = Vec::with_capacity(jobs * config.protocols.len());
    for k in 0..config.protocols.len() {
        out.extend(by_job.iter().map(|reports| reports[k]));
    }
    Ok(out)
}

/// Largest error per grid point for one protocol; samples are assigned to
/// the grid point nearest in `log10`.
pub fn upper_envelope(reports: &[QecReport], protocol: Protocol, grid: &[f64]) -> Vec<(f64, f64)> {
    let mut env: Vec<(f64, f64)> = grid.iter().map(|&g| (g, f64::NEG_INFINITY)).collect();
    for r in reports.iter().filter(|r| r.protocol == protocol && r.epsilon > 0.0) {
        let slot = grid
            .iter()
            .enumerate()
            .filter(|(_, g)| **g > 0.0)
            .min_by(|a, b| {
                let da = math::abs(math::log10(*a.1) - math::log10(r.epsilon));
                let db = math::abs(math::log10(*b.1) - math::log10(r.epsilon));
                da.total_cmp(&db)
            })
            .map(|(i, _)| i);
        if let Some(i) = slot {
            env[i].1 = env[i].1.max(r.logical_error_probability);
        }
    }
    env.retain(|e| e.1 > f64::NEG_INFINITY);
    env
}

/// Log-log slope of the upper envelope over grid points in `[lo, hi]`.
pub fn envelope_slope(reports: &[QecReport], protocol: Protocol, grid: &[f64], lo: f64, hi: f64) -> Result<LinearFit> {
    let points: Vec<(f64, f64)> = upper_envelope(reports, protocol, grid)
        .into_iter()
        .filter(|(e, m)| *e >= lo * (1.0 - 1e-9) && *e <= hi * (1.0 + 1e-9) && *m > 0.0)
        .map(|(e, m)| (math::log10(e), math::log10(m)))
        .collect();
    fit_line(&points)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub fidelity: f64,
    /// Minimum fidelity for a pass.
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.fidelity >= self.threshold
    }
}

/// A logical state with no special relation to the code basis.
fn generic_amplitudes() -> (Complex64, Complex64) {
    (
        Complex64::new(math::cos(0.3), 0.0),
        Complex64::from_polar(math::sin(0.3), 0.7),
    )
}

fn pauli_gate(p: char) -> Gate {
    match p {
        'X' => Gate::X,
        'Y' => Gate::Y,
        _ => Gate::Z,
    }
}

/// Applies `error` to `data`, embeds it with clean ancillas, runs `circuit`
/// and returns the data-register fidelity with the unerrored input.
pub fn correct_and_compare(data: &StateVector, error: Option<(char, usize)>, circuit: &Circuit) -> Result<f64> {
    let mut noisy = data.clone();
    if let Some((p, q)) = error {
        noisy.apply(&CircuitOp::single(pauli_gate(p), q))?;
    }
    let mut full = StateVector::embed(&noisy, circuit.n_qubits())?;
    full.apply_circuit(circuit)?;
    full.register_fidelity(data)
}

/// Single-error exactness of both codes on a generic logical state: the
/// error-free case and every single `X` on repetition-code data, then the
/// error-free case and all 27 single-qubit Paulis on Shor-code data.
pub fn verification_suite() -> Result<Vec<Check>> {
    let (alpha, beta) = generic_amplitudes();
    let mut checks = Vec::new();
    let rep = build_repetition_mfqec();
    debug_assert_eq!(rep.n_qubits(), REPETITION_QUBITS);
    let rep_data = encode_repetition(alpha, beta)?;
    checks.push(Check {
        name: "repetition none".into(),
        fidelity: correct_and_compare(&rep_data, None, &rep)?,
        threshold: 1.0 - 1e-12,
    });
    for q in 0..3 {
        checks.push(Check {
            name: alloc::format!("repetition X{q}"),
            fidelity: correct_and_compare(&rep_data, Some(('X', q)), &rep)?,
            threshold: 1.0 - 1e-10,
        });
    }
    let shor = build_shor_mfqec();
    let shor_data = encode_shor_state(alpha, beta)?;
    checks.push(Check {
        name: "shor none".into(),
        fidelity: correct_and_compare(&shor_data, None, &shor)?,
        threshold: 1.0 - 1e-10,
    });
    for p in ['X', 'Y', 'Z'] {
        for q in 0..9 {
            checks.push(Check {
                name: alloc::format!("shor {p}{q}"),
                fidelity: correct_and_compare(&shor_data, Some((p, q)), &shor)?,
                threshold: 1.0 - 1e-10,
            });
        }
    }
    Ok(checks)
}
