//! Coherent single-qubit gate errors.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, UnitSphere};

use crate::error::{Error, Result};
use crate::math;
use crate::unitary::Unitary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseSites {
    /// Only the physical gates of logical operations are perturbed.
    LogicalOpsOnly,
    /// Every gate of the correction circuit as well, on each qubit it touches.
    AllGates,
}

impl NoiseSites {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseSites::LogicalOpsOnly => "logical_ops_only",
            NoiseSites::AllGates => "all_gates",
        }
    }
}

impl core::str::FromStr for NoiseSites {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logical_ops_only" => Ok(NoiseSites::LogicalOpsOnly),
            "all_gates" => Ok(NoiseSites::AllGates),
            other => Err(Error::invalid("sites", alloc::format!("unknown value `{other}`"))),
        }
    }
}

/// Error strength and placement; axes are uniform on the sphere, drawn fresh
/// for every perturbed gate from a generator seeded with `seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub epsilon: f64,
    pub sites: NoiseSites,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(epsilon: f64, sites: NoiseSites, seed: u64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(NoiseSpec { epsilon, sites, seed })
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::invalid("epsilon", alloc::format!("{epsilon} is outside [0, 1)")));
    }
    Ok(())
}

/// `exp(-i theta/2 n.sigma)` about a uniformly random axis `n`, with
/// `cos(theta/2) = 1 - epsilon` so that its infidelity to the identity is
/// exactly `epsilon`.
pub fn coherent_error<R: Rng + ?Sized>(epsilon: f64, rng: &mut R) -> Result<Unitary> {
    check_epsilon(epsilon)?;
    let [nx, ny, nz]: [f64; 3] = UnitSphere.sample(rng);
    Ok(rotation(epsilon, [nx, ny, nz]))
}

/// The rotation of [`coherent_error`] about a fixed unit axis.
pub fn rotation(epsilon: f64, [nx, ny, nz]: [f64; 3]) -> Unitary {
    let c = 1.0 - epsilon;
    let s = math::sqrt((1.0 - c * c).max(0.0));
    // c I - i s (nx X + ny Y + nz Z)
    let entries = alloc::vec![
        Complex64::new(c, -s * nz),
        Complex64::new(-s * ny, -s * nx),
        Complex64::new(s * ny, -s * nx),
        Complex64::new(c, s * nz),
    ];
    Unitary::from_entries_unchecked(2, entries)
}
