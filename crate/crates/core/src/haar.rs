//! Haar-random unitaries from complex Ginibre matrices.
//!
//! The generator is ChaCha8 (`rand_chacha`) seeded with `seed_from_u64`, so a
//! seed fully determines the matrix on every platform.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::math;
use crate::unitary::Unitary;

/// The fixed PRNG used for every seeded experiment in this crate.
pub type ExperimentRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ExperimentRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws a Haar-distributed `dim x dim` unitary for `seed`.
pub fn haar_random(dim: usize, seed: u64) -> Result<Unitary> {
    haar_random_with(dim, &mut seeded_rng(seed))
}

/// Draws from an existing stream; successive calls give independent samples.
pub fn haar_random_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Unitary> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    // Columns of a Ginibre matrix, then Gram-Schmidt. Gram-Schmidt leaves R with
    // a positive real diagonal, which makes Q exactly Haar distributed.
    let scale = core::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();

    for j in 0..dim {
        // Two projection passes keep the result orthonormal to ~1e-15.
        for _ in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let qk = &done[k];
                let v = &mut rest[0];
                let proj: Complex64 = qk.iter().zip(v.iter()).map(|(q, x)| q.conj() * x).sum();
                for (x, q) in v.iter_mut().zip(qk) {
                    *x -= proj * q;
                }
            }
        }
        let norm = math::sqrt(cols[j].iter().map(|z| z.norm_sqr()).sum());
        if norm == 0.0 {
            return Err(Error::invalid("seed", "degenerate Ginibre sample"));
        }
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }

    let mut entries = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        entries.extend(cols.iter().map(|col| col[r]));
    }
    Unitary::new(dim, entries)
}
