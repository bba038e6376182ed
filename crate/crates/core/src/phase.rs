//! Global-phase canonicalization: divide out the principal N-th root of the
//! determinant so that phase-equivalent unitaries land on (nearly) the same
//! point, up to an N-th root of unity.

use num_complex::Complex64;

use crate::unitary::Unitary;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCanonical {
    /// Determinant-one representative.
    pub representative: Unitary,
    /// Unit phase with `phase * representative == original`.
    pub phase: Complex64,
}

/// Principal N-th root of `det(u)`, argument in `(-pi/N, pi/N]`.
pub fn principal_det_root(u: &Unitary) -> Complex64 {
    let det = u.determinant();
    let n = u.dim() as f64;
    Complex64::from_polar(1.0, det.arg() / n)
}

pub fn canonical_phase(u: &Unitary) -> PhaseCanonical {
    let phase = principal_det_root(u);
    PhaseCanonical {
        representative: u.scaled(phase.conj()),
        phase,
    }
}

/// The N-th roots of unity `e^{2 pi i k / N}`, `k = 0..N`.
pub fn roots_of_unity(n: usize) -> impl Iterator<Item = Complex64> {
    (0..n).map(move |k| Complex64::from_polar(1.0, core::f64::consts::TAU * k as f64 / n as f64))
}
