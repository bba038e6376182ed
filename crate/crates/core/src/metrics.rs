//! Distances between unitaries.

use crate::error::Result;
use crate::math;
use crate::unitary::{check_dims, trace_inner, Unitary};

/// Entrywise Frobenius norm `||a - b||_F`.
pub fn frobenius_distance(a: &Unitary, b: &Unitary) -> Result<f64> {
    check_dims(a, b)?;
    let sum: f64 = a
        .entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    Ok(math::sqrt(sum))
}

/// Operator infidelity `1 - |Tr(a† b)| / N`, insensitive to global phase.
pub fn infidelity(a: &Unitary, b: &Unitary) -> Result<f64> {
    check_dims(a, b)?;
    Ok(infidelity_from_overlap(
        trace_inner(a.entries(), b.entries()).norm(),
        a.dim(),
    ))
}

/// Frobenius distance after the best global phase alignment,
/// `min_phi ||a - e^{i phi} b||_F = sqrt(2N - 2|Tr(a† b)|)`.
pub fn phase_aligned_frobenius(a: &Unitary, b: &Unitary) -> Result<f64> {
    check_dims(a, b)?;
    let n = a.dim() as f64;
    let overlap = trace_inner(a.entries(), b.entries()).norm();
    Ok(math::sqrt((2.0 * n - 2.0 * overlap).max(0.0)))
}

#[inline]
pub(crate) fn infidelity_from_overlap(abs_trace: f64, dim: usize) -> f64 {
    (1.0 - abs_trace / dim as f64).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn frobenius_examples() {
        let i4 = Unitary::identity(4);
        assert_eq!(frobenius_distance(&i4, &i4).unwrap(), 0.0);
        assert!((frobenius_distance(&i4, &Unitary::swap()).unwrap() - 2.0).abs() < 1e-15);
        let phased = i4.scaled(Complex64::from_polar(1.0, core::f64::consts::FRAC_PI_4));
        // sqrt(4 |1 - e^{i pi/4}|^2) = 4 sin(pi/8)
        let expected = 4.0 * (core::f64::consts::PI / 8.0).sin();
        let got = frobenius_distance(&i4, &phased).unwrap();
        assert!((got - expected).abs() < 1e-14);
        assert!((got - 1.5307).abs() < 1e-4);
    }

    #[test]
    fn infidelity_examples() {
        let i4 = Unitary::identity(4);
        assert!((infidelity(&i4, &Unitary::swap()).unwrap() - 0.5).abs() < 1e-15);
        assert!((infidelity(&i4, &Unitary::cnot()).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(infidelity(&i4, &i4).unwrap(), 0.0);
        let phased = i4.scaled(Complex64::from_polar(1.0, 1.234));
        assert!(infidelity(&i4, &phased).unwrap() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = Unitary::identity(2);
        let b = Unitary::identity(4);
        assert!(frobenius_distance(&a, &b).is_err());
        assert!(infidelity(&a, &b).is_err());
    }
}
