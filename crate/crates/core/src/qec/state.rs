//! Full-amplitude state vectors; qubit 0 is the least significant bit.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::circuit::{Circuit, CircuitOp, Gate};
use crate::error::{Error, Result};
use crate::math;

pub const MAX_QUBITS: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_size(n_qubits)?;
        if index >> n_qubits != 0 {
            return Err(Error::invalid("index", "basis index has bits above n_qubits"));
        }
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[index] = ONE;
        Ok(StateVector { n_qubits, amplitudes })
    }

    /// Takes amplitudes as given; they must be normalized within 1e-10.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = amplitudes.len().trailing_zeros() as usize;
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::invalid("amplitudes", "length is not a power of two"));
        }
        check_size(n_qubits)?;
        let s = StateVector { n_qubits, amplitudes };
        if math::abs(s.norm_sqr() - 1.0) > 1e-10 {
            return Err(Error::invalid("amplitudes", "state is not normalized"));
        }
        Ok(s)
    }

    /// `|0...0> (x) low` with `low` on the least significant qubits.
    pub fn embed(low: &StateVector, n_qubits: usize) -> Result<Self> {
        check_size(n_qubits)?;
        if low.n_qubits > n_qubits {
            return Err(Error::invalid("n_qubits", "smaller than the embedded register"));
        }
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[..low.amplitudes.len()].copy_from_slice(&low.amplitudes);
        Ok(StateVector { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn apply(&mut self, op: &CircuitOp) -> Result<()> {
        op.validate(self.n_qubits)?;
        let (cmask, cval) = op.control_masks();
        match &op.gate {
            Gate::Cnot => {
                let c = 1usize << op.targets[0];
                self.apply_single(op.targets[1], &Gate::X.matrix(), cmask | c, cval | c);
            }
            Gate::Swap => self.apply_swap(op.targets[0], op.targets[1], cmask, cval),
            g => self.apply_single(op.targets[0], &g.matrix(), cmask, cval),
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() > self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: circuit.n_qubits() - 1,
                n_qubits: self.n_qubits,
            });
        }
        circuit.ops().iter().try_for_each(|op| self.apply(op))
    }

    fn apply_single(&mut self, target: usize, m: &[Complex64; 4], cmask: usize, cval: usize) {
        let bit = 1usize << target;
        let low = bit - 1;
        let diagonal = m[1] == ZERO && m[2] == ZERO;
        for k in 0..self.amplitudes.len() / 2 {
            let i = ((k & !low) << 1) | (k & low);
            if i & cmask != cval {
                continue;
            }
            let j = i | bit;
            let (a, b) = (self.amplitudes[i], self.amplitudes[j]);
            if diagonal {
                self.amplitudes[i] = m[0] * a;
                self.amplitudes[j] = m[3] * b;
            } else {
                self.amplitudes[i] = m[0] * a + m[1] * b;
                self.amplitudes[j] = m[2] * a + m[3] * b;
            }
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize, cmask: usize, cval: usize) {
        let (ba, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amplitudes.len() {
            if i & ba == 0 && i & bb != 0 && i & cmask == cval {
                self.amplitudes.swap(i, i ^ ba ^ bb);
            }
        }
    }

    /// Applies a single-qubit `2x2` matrix without validation of unitarity.
    pub fn apply_matrix(&mut self, qubit: usize, m: &[Complex64; 4]) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        self.apply_single(qubit, m, 0, 0);
        Ok(())
    }

    /// `<psi| P |psi>` for a Pauli string given as `(qubit, pauli)` factors.
    pub fn pauli_expectation(&self, factors: &[(usize, Pauli)]) -> Result<f64> {
        let mut image = self.clone();
        for &(q, p) in factors {
            let gate = match p {
                Pauli::X => Gate::X,
                Pauli::Y => Gate::Y,
                Pauli::Z => Gate::Z,
            };
            image.apply(&CircuitOp::single(gate, q))?;
        }
        Ok(self.inner(&image)?.re)
    }

    /// Overlap of the low `ideal.n_qubits()` qubits with `ideal`, the
    /// remaining qubits traced out: `sum_r |<ideal, r|psi>|^2`.
    pub fn register_fidelity(&self, ideal: &StateVector) -> Result<f64> {
        if ideal.n_qubits > self.n_qubits {
            return Err(Error::invalid("ideal", "register larger than the state"));
        }
        let width = ideal.amplitudes.len();
        let total: f64 = self
            .amplitudes
            .chunks_exact(width)
            .map(|rest| {
                rest.iter()
                    .zip(&ideal.amplitudes)
                    .map(|(psi, phi)| phi.conj() * psi)
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum();
        Ok(total.clamp(0.0, 1.0))
    }
}

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::invalid(
            "n_qubits",
            alloc::format!("{n_qubits} is outside 1..={MAX_QUBITS}"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qec::circuit::Control;
    use rand::Rng;

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = crate::haar::seeded_rng(seed);
        let mut amps: Vec<Complex64> = (0..1 << n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn x_flips_zero() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply(&CircuitOp::single(Gate::X, 0)).unwrap();
        assert_eq!(s.amplitudes()[1], ONE);
    }

    #[test]
    fn cnot_on_basis() {
        // |10>: qubit 1 set, qubit 0 clear.
        let mut s = StateVector::basis(2, 0b10).unwrap();
        s.apply(&CircuitOp::cnot(1, 0)).unwrap();
        assert_eq!(s.amplitudes()[0b11], ONE);
        let mut s = StateVector::basis(2, 0b01).unwrap();
        s.apply(&CircuitOp::cnot(1, 0)).unwrap();
        assert_eq!(s.amplitudes()[0b01], ONE);
    }

    #[test]
    fn negative_control() {
        let op = CircuitOp::controlled(Gate::X, 0, &[Control::on_zero(1)]);
        let mut s = StateVector::basis(2, 0b00).unwrap();
        s.apply(&op).unwrap();
        assert_eq!(s.amplitudes()[0b01], ONE);
        let mut s = StateVector::basis(2, 0b10).unwrap();
        s.apply(&op).unwrap();
        assert_eq!(s.amplitudes()[0b10], ONE);
    }

    #[test]
    fn hadamard_is_an_involution() {
        let s0 = random_state(5, 3);
        let mut s = s0.clone();
        for q in 0..5 {
            s.apply(&CircuitOp::single(Gate::H, q)).unwrap();
            s.apply(&CircuitOp::single(Gate::H, q)).unwrap();
        }
        for (a, b) in s.amplitudes().iter().zip(s0.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn swap_exchanges_qubits() {
        let mut s = StateVector::basis(3, 0b001).unwrap();
        s.apply(&CircuitOp::new(Gate::Swap, alloc::vec![0, 2], alloc::vec![]))
            .unwrap();
        assert_eq!(s.amplitudes()[0b100], ONE);
    }

    #[test]
    fn register_fidelity_of_product_state() {
        let low = random_state(3, 5);
        let full = StateVector::embed(&low, 6).unwrap();
        assert!((full.register_fidelity(&low).unwrap() - 1.0).abs() < 1e-12);
        let other = random_state(3, 6);
        let expected = low.inner(&other).unwrap().norm_sqr();
        assert!((full.register_fidelity(&other).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn pauli_expectations() {
        let s = StateVector::zero(2).unwrap();
        assert_eq!(s.pauli_expectation(&[(0, Pauli::Z), (1, Pauli::Z)]).unwrap(), 1.0);
        assert_eq!(s.pauli_expectation(&[(0, Pauli::X)]).unwrap(), 0.0);
    }

    #[test]
    fn rejects_invalid() {
        let mut s = StateVector::zero(2).unwrap();
        assert!(s.apply(&CircuitOp::single(Gate::X, 2)).is_err());
        assert!(s.apply(&CircuitOp::cnot(1, 1)).is_err());
        assert!(StateVector::zero(25).is_err());
        assert!(StateVector::from_amplitudes(alloc::vec![ONE; 3]).is_err());
        assert!(StateVector::from_amplitudes(alloc::vec![ONE; 4]).is_err());
    }
}
