//! Repetition and Shor codes with measurement-free correction circuits.
//!
//! Syndromes are computed coherently into ancilla qubits and corrections are
//! applied by multi-controlled gates; nothing is measured or reset.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::circuit::{Circuit, CircuitOp, Control, Gate};
use super::state::{Pauli, StateVector};
use crate::error::Result;

/// Qubits of the repetition-code circuit: data, copy ancillas, syndromes.
pub const REPETITION_QUBITS: usize = 9;
/// Qubits of the Shor-code circuit: 9 data, 9 copy ancillas, 3 syndromes.
pub const SHOR_QUBITS: usize = 21;
pub const SHOR_DATA: usize = 9;
const SHOR_ANCILLA: usize = 9;
const SHOR_SYNDROME: usize = 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Logical {
    Zero,
    One,
    Plus,
    Minus,
}

impl Logical {
    fn amplitudes(self) -> (Complex64, Complex64) {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        match self {
            Logical::Zero => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            Logical::One => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
            Logical::Plus => (Complex64::new(h, 0.0), Complex64::new(h, 0.0)),
            Logical::Minus => (Complex64::new(h, 0.0), Complex64::new(-h, 0.0)),
        }
    }
}

/// `alpha |000> + beta |111>`.
pub fn encode_repetition(alpha: Complex64, beta: Complex64) -> Result<StateVector> {
    let mut amps = alloc::vec![Complex64::new(0.0, 0.0); 8];
    amps[0] = alpha;
    amps[7] = beta;
    StateVector::from_amplitudes(amps)
}

/// `alpha |0_L> + beta |1_L>` with
/// `|0_L>, |1_L> = (|000> +- |111>)^{(x)3} / (2 sqrt 2)`.
pub fn encode_shor_state(alpha: Complex64, beta: Complex64) -> Result<StateVector> {
    let mut amps = alloc::vec![Complex64::new(0.0, 0.0); 1 << SHOR_DATA];
    let norm = 1.0 / (2.0 * core::f64::consts::SQRT_2);
    for pattern in 0..8usize {
        // Bit b of `pattern` selects |111> in block b.
        let index = (0..3).fold(0, |acc, b| {
            if pattern >> b & 1 == 1 {
                acc | 0b111 << (3 * b)
            } else {
                acc
            }
        });
        let odd = pattern.count_ones() % 2 == 1;
        amps[index] = (alpha + if odd { -beta } else { beta }) * norm;
    }
    StateVector::from_amplitudes(amps)
}

pub fn encode_shor(logical: Logical) -> StateVector {
    let (a, b) = logical.amplitudes();
    encode_shor_state(a, b).expect("normalized logical state")
}

/// Physical gates of the logical bit flip: `Z` on the first qubit of each block.
pub fn shor_logical_x() -> [CircuitOp; 3] {
    [0, 3, 6].map(|q| CircuitOp::single(Gate::Z, q))
}

/// The six `ZZ` bit-flip stabilizers on neighbouring qubits of each block.
pub fn shor_z_stabilizers() -> Vec<[(usize, Pauli); 2]> {
    (0..3)
        .flat_map(|b| {
            [
                [(3 * b, Pauli::Z), (3 * b + 1, Pauli::Z)],
                [(3 * b + 1, Pauli::Z), (3 * b + 2, Pauli::Z)],
            ]
        })
        .collect()
}

/// The two independent phase-flip stabilizers `X^6` on blocks (0,1) and (1,2).
pub fn shor_x_stabilizers() -> [Vec<(usize, Pauli)>; 2] {
    [0, 3].map(|start| (start..start + 6).map(|q| (q, Pauli::X)).collect())
}

/// Bit-flip round for one three-qubit block.
///
/// The ancilla triple is prepared in `(|000> + |111>)/sqrt 2` so that the
/// transversal copy carries error parities but no phase information. Parities
/// `a0^a1`, `a1^a2`, `a0^a2` go to the syndrome qubits and each data qubit is
/// flipped by the Toffoli on the two parities that contain it.
fn bit_flip_round(c: &mut Circuit, data: [usize; 3], anc: [usize; 3], syn: [usize; 3], uncompute: bool) -> Result<()> {
    c.push(CircuitOp::single(Gate::H, anc[0]))?;
    c.push(CircuitOp::cnot(anc[0], anc[1]))?;
    c.push(CircuitOp::cnot(anc[0], anc[2]))?;
    for i in 0..3 {
        c.push(CircuitOp::cnot(data[i], anc[i]))?;
    }
    let parities = [(0, 1), (1, 2), (0, 2)];
    let extract = |c: &mut Circuit| -> Result<()> {
        for (s, (i, j)) in parities.iter().enumerate() {
            c.push(CircuitOp::cnot(anc[*i], syn[s]))?;
            c.push(CircuitOp::cnot(anc[*j], syn[s]))?;
        }
        Ok(())
    };
    extract(c)?;
    c.push(CircuitOp::toffoli(syn[0], syn[2], data[0]))?;
    c.push(CircuitOp::toffoli(syn[0], syn[1], data[1]))?;
    c.push(CircuitOp::toffoli(syn[1], syn[2], data[2]))?;
    if uncompute {
        extract(c)?;
    }
    Ok(())
}

/// Nine qubits: data 0..3, ancillas 3..6, syndromes 6..9. Three Toffolis.
pub fn build_repetition_mfqec() -> Circuit {
    let mut c = Circuit::new(REPETITION_QUBITS);
    bit_flip_round(&mut c, [0, 1, 2], [3, 4, 5], [6, 7, 8], false).expect("static layout");
    c
}

/// Twenty-one qubits: data 0..9, ancillas 9..18, syndromes 18..21.
///
/// A bit-flip round per block reuses the three syndrome qubits by
/// uncomputing them. The phase-flip round then kicks the `X^6` parities of
/// block pairs (0,1), (1,2), (0,2) back onto the syndrome qubits prepared in
/// `|+>` and applies `Z` to the first qubit of the block shared by two
/// flagged pairs. Twelve multi-controlled gates in total.
pub fn build_shor_mfqec() -> Circuit {
    let mut c = Circuit::new(SHOR_QUBITS);
    let syn = [SHOR_SYNDROME, SHOR_SYNDROME + 1, SHOR_SYNDROME + 2];
    for b in 0..3 {
        let data = [3 * b, 3 * b + 1, 3 * b + 2];
        let anc = data.map(|q| SHOR_ANCILLA + q);
        bit_flip_round(&mut c, data, anc, syn, true).expect("static layout");
    }
    let pairs = [(0, 1), (1, 2), (0, 2)];
    for s in syn {
        c.push(CircuitOp::single(Gate::H, s)).expect("static layout");
    }
    for (s, (b0, b1)) in syn.iter().zip(pairs) {
        for q in (3 * b0..3 * b0 + 3).chain(3 * b1..3 * b1 + 3) {
            c.push(CircuitOp::cnot(*s, q)).expect("static layout");
        }
    }
    for s in syn {
        c.push(CircuitOp::single(Gate::H, s)).expect("static layout");
    }
    for (block, (s0, s1)) in [(0, (0, 2)), (1, (0, 1)), (2, (1, 2))] {
        let controls = [Control::on_one(syn[s0]), Control::on_one(syn[s1])];
        c.push(CircuitOp::controlled(Gate::Z, 3 * block, &controls))
            .expect("static layout");
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shor_zero_amplitudes() {
        let z = encode_shor(Logical::Zero);
        let expected = 1.0 / (2.0 * core::f64::consts::SQRT_2);
        assert!((z.amplitudes()[0].re - expected).abs() < 1e-15);
        assert!(z.inner(&encode_shor(Logical::One)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn shor_stabilizers_hold_on_codewords() {
        for l in [Logical::Zero, Logical::One, Logical::Plus, Logical::Minus] {
            let s = encode_shor(l);
            for stab in shor_z_stabilizers() {
                assert!((s.pauli_expectation(&stab).unwrap() - 1.0).abs() < 1e-12);
            }
            for stab in shor_x_stabilizers() {
                assert!((s.pauli_expectation(&stab).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn logical_x_swaps_codewords() {
        let mut s = encode_shor(Logical::Zero);
        for op in shor_logical_x() {
            s.apply(&op).unwrap();
        }
        assert!((s.inner(&encode_shor(Logical::One)).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circuit_counts() {
        let shor = build_shor_mfqec();
        assert_eq!(shor.n_qubits(), 21);
        assert_eq!(shor.multi_control_count(), 12);
        assert_eq!(build_repetition_mfqec().multi_control_count(), 3);
    }
}
