//! Controlled one- and two-qubit gates and their circuits.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::unitary::Unitary;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    /// Row-major `[m00, m01, m10, m11]`.
    Matrix([Complex64; 4]),
    /// Targets `[control, target]`.
    Cnot,
    Swap,
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot | Gate::Swap => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::Matrix(_) => "U",
            Gate::Cnot => "CNOT",
            Gate::Swap => "SWAP",
        }
    }

    /// The `2x2` matrix of a single-qubit gate.
    ///
    /// # Panics
    /// For two-qubit gates.
    pub fn matrix(&self) -> [Complex64; 4] {
        let c = |re| Complex64::new(re, 0.0);
        let h = core::f64::consts::FRAC_1_SQRT_2;
        match self {
            Gate::H => [c(h), c(h), c(h), c(-h)],
            Gate::X => [c(0.0), c(1.0), c(1.0), c(0.0)],
            Gate::Y => [c(0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), c(0.0)],
            Gate::Z => [c(1.0), c(0.0), c(0.0), c(-1.0)],
            Gate::Matrix(m) => *m,
            Gate::Cnot | Gate::Swap => panic!("{} is not a single-qubit gate", self.name()),
        }
    }

    pub fn from_unitary(u: &Unitary) -> Result<Self> {
        if u.dim() != 2 {
            return Err(Error::InvalidDimension(u.dim()));
        }
        let e = u.entries();
        Ok(Gate::Matrix([e[0], e[1], e[2], e[3]]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    /// `true` fires on `|1>`, `false` on `|0>`.
    pub on_one: bool,
}

impl Control {
    pub fn on_one(qubit: usize) -> Self {
        Control { qubit, on_one: true }
    }

    pub fn on_zero(qubit: usize) -> Self {
        Control { qubit, on_one: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitOp {
    pub gate: Gate,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
}

impl CircuitOp {
    pub fn new(gate: Gate, targets: Vec<usize>, controls: Vec<Control>) -> Self {
        CircuitOp {
            gate,
            targets,
            controls,
        }
    }

    pub fn single(gate: Gate, target: usize) -> Self {
        Self::new(gate, alloc::vec![target], Vec::new())
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(Gate::Cnot, alloc::vec![control, target], Vec::new())
    }

    pub fn controlled(gate: Gate, target: usize, controls: &[Control]) -> Self {
        Self::new(gate, alloc::vec![target], controls.to_vec())
    }

    /// `X` on `target` when both controls are `|1>`.
    pub fn toffoli(c0: usize, c1: usize, target: usize) -> Self {
        Self::controlled(Gate::X, target, &[Control::on_one(c0), Control::on_one(c1)])
    }

    /// Every qubit the op touches, targets first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets
            .iter()
            .copied()
            .chain(self.controls.iter().map(|c| c.qubit))
    }

    /// Control qubits including the built-in control of `CNOT`.
    pub fn control_count(&self) -> usize {
        self.controls.len() + usize::from(self.gate == Gate::Cnot)
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.targets.len() != self.gate.arity() {
            return Err(Error::invalid(
                "targets",
                alloc::format!("{} takes {} target(s)", self.gate.name(), self.gate.arity()),
            ));
        }
        let mut seen = 0u64;
        for q in self.qubits() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
            }
            if seen & (1 << q) != 0 {
                return Err(Error::OverlappingQubits(q));
            }
            seen |= 1 << q;
        }
        Ok(())
    }

    /// `(mask, value)` such that the op fires iff `index & mask == value`.
    pub(crate) fn control_masks(&self) -> (usize, usize) {
        self.controls.iter().fold((0, 0), |(m, v), c| {
            (m | 1 << c.qubit, if c.on_one { v | 1 << c.qubit } else { v })
        })
    }
}

impl fmt::Display for CircuitOp {
    /// `GATE targets [controls]`, each control suffixed `+` (on one) or `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.gate.name())?;
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        f.write_str(" [")?;
        for (i, c) in self.controls.iter().enumerate() {
            if i > 0 {
                f.write_char(' ')?;
            }
            write!(f, "{}{}", c.qubit, if c.on_one { '+' } else { '-' })?;
        }
        f.write_char(']')
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn push(&mut self, op: CircuitOp) -> Result<&mut Self> {
        op.validate(self.n_qubits)?;
        self.ops.push(op);
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Ops with two or more control qubits.
    pub fn multi_control_count(&self) -> usize {
        self.ops.iter().filter(|op| op.control_count() >= 2).count()
    }

    /// One op per line in the [`CircuitOp`] display form.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for op in &self.ops {
            let _ = writeln!(out, "{op}");
        }
        out
    }
}
