//! Dense complex unitaries and the named gate literals.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

/// Maximum entry of `|U†U - I|` tolerated at construction.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// A dense `N x N` unitary matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Unitary {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Unitary {
    /// Builds a unitary from row-major entries, rejecting anything that fails
    /// the unitarity check. Inputs are never renormalized.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        let u = Unitary { dim, entries };
        let deviation = u.unitarity_deviation();
        if !(deviation < UNITARITY_TOLERANCE) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    /// Wraps entries that are unitary by construction (products, adjoints,
    /// phase rescalings of already-checked matrices).
    pub(crate) fn from_entries_unchecked(dim: usize, entries: Vec<Complex64>) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        Unitary { dim, entries }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            entries.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Unitary::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Unitary { dim, entries }
    }

    pub fn swap() -> Self {
        permutation(&[0, 2, 1, 3])
    }

    /// CNOT with the most significant qubit as control.
    pub fn cnot() -> Self {
        permutation(&[0, 1, 3, 2])
    }

    pub fn hadamard() -> Self {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        real2([h, h, h, -h])
    }

    pub fn pauli_x() -> Self {
        real2([0.0, 1.0, 1.0, 0.0])
    }

    pub fn pauli_y() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Unitary {
            dim: 2,
            entries: vec![z, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), z],
        }
    }

    pub fn pauli_z() -> Self {
        real2([1.0, 0.0, 0.0, -1.0])
    }

    /// The pi/8 gate `diag(1, e^{i pi/4})`.
    pub fn t_gate() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Unitary {
            dim: 2,
            entries: vec![
                Complex64::new(1.0, 0.0),
                z,
                z,
                Complex64::from_polar(1.0, core::f64::consts::FRAC_PI_4),
            ],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Unitary) -> Result<Unitary> {
        check_dims(self, rhs)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        matmul_into(self.dim, &self.entries, &rhs.entries, &mut out);
        Ok(Unitary::from_entries_unchecked(self.dim, out))
    }

    pub fn adjoint(&self) -> Unitary {
        let n = self.dim;
        let mut out = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                out.push(self.entries[c * n + r].conj());
            }
        }
        Unitary::from_entries_unchecked(n, out)
    }

    pub fn transpose(&self) -> Unitary {
        let n = self.dim;
        let mut out = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                out.push(self.entries[c * n + r]);
            }
        }
        Unitary::from_entries_unchecked(n, out)
    }

    /// Multiplies every entry by a unit-modulus phase.
    pub fn scale_phase(&self, phase: Complex64) -> Result<Unitary> {
        if !(math::abs(phase.norm() - 1.0) < 1e-12) {
            return Err(Error::invalid("phase", "must have unit modulus"));
        }
        Ok(self.scaled(phase))
    }

    pub(crate) fn scaled(&self, factor: Complex64) -> Unitary {
        Unitary::from_entries_unchecked(self.dim, self.entries.iter().map(|z| z * factor).collect())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    /// `max_ij |(U†U - I)_ij|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.entries[k * n + i].conj() * self.entries[k * n + j];
                }
                if i == j {
                    acc -= 1.0;
                }
                let d = acc.norm();
                if !(d <= worst) {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Determinant by LU factorization with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        determinant(self.dim, &self.entries)
    }

    /// Largest entrywise modulus difference.
    pub fn max_abs_diff(&self, other: &Unitary) -> Result<f64> {
        check_dims(self, other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl fmt::Debug for Unitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Unitary({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self.get(r, c);
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn permutation(image: &[usize]) -> Unitary {
    let n = image.len();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for (col, &row) in image.iter().enumerate() {
        entries[row * n + col] = Complex64::new(1.0, 0.0);
    }
    Unitary { dim: n, entries }
}

fn real2(v: [f64; 4]) -> Unitary {
    Unitary {
        dim: 2,
        entries: v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    }
}

pub(crate) fn check_dims(a: &Unitary, b: &Unitary) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(())
}

/// `out = a * b` for row-major `dim x dim` blocks.
#[inline]
pub(crate) fn matmul_into(dim: usize, a: &[Complex64], b: &[Complex64], out: &mut [Complex64]) {
    for r in 0..dim {
        let arow = &a[r * dim..(r + 1) * dim];
        let orow = &mut out[r * dim..(r + 1) * dim];
        orow.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (k, &aik) in arow.iter().enumerate() {
            let brow = &b[k * dim..(k + 1) * dim];
            for (o, &bkj) in orow.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
}

/// `Tr(a† b) = sum_ij conj(a_ij) b_ij`.
#[inline]
pub(crate) fn trace_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex64::new(re, im)
}

pub(crate) fn determinant(dim: usize, entries: &[Complex64]) -> Complex64 {
    let mut m = entries.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&x, &y| {
                m[x * dim + col]
                    .norm()
                    .partial_cmp(&m[y * dim + col].norm())
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if m[pivot * dim + col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for k in 0..dim {
                m.swap(pivot * dim + k, col * dim + k);
            }
            det = -det;
        }
        let p = m[col * dim + col];
        det *= p;
        for r in col + 1..dim {
            let factor = m[r * dim + col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for k in col..dim {
                let sub = factor * m[col * dim + k];
                m[r * dim + k] -= sub;
            }
        }
    }
    det
}
