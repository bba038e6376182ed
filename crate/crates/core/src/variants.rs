//! The reflected-variant gate sets generated by a single two-qubit gate.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::unitary::Unitary;

/// Which reflections of the source gate are available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariantMode {
    /// `[U, U^S, U^T, U^ST]`
    Four,
    /// `[U, U^S]`, no transpose available.
    Two,
}

impl VariantMode {
    pub fn set_size(self) -> usize {
        match self {
            VariantMode::Four => 4,
            VariantMode::Two => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VariantMode::Four => "four",
            VariantMode::Two => "two",
        }
    }
}

impl fmt::Display for VariantMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VariantMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "four" => Ok(VariantMode::Four),
            "two" => Ok(VariantMode::Two),
            other => Err(Error::invalid(
                "mode",
                alloc::format!("expected `four` or `two`, got `{other}`"),
            )),
        }
    }
}

/// An ordered gate set; letters of a gate word index into `variants`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSet {
    variants: Vec<Unitary>,
    labels: Vec<&'static str>,
    source: Unitary,
}

impl GateSet {
    pub fn variants(&self) -> &[Unitary] {
        &self.variants
    }

    pub fn labels(&self) -> &[&'static str] {
        &self.labels
    }

    pub fn source(&self) -> &Unitary {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.variants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variants.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn mode(&self) -> VariantMode {
        if self.variants.len() == 4 {
            VariantMode::Four
        } else {
            VariantMode::Two
        }
    }
}

/// `SWAP * u * SWAP`, the gate with its two qubits exchanged.
pub fn swap_conjugate(u: &Unitary) -> Result<Unitary> {
    let s = Unitary::swap();
    s.mul(u)?.mul(&s)
}

pub fn make_variants(u: &Unitary, mode: VariantMode) -> Result<GateSet> {
    if u.dim() != 4 {
        return Err(Error::InvalidDimension(u.dim()));
    }
    let us = swap_conjugate(u)?;
    let (variants, labels) = match mode {
        VariantMode::Four => {
            let ut = u.transpose();
            let ust = swap_conjugate(&ut)?;
            (vec![u.clone(), us, ut, ust], vec!["U", "U^S", "U^T", "U^ST"])
        }
        VariantMode::Two => (vec![u.clone(), us], vec!["U", "U^S"]),
    };
    Ok(GateSet {
        variants,
        labels,
        source: u.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::haar_random;

    #[test]
    fn swap_and_identity_are_fixed_points() {
        for u in [Unitary::swap(), Unitary::identity(4)] {
            let gs = make_variants(&u, VariantMode::Four).unwrap();
            assert_eq!(gs.len(), 4);
            for v in gs.variants() {
                assert!(v.max_abs_diff(&u).unwrap() < 1e-15);
            }
        }
    }

    #[test]
    fn reflections_are_involutions() {
        let u = haar_random(4, 5).unwrap();
        assert!(u.transpose().transpose().max_abs_diff(&u).unwrap() < 1e-15);
        let back = swap_conjugate(&swap_conjugate(&u).unwrap()).unwrap();
        assert!(back.max_abs_diff(&u).unwrap() < 1e-15);
    }

    #[test]
    fn variant_order_and_unitarity() {
        let u = haar_random(4, 9).unwrap();
        let gs = make_variants(&u, VariantMode::Four).unwrap();
        assert_eq!(gs.labels(), &["U", "U^S", "U^T", "U^ST"]);
        assert_eq!(&gs.variants()[0], &u);
        assert!(gs.variants()[2].max_abs_diff(&u.transpose()).unwrap() < 1e-15);
        let ust = swap_conjugate(&u).unwrap().transpose();
        assert!(gs.variants()[3].max_abs_diff(&ust).unwrap() < 1e-14);
        for v in gs.variants() {
            assert!(v.unitarity_deviation() < 1e-10);
        }
        let two = make_variants(&u, VariantMode::Two).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two.mode(), VariantMode::Two);
    }

    #[test]
    fn rejects_non_two_qubit() {
        assert!(make_variants(&Unitary::identity(2), VariantMode::Four).is_err());
        assert!("three".parse::<VariantMode>().is_err());
        assert_eq!("two".parse::<VariantMode>().unwrap(), VariantMode::Two);
    }
}
