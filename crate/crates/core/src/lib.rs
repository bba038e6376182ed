//! Gate-word compilation of two-qubit unitaries by meet-in-the-middle search.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod compile;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod haar;
pub mod index;
pub mod metrics;
pub mod phase;
pub mod qec;
pub mod unitary;
pub mod variants;
pub mod word;

mod math;
mod par;

pub use compile::{compile_brute, compile_mitm, CompilationResult, CompileOptions, MitmCompiler};
pub use error::{Error, Result};
pub use haar::{haar_random, haar_random_with, seeded_rng, ExperimentRng};
pub use index::{IndexMode, IndexParams, IndexedPoint, Neighbor, NnIndex};
pub use metrics::{frobenius_distance, infidelity, phase_aligned_frobenius};
pub use unitary::Unitary;
pub use variants::{make_variants, GateSet, VariantMode};
pub use word::{GateWord, ProductTable};
