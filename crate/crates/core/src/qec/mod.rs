//! Measurement-free error correction under coherent gate errors, simulated
//! with full state vectors.

pub mod circuit;
pub mod codes;
pub mod noise;
pub mod protocol;
pub mod state;

pub use circuit::{Circuit, CircuitOp, Control, Gate};
pub use codes::{build_repetition_mfqec, build_shor_mfqec, encode_shor, encode_shor_state, Logical};
pub use noise::{coherent_error, NoiseSites, NoiseSpec};
pub use protocol::{
    envelope_slope, log_grid, run_sample, sweep, upper_envelope, verification_suite, Check, EpsilonSampling, Protocol,
    QecReport, SweepConfig,
};
pub use state::{Pauli, StateVector};
