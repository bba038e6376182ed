use alloc::string::String;

/// Errors raised by the compilation and simulation routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("letter {letter} out of range for a gate set of size {set_size}")]
    LetterOutOfRange { letter: usize, set_size: usize },
    #[error("memory budget exceeded: need {required} bytes, budget is {budget} bytes")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("index is empty")]
    EmptyIndex,
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {0} used as both target and control")]
    OverlappingQubits(usize),
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
