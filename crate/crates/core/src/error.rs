//! Error type shared by the simulator, observable estimation, networks and
//! training code.

use thiserror::Error;

/// Unified error type for this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Register sizes outside `1..=4` are rejected up front; the dense
    /// density-matrix representation is only meant for a few spins.
    #[error("unsupported qubit count {0}; this simulator handles 1 to 4 qubits")]
    UnsupportedQubits(usize),

    /// A gate or channel addressed a qubit index outside the register.
    #[error("target qubit {target} out of range for a {n_qubits}-qubit register")]
    TargetOutOfRange { target: usize, n_qubits: usize },

    /// A two-qubit gate was given the same qubit twice.
    #[error("gate targets must be distinct qubits")]
    DuplicateTargets,

    /// Gate arity and the number of supplied targets disagree.
    #[error("gate acts on {arity} qubit(s) but {targets} target(s) were given")]
    ArityMismatch { arity: usize, targets: usize },

    /// A user-supplied matrix failed the unitarity check.
    #[error("matrix is not unitary within tolerance {tol}")]
    NotUnitary { tol: f64 },

    /// A vector had the wrong length for the operation.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Sampling was requested with zero shots.
    #[error("shot count must be at least 1")]
    InvalidShots,

    /// A noise parameter left the valid probability range.
    #[error("noise parameter {name} = {value} must lie in [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    /// A correlator vector did not match the layout expected for the
    /// register size.
    #[error("correlator vector has {got} entries, expected {expected}")]
    LayoutMismatch { expected: usize, got: usize },

    /// The local-moment correction is only defined for antiferromagnetic
    /// correlations.
    #[error("spin-spin correlation {0} is not negative; correction undefined")]
    CorrectionUndefined(f64),

    /// A learning step was requested before any transition was stored.
    #[error("replay memory is empty")]
    EmptyMemory,

    /// A gate was requested after the episode reached its gate budget.
    #[error("episode already complete after {0} gate(s)")]
    EpisodeComplete(usize),

    /// Invalid run or training configuration, with a human-readable reason.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A checkpoint file was missing fields or inconsistent with the run.
    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
