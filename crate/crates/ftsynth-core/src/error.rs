use thiserror::Error;

/// Errors from the F2 algebra and circuit layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum F2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown gate kind")]
    UnknownGate,
    #[error("gate {gate} takes {expected} qubits, got {found}")]
    Arity { gate: &'static str, expected: usize, found: usize },
    #[error("qubit {qubit} out of range for n = {n}")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("qubit {qubit} listed twice")]
    DuplicateQubit { qubit: usize },
    #[error("two gates act on qubit {qubit} in the same timestep")]
    OverlappingSupport { qubit: usize },
}

/// Errors from interaction graphs and circuit assignments.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("edge ({0}, {1}) joins two data qubits")]
    DataDataEdge(usize, usize),
    #[error("edge ({0}, {1}) is a self loop or out of range")]
    BadEdge(usize, usize),
    #[error("interaction graph is not connected")]
    Disconnected,
    #[error("assignment has shape {found:?}, expected {expected:?}")]
    Shape { expected: (usize, usize), found: (usize, usize) },
    #[error("gate {0} is not in the gate set")]
    UnknownGate(usize),
    #[error(transparent)]
    F2(#[from] F2Error),
}

/// Errors from constraint construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("stabilizer {0} has no candidate ancillas")]
    EmptyCandidates(usize),
    #[error("effect specification has {found} columns, expected {expected}")]
    SpecDimension { expected: usize, found: usize },
    #[error("fault set of size {size} exceeds v = {v}")]
    TooManyFaults { size: usize, v: usize },
    #[error("timestep {k} out of range 0..={n}")]
    Timestep { k: usize, n: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Errors from code construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("distance must be odd and at least 3, got {0}")]
    BadDistance(usize),
    #[error("codes have different distances {0} and {1}")]
    Mismatch(usize, usize),
    #[error("qubit {0} is an edge qubit, not a face qubit")]
    NotFace(usize),
}
