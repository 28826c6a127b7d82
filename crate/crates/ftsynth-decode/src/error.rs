use thiserror::Error;

/// Errors from the matching layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchingError {
    #[error("edge ({0}, {1}) is a self loop or out of range")]
    BadEdge(usize, usize),
    #[error("edge weight {0} is negative or not finite")]
    BadWeight(f64),
    #[error("perfect matching needs an even vertex count, got {0}")]
    OddVertexCount(usize),
    #[error("graph has no perfect matching")]
    NoPerfectMatching,
    #[error("no A-perfect matching exists (vertex {0} cannot be matched)")]
    Infeasible(usize),
}

/// Errors from the merged code decoder.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("syndrome has length {found}, expected {expected}")]
    SyndromeLength { expected: usize, found: usize },
    #[error("no face-qubit lift at vertex {0}")]
    NoLift(usize),
    #[error("odd number of crossing edges ({0}) in a red component")]
    OddCrossings(usize),
    #[error("marked stabilizers remain after decoding: {0:?}")]
    NotClosed(Vec<usize>),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}
