//! Error types shared across the kernel and solvers.

use thiserror::Error;

/// Failures raised by geometric constructions and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    /// Inputs too close to a degenerate configuration for the requested
    /// construction (coincident points, zero-area triangle, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Two lines that were required to meet are parallel within tolerance.
    #[error("parallel lines")]
    ParallelLines,

    /// Two circles that were required to meet transversally coincide.
    #[error("coincident circles")]
    CoincidentCircles,

    /// A numeric solver failed to converge.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// A selector matched zero or more than one candidate.
    #[error("ambiguous selection: {0} candidates matched")]
    AmbiguousSelection(usize),

    /// Constraint set admits no valid triangle.
    #[error("infeasible constraint set")]
    Infeasible,

    /// More independent constraints than shape degrees of freedom.
    #[error("over-constrained: {0} constraints for 2 degrees of freedom")]
    OverConstrained(usize),
}
