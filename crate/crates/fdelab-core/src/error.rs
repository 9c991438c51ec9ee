//! Crate-wide error type.
//!
//! Errors split into two broad families: *validation* errors (bad inputs,
//! detectable before any numerics run) and *numerical* errors (a solver or
//! quadrature that did not reach its target). Callers that map failures to
//! process exit codes can use [`Error::is_validation`] to distinguish them.

use thiserror::Error;

/// Why a damped Newton iteration gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NewtonFailureKind {
    /// Residual target not met within the iteration budget.
    MaxIterations,
    /// Backtracking line search hit the minimum step without reducing the
    /// residual.
    LineSearchExhausted,
    /// The tridiagonal Jacobian solve broke down (zero pivot).
    SingularJacobian,
}

impl std::fmt::Display for NewtonFailureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NewtonFailureKind::MaxIterations => write!(f, "maximum iterations reached"),
            NewtonFailureKind::LineSearchExhausted => write!(f, "backtracking line search exhausted"),
            NewtonFailureKind::SingularJacobian => write!(f, "singular Jacobian"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a precondition. `field` is a dotted path naming the
    /// offending quantity.
    #[error("{field}: {message}")]
    InvalidInput { field: String, message: String },

    /// Adaptive quadrature ran out of panels before meeting the tolerance.
    #[error(
        "quadrature did not converge: requested relative tolerance {requested:.3e}, \
         achieved {achieved:.3e} after {panels} panels"
    )]
    QuadratureNoConvergence {
        requested: f64,
        achieved: f64,
        panels: usize,
    },

    /// A damped Newton solve failed. `history` holds the scaled residual
    /// norms seen so far, `step` the time-step index for parabolic solves
    /// (0 for stationary problems).
    #[error("Newton failed at step {step}: {kind}; residual history {history:?}")]
    NewtonFailure {
        step: usize,
        kind: NewtonFailureKind,
        history: Vec<f64>,
    },

    /// The degenerate mobility |u|^(m-1) was evaluated at or across zero.
    #[error(
        "state reached {value:.3e} at step {step} with mobility_floor = 0; \
         rerun with mobility_floor > 0 (the regularized mobility) for states \
         that touch or cross zero"
    )]
    MobilityFloorRequired { step: usize, value: f64 },

    /// A scheme-level ordering that must hold (comparison principle, ladder
    /// monotonicity, solution bounds) was violated beyond slack. This is a
    /// solver bug, not a data error.
    #[error("{context}: violation {violation:.3e} at node {node}")]
    MonotonicityViolation {
        context: String,
        violation: f64,
        node: usize,
    },

    /// Two fields/trajectories that must share a mesh do not.
    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    /// A non-finite value surfaced where a finite one is required.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// A file did not match the expected format.
    #[error("parse: {0}")]
    Parse(String),
}

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors that indicate bad inputs rather than numerical
    /// breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput { .. } | Error::MeshMismatch(_) | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
