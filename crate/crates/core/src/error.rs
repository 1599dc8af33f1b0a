use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Argument outside the documented accuracy window of a special function.
    #[error("argument {0} outside the accuracy window (|z| <= {1})")]
    OutsideAccuracyWindow(String, f64),

    /// Result overflowed the double-precision range.
    #[error("overflow evaluating {0}")]
    Overflow(String),

    /// The imaginary parts of the velocity formula failed to cancel.
    #[error("imaginary residue {residue:e} at (x, k) = ({x}, {k}) exceeds tolerance")]
    ImaginaryResidue { x: f64, k: f64, residue: f64 },

    /// A truncated series did not reach its stopping tolerance before the cap.
    #[error("series did not converge within eta_max = {0}")]
    Truncation(usize),

    /// Finite-difference trace and analytic divergence disagree.
    #[error("jacobian trace {trace} inconsistent with divergence {divergence}")]
    InconsistentTrace { trace: f64, divergence: f64 },

    #[error("field vanishes on the winding loop")]
    IllPosedWinding,

    #[error("no sign change found in [{0}, {1}]")]
    NotFound(f64, f64),

    #[error("trajectory diverged at step {0}")]
    Diverged(usize),

    /// An orbit did not close within the allotted time.
    #[error("no return to the starting section within time {0}")]
    NoReturn(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
