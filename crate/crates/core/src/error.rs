use thiserror::Error;

/// Errors raised by state construction, filters and witness evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("truncation error: tail mass {tail_mass:.3e} exceeds tolerance {tolerance:.3e} at dim {dim}")]
    Truncation {
        tail_mass: f64,
        tolerance: f64,
        dim: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical negativity: diagonal element {index} is {value:.3e}")]
    NumericalNegativity { index: usize, value: f64 },

    #[error("range error: |beta| = {beta:.4} exceeds the largest usable modulus {max_beta:.4}")]
    Range { beta: f64, max_beta: f64 },

    #[error("accuracy error: quadrature did not converge (achieved estimate {estimate:.3e}, tolerance {tolerance:.1e})")]
    Accuracy { estimate: f64, tolerance: f64 },

    #[error("symmetry violation: imaginary residue {residue:.3e} exceeds {bound:.1e}")]
    SymmetryViolation { residue: f64, bound: f64 },

    #[error("undefined: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
