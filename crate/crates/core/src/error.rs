use thiserror::Error;

/// Errors raised by the walk, spectrum and bound computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QwalkError {
    /// The polygon order must be odd and at least 3.
    #[error("invalid polygon order n = {0}: must be odd and >= 3")]
    InvalidOrder(usize),

    #[error("group elements belong to different groups (n = {left} vs n = {right})")]
    MismatchedOrder { left: usize, right: usize },

    #[error("{name} = {value} out of range [0, {bound})")]
    IndexOutOfRange {
        name: &'static str,
        value: usize,
        bound: usize,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("size cap exceeded: n = {n} > {cap}")]
    CapExceeded { n: usize, cap: usize },

    /// A cross-branch eigenvalue gap fell inside the floating-point guard band,
    /// so equality of the two eigenvalues cannot be decided reliably.
    #[error(
        "eigenvalue gap {gap:e} between indices {j} and {k} lies inside the guard band (n = {n})"
    )]
    AmbiguousGap {
        n: usize,
        j: usize,
        k: usize,
        gap: f64,
    },

    #[error(
        "conjecture term b = {b} has a non-positive denominator ({which} = {value:e}) for n = {n}"
    )]
    DegenerateConjectureTerm {
        n: usize,
        b: usize,
        which: &'static str,
        value: f64,
    },

    #[error("search did not converge before cap {cap}")]
    NoConvergence { cap: f64 },
}

pub type Result<T> = std::result::Result<T, QwalkError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> QwalkError {
    QwalkError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Rejects even orders and orders below 3.
pub fn check_order(n: usize) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        Err(QwalkError::InvalidOrder(n))
    } else {
        Ok(())
    }
}
