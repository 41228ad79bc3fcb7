use thiserror::Error;

/// Errors raised by the moment, geometry, wavefunction and ensemble routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("top moment y_n is zero; use the special-case analysis for order {order}")]
    DegenerateTopMoment { order: usize },

    #[error("order {order} exceeds the supported maximum of {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error("second momentum moment must be positive, got {0}")]
    InvalidSecondMoment(f64),

    #[error("even top moment must be positive, got {0}")]
    InvalidEvenTopMoment(f64),

    #[error("degenerate cubic: all polynomial coefficients vanish")]
    DegenerateCubic,

    #[error("grid too coarse: spectral tail energy fraction {tail:e} exceeds {limit:e}")]
    Resolution { tail: f64, limit: f64 },

    #[error("moment of order {order} not converged on the grid: edge fraction {fraction:e}")]
    Convergence { order: usize, fraction: f64 },

    #[error("wavefunction reached the grid boundary at t = {time}: edge density {density:e}")]
    BoundaryOverflow { time: f64, density: f64 },

    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("singular matching system: {0}")]
    SingularMatching(String),

    #[error("quadrature failed to converge: estimated error {error:e} for value {value:e}")]
    Quadrature { value: f64, error: f64 },

    #[error("ensemble needs at least two particles, got {0}")]
    DegenerateEnsemble(usize),

    #[error("particles must share a common mass")]
    UnequalMasses,

    #[error("unsupported order {0} for this inequality")]
    UnsupportedOrder(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(label: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{label} is not finite ({v})")))
    }
}
