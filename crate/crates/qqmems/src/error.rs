use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected a {expected}x{expected} matrix, got {found}x{found}")]
    Dimension { expected: usize, found: usize },

    #[error("unsupported matrix dimension {0} (must be 1..=6)")]
    UnsupportedDimension(usize),

    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("trace {trace} differs from 1 by more than {tolerance:.1e}")]
    Trace { trace: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid X state: {0}")]
    InvalidXState(String),

    #[error("matrix has nonzero entries outside the X pattern at {0:?}")]
    NotXPattern(Vec<(usize, usize)>),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid sequence choice ({i},{j},{k},{l})")]
    InvalidSequence { i: usize, j: usize, k: usize, l: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("partial transpose of an X state has {0} negative eigenvalues")]
    TooManyNegativePtEigenvalues(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_domain(
    what: &'static str,
    value: f64,
    domain: &'static str,
    ok: bool,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what, value, domain })
    }
}
