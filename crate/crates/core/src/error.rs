use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },

    #[error("integral did not converge: value {value:e}, error estimate {error:e} after {subdivisions} subdivisions")]
    NotConverged { value: f64, error: f64, subdivisions: usize },

    #[error("density matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e}); reduce eps0")]
    NotPositive { min_eigenvalue: f64 },

    #[error("amplitude set violates {which} beyond the error budget ({excess:e} > {budget:e})")]
    Inconsistent { which: &'static str, excess: f64, budget: f64 },

    #[error("{what} = {value:e} is outside the perturbative regime (< {limit}); reduce eps0")]
    NonPerturbative { what: String, value: f64, limit: f64 },

    #[error("filter annihilates the state (success probability {0:e})")]
    FilterAnnihilates(f64),

    #[error("mode lattice not converged: {quantity} changes by {change:e} between refinements (tolerance {tol:e})")]
    LatticeUnconverged { quantity: &'static str, change: f64, tol: f64 },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short kebab-case name, used as the failure tag of result rows.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::NonFinite { .. } => "non-finite",
            Error::NotConverged { .. } => "not-converged",
            Error::NotPositive { .. } => "not-positive",
            Error::Inconsistent { .. } => "inconsistent",
            Error::NonPerturbative { .. } => "non-perturbative",
            Error::FilterAnnihilates(_) => "filter-annihilates",
            Error::LatticeUnconverged { .. } => "lattice-unconverged",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
