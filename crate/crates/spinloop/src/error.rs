use thiserror::Error;

/// Errors raised across the pipeline.
///
/// The CLI maps [`Error::is_validation`] to exit status 2 and everything
/// else to 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("ground state is not degenerate (gap {gap:.3e} meV, tolerance {tolerance:.3e} meV)")]
    SymmetryBreaking { gap: f64, tolerance: f64 },
    #[error("grid too coarse: spacing {de} meV exceeds sigma/2 = {half_sigma} meV")]
    Resolution { de: f64, half_sigma: f64 },
    #[error("fit failed: {0}")]
    FitFailure(String),
    #[error("degenerate rate model: stationary space has dimension {0}")]
    DegenerateModel(usize),
    #[error("step size fell below {floor:.3e} ns at t = {t:.3e} ns; try a shorter time span")]
    Stiffness { t: f64, floor: f64 },
    #[error("eigen residual {residual:.3e} exceeds {bound:.3e}")]
    Eigen { residual: f64, bound: f64 },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::Validation(_) | Error::Parse { .. } | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
