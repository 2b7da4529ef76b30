use thiserror::Error;

/// Errors produced by swingnet operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    Topology(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("laplacian is not symmetric (max |a_ij - a_ji| = {max_asym:.3e}) and carries no inertia weighting")]
    NotSymmetric { max_asym: f64 },

    #[error("jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    EigenNoConvergence { sweeps: usize, off_norm: f64 },

    #[error("state exceeded 1e12 in magnitude at step {step}; trajectory diverged")]
    NonFinite { step: usize },

    #[error("evaluation point too close to a pole (|det(sI - A)| = {delta_abs:.3e})")]
    PoleProximity { delta_abs: f64 },

    #[error("scenario parse error: {0}")]
    ScenarioParse(String),

    #[error("scenario validation error: {0}")]
    ScenarioInvalid(String),

    #[error("simulation result is in {found} units, expected {expected}")]
    WrongUnits {
        expected: &'static str,
        found: &'static str,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
