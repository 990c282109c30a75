//! Crate-wide error type and result alias.

use thiserror::Error;

/// Errors produced by the physics kernels, the I/O layer and the CLI.
#[derive(Debug, Error)]
pub enum LcpError {
    /// A function argument violates its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Malformed configuration file, unknown key, bad unit suffix, bad flag.
    #[error("config error: {0}")]
    Config(String),

    /// A query lies outside the domain covered by tabulated data or a cache.
    #[error("range error: {0}")]
    Range(String),

    /// A requested quantity does not exist (e.g. a divergent integral).
    #[error("divergent: {0}")]
    Divergent(String),

    /// Kinematics for which a factored scattering quantity is singular.
    #[error("singular kinematics: {0}")]
    SingularKinematics(String),

    /// Quadrature failed to reach the requested accuracy. `value` carries the
    /// best available estimate, `achieved` the estimated relative error.
    #[error(
        "accuracy target not reached in {context}: achieved ~{achieved:.3e}, requested {requested:.3e}"
    )]
    Accuracy {
        context: String,
        achieved: f64,
        requested: f64,
        value: f64,
    },

    /// An approximation was evaluated outside the regime it is calibrated for.
    #[error("outside calibration domain: {0}")]
    CalibrationDomain(String),

    /// The condensate (or atom) would overlap the surface.
    #[error("surface contact: {0}")]
    SurfaceContact(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl LcpError {
    /// Process exit code: 2 for configuration/usage problems, 3 for numerical
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            LcpError::InvalidParameter(_)
            | LcpError::Config(_)
            | LcpError::Io(_)
            | LcpError::Parse(_) => 2,
            LcpError::Range(_)
            | LcpError::Divergent(_)
            | LcpError::SingularKinematics(_)
            | LcpError::Accuracy { .. }
            | LcpError::CalibrationDomain(_)
            | LcpError::SurfaceContact(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, LcpError>;
