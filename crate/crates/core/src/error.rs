use thiserror::Error;

/// Failure modes shared by every layer of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Photon-number truncation too small for the requested state.
    #[error("truncation tail too heavy: mass {tail:.3e} above n = {cutoff} (n_max = {n_max})")]
    TailTooHeavy { tail: f64, cutoff: usize, n_max: usize },

    /// The vector was expected to be unit norm.
    #[error("state is not normalized: |psi|^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    /// Destructive interference wiped out the superposition.
    #[error("degenerate superposition: norm^2 = {norm_sqr:.3e}")]
    DegenerateSuperposition { norm_sqr: f64 },

    /// Every outcome on an averaging grid was degenerate.
    #[error("all outcomes on the averaging grid are degenerate")]
    AllOutcomesDegenerate,

    #[error("cannot build target state: {0}")]
    TargetUnbuildable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for purely numerical failures (degenerate or truncated states).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TailTooHeavy { .. }
                | Error::NotNormalized { .. }
                | Error::DegenerateSuperposition { .. }
                | Error::AllOutcomesDegenerate
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
