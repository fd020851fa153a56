use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("basic offspring number R = {0} does not exceed 1; extinction is the only equilibrium")]
    Subcritical(f64),

    #[error("clip of {magnitude:e} on {component} at t = {t} exceeds {limit:e}; time step too large")]
    ClipExceeded {
        t: f64,
        component: &'static str,
        magnitude: f64,
        limit: f64,
    },

    #[error("zero pivot in tridiagonal solve at row {0}")]
    ZeroPivot(usize),

    #[error("invalid bracket: {0}")]
    InvalidBracket(String),

    #[error("indeterminate outcome: {0}")]
    Indeterminate(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for configuration/precondition errors, 3 for
    /// numerical failures. (0 and 1 are reserved for pass / failed check.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::Subcritical(_)
            | Error::InvalidBracket(_)
            | Error::Config(_) => 2,
            Error::ClipExceeded { .. }
            | Error::ZeroPivot(_)
            | Error::Indeterminate(_)
            | Error::Numerical(_)
            | Error::Io(_) => 3,
        }
    }
}
