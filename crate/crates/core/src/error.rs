use std::fmt;

/// Which single-objective gradient vanished at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vanished {
    F1,
    F2,
    Both,
}

impl fmt::Display for Vanished {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vanished::F1 => f.write_str("f1"),
            Vanished::F2 => f.write_str("f2"),
            Vanished::Both => f.write_str("f1 and f2"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point lies outside the box")]
    OutsideBox,
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown problem id `{0}`")]
    UnknownProblem(String),
    #[error("gradient of {0} vanished")]
    DegenerateGradient(Vanished),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    /// True for errors caused by bad caller input (CLI exit code 2).
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::OutsideBox
                | Error::InvalidBox(_)
                | Error::InvalidArgument(_)
                | Error::UnknownProblem(_)
                | Error::Config(_)
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
