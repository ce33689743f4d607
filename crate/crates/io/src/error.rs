use std::path::PathBuf;

/// Errors of the file and command layer.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("validation failed: {message} (coplanarity {coplanarity:.3e}, norm {norm:.3e}, margin {margin:.3e})")]
    Validation {
        message: String,
        coplanarity: f64,
        norm: f64,
        margin: f64,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] polyflex::Error),
}

impl IoError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Process exit status: 2 for invalid input, 3 for an ambiguous rank,
    /// 4 when a solver gives up, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use polyflex::Error as E;
        match self {
            Self::Validation { .. } | Self::Parse { .. } => 2,
            Self::Core(e) => match e {
                E::RankAmbiguous { .. } => 3,
                E::CorrectorDiverged(_)
                | E::NoConvergence(_)
                | E::SingularSystem
                | E::HullFailure(_)
                | E::NotAchieved(_)
                | E::InconsistentStress(_)
                | E::FaceChoiceMismatch(_)
                | E::NotALift(_) => 4,
                E::ValidationFailed(_)
                | E::IncidenceDegenerate { .. }
                | E::InvalidType(_)
                | E::NotPolyhedral(_)
                | E::TypeMismatch
                | E::DimensionMismatch { .. }
                | E::NotSpanning
                | E::DegenerateInput => 2,
                _ => 1,
            },
            Self::Io { .. } | Self::Usage(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, IoError>;
