use std::path::PathBuf;

/// Failures of a harness command, grouped by the exit code they map to.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] laser_magnus::Error),
    /// A run that cannot be set up as requested.
    #[error("{0}")]
    Request(String),
    /// A run that started but produced unusable numbers.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {reason}", path.display())]
    Format { path: PathBuf, line: usize, reason: String },
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for configuration problems, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Numerical(_) | Self::Core(laser_magnus::Error::EigenSolver(_)) => 3,
            Self::Io { .. } => 1,
            Self::Core(_) | Self::Request(_) | Self::Format { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
