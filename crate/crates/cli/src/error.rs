use htv_core::cpwl::CpwlError;
use htv_core::domain::DomainError;
use htv_core::fence::FenceError;
use htv_core::ingest::IngestError;
use htv_core::matnorm::MatrixError;
use htv_core::oracle::OracleError;
use htv_core::smooth::SmoothError;
use htv_core::transforms::TransformError;
use thiserror::Error;

/// Every failure the binary reports, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invariant(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Invariant(_) => "invariant",
            CliError::Numerical(_) => "numerical",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    /// `error: kind=... message="..."` on one line.
    pub fn line(&self) -> String {
        format!("error: kind={} message={:?}", self.kind(), self.to_string().replace('\n', " "))
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io { .. } | IngestError::Parse { .. } | IngestError::ValueCount { .. } => {
                CliError::Parse(e.to_string())
            }
            IngestError::Weights(_) | IngestError::InputDim { .. } => CliError::Parse(e.to_string()),
            IngestError::Mesh(_) | IngestError::Delaunay(_) => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<CpwlError> for CliError {
    fn from(e: CpwlError) -> Self {
        CliError::Invariant(e.to_string())
    }
}

impl From<FenceError> for CliError {
    fn from(e: FenceError) -> Self {
        CliError::Invariant(e.to_string())
    }
}

impl From<DomainError> for CliError {
    fn from(e: DomainError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::InvalidOrder(_) => CliError::Parse(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SmoothError> for CliError {
    fn from(e: SmoothError) -> Self {
        match e {
            SmoothError::SingularPoint(_) | SmoothError::Matrix(_) | SmoothError::StencilOutside { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::NonFiniteSample { .. } | OracleError::Matrix(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Matrix(_) => CliError::Numerical(e.to_string()),
            TransformError::Cpwl(_) => CliError::Invariant(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}
