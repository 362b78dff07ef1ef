use std::process::ExitCode;

use thiserror::Error;
use vhshift_core::{DatumError, FieldError, GraphError, MealyError, SpectralError, SubshiftError};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or bad input data.
    #[error("{0}")]
    Usage(String),
    /// A check ran and failed.
    #[error("{0}")]
    Violation(String),
    /// A dense or exact computation would exceed its configured cap.
    #[error("{0}")]
    Resource(String),
    #[error("cannot write {0}: {1}")]
    Io(String, #[source] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Violation(_) => 1,
            CliError::Usage(_) | CliError::Io(..) => 2,
            CliError::Resource(_) => 3,
        })
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<DatumError> for CliError {
    fn from(e: DatumError) -> Self {
        match e {
            DatumError::Invalid(_) => CliError::Violation(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<MealyError> for CliError {
    fn from(e: MealyError) -> Self {
        match e {
            MealyError::InvalidDatum(_) => CliError::Violation(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Datum(d) => d.into(),
            GraphError::Mealy(m) => m.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::TooLarge { .. } | SpectralError::NoConvergence => {
                CliError::Resource(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SubshiftError> for CliError {
    fn from(e: SubshiftError) -> Self {
        match e {
            SubshiftError::Datum(d) => d.into(),
            SubshiftError::Graph(g) => g.into(),
            SubshiftError::Spectral(s) => s.into(),
            SubshiftError::SizeCap { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}
