//! Error taxonomy mapped onto process exit codes: 2 configuration,
//! 3 numerical instability, 4 I/O, 1 tolerance violation in a compare run.

use thiserror::Error;
use trihelix_core::field_dh::DhError;
use trihelix_core::field_th::ThError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("instability at step {step}: |{field}| reached {magnitude:.6e}")]
    Instability {
        step: u64,
        field: String,
        magnitude: f64,
    },
    #[error("{0}")]
    Io(String),
    #[error("residual {residual:.6e} exceeds tolerance {tolerance:.6e}")]
    ToleranceExceeded { residual: f64, tolerance: f64 },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError::Io(msg.into())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Instability { .. } => "instability",
            CliError::Io(_) => "io",
            CliError::ToleranceExceeded { .. } => "tolerance",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Instability { .. } => 3,
            CliError::Io(_) => 4,
            CliError::ToleranceExceeded { .. } => 1,
        }
    }

    /// The single machine-readable error line printed to stderr.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.to_string() }
        })
        .to_string()
    }
}

impl From<DhError> for CliError {
    fn from(e: DhError) -> Self {
        match e {
            DhError::Instability {
                step,
                field,
                magnitude,
                ..
            } => CliError::Instability {
                step,
                field: field.to_owned(),
                magnitude,
            },
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<ThError> for CliError {
    fn from(e: ThError) -> Self {
        match e {
            ThError::Instability {
                step,
                field,
                magnitude,
                ..
            } => CliError::Instability {
                step,
                field: field.to_owned(),
                magnitude,
            },
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<trihelix_core::waves::WaveError> for CliError {
    fn from(e: trihelix_core::waves::WaveError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
