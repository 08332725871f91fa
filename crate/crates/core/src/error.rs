use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("argument outside the scaled range: {0}")]
    Overflow(String),
    #[error("point lies on a branch cut: {0}")]
    OnCut(String),
    #[error("singular matrix (det = {0:e})")]
    Singular(f64),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("invalid lattice data: {0}")]
    InvalidData(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("boundary buffer disturbed at t = {t:.4} (deviation {deviation:e})")]
    BufferViolation { t: f64, deviation: f64 },
    #[error("positivity lost: a({site}) = {value:e} at t = {t:.4}")]
    Positivity { site: i64, value: f64, t: f64 },
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Process exit codes of the `toda-lab` binary.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const VERIFICATION_FAILED: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const RUNTIME_ABORT: u8 = 3;
}

impl LabError {
    /// Exit code for a run that stopped with this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Config(_) => exit::CONFIG,
            _ => exit::RUNTIME_ABORT,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(LabError::Config("x".into()).exit_code(), 2);
        assert_eq!(LabError::BufferViolation { t: 1.0, deviation: 1.0 }.exit_code(), 3);
        assert_eq!(LabError::Positivity { site: 0, value: -1.0, t: 1.0 }.exit_code(), 3);
    }
}
