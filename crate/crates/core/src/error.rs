use thiserror::Error;

/// Errors raised by the numerics and the command-line layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error at `{path}`: {msg}")]
    Config { path: String, msg: String },
    #[error("integration did not converge (achieved relative error {achieved:e})")]
    Integration { achieved: f64 },
    #[error("estimation error: {0}")]
    Estimation(String),
    #[error("bracket error: {0}")]
    Bracket(String),
    #[error("degenerate model: {0}")]
    Degenerate(String),
    #[error("model definition error: {0}")]
    Model(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Config { path: path.into(), msg: msg.into() }
}

/// Rejects non-finite or non-positive arguments.
pub(crate) fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite and positive, got {x}")))
    }
}
