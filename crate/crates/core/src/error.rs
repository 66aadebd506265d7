use crate::expr::{EvalError, ParseError};
use crate::jet::TooManyGenerators;
use crate::linalg::Singular;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Generators(#[from] TooManyGenerators),
    #[error("outside Finsler domain: F = {0}")]
    OutsideDomain(f64),
    #[error("degenerate metric at point: {0}")]
    Degenerate(#[from] Singular),
    #[error("{0} is undefined here")]
    Undefined(&'static str),
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error in `{text}`: {source}")]
    Parse { text: String, source: ParseError },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no admissible sample point after {attempts} attempts")]
    EmptySample { attempts: usize },
    #[error("unknown registry entry `{0}`")]
    UnknownEntry(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
