use thiserror::Error;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in `{text}`: {source}")]
    Parse {
        text: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("h is singular: {0}")]
    SingularH(String),
    #[error("frame generation failed after {attempts} attempts")]
    FrameGeneration { attempts: usize },
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("reduced-equation mismatch: ansatz reduces to `{ansatz}`, solution solves `{solution}`")]
    ReducedEquationMismatch { ansatz: String, solution: String },
    #[error("no admissible sample points: {0}")]
    NoSamples(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(text: &str, source: ParseError) -> Error {
        Error::Parse {
            text: text.to_string(),
            source,
        }
    }
}
