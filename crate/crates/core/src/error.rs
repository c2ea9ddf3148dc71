use std::path::PathBuf;

use thiserror::Error;

use crate::evaluation::EvaluationError;
use crate::generator::GenerateError;
use crate::grammar::GrammarError;
use crate::ngram::NGramError;
use crate::phonology::PhonologyError;
use crate::renga::RengaError;
use crate::semantics::SemanticsError;

/// Any error the library surfaces at its top level.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Phonology(#[from] PhonologyError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    NGram(#[from] NGramError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
    #[error(transparent)]
    Renga(#[from] RengaError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("model cache: {0}")]
    Cache(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable name of the underlying variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Phonology(e) => e.code(),
            Error::Grammar(e) => e.code(),
            Error::NGram(e) => e.code(),
            Error::Semantics(e) => e.code(),
            Error::Generate(e) => e.code(),
            Error::Evaluation(e) => e.code(),
            Error::Renga(e) => e.code(),
            Error::Io { .. } => "Io",
            Error::Cache(_) => "Cache",
            Error::Json(_) => "Json",
        }
    }
}
