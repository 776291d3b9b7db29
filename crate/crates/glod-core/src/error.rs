use std::path::PathBuf;

/// Errors produced by dataset ingestion, generators, kernels and detectors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("ingestion error: missing required file `{}`", .0.display())]
    MissingFile(PathBuf),

    #[error("format error in {file} line {line}: {message}")]
    Format {
        file: String,
        line: usize,
        message: String,
    },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("generation error: {0}")]
    Generation(String),

    #[error("rewiring error: {0}")]
    Rewiring(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("undefined AUC: {0}")]
    UndefinedAuc(String),

    #[error("report error: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
