use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// `|R_ii|` fell below the rank tolerance at column `index`.
    #[error("matrix is rank deficient at column {index} (|R_ii| = {diag:e}, max |R_jj| = {max_diag:e})")]
    RankDeficient { index: usize, diag: f64, max_diag: f64 },

    #[error("reduced problem is rank deficient ({kind} sketch, s = {s}, seed = {seed}): {source}")]
    SketchDegenerate {
        kind: &'static str,
        s: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("too large to materialize: {rows}x{cols} exceeds {limit} entries")]
    SizeGuard { rows: usize, cols: usize, limit: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Row and column are 1-based data positions (the header is not counted).
    #[error("csv parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("csv error: {0}")]
    Csv(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the numerics rather than the input data.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::RankDeficient { .. } | Error::SketchDegenerate { .. })
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
