use thiserror::Error;

/// Errors produced by training, scoring and capability analysis.
#[derive(Debug, Error)]
pub enum SvddError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("solver did not converge after {iterations} iterations (kkt violation {violation:e})")]
    NotConverged { iterations: usize, violation: f64 },

    #[error("degenerate model: no support vector lies strictly inside the box (0, C); lower the outlier fraction")]
    DegenerateModel,

    #[error(
        "process region does not intersect specification box at this simulation size (n_es = {n_es})"
    )]
    EmptyIntersection { n_es: usize },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<SvddError>,
    },
}

impl SvddError {
    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        SvddError::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, with stage labels stripped.
    pub fn root(&self) -> &SvddError {
        match self {
            SvddError::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, SvddError>;
