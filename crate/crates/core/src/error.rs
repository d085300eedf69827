use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("feature map references column {column}, but the data has {available} columns")]
    MissingColumn { column: usize, available: usize },

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("invalid feature map: {0}")]
    InvalidFeatureMap(String),

    #[error("design has {rows} rows but {features} features")]
    InsufficientRows { rows: usize, features: usize },

    #[error("singular design: pivot {pivot:.3e} below relative tolerance")]
    SingularDesign { pivot: f64 },

    #[error("feature {feature} has zero variance and cannot be penalized")]
    DegenerateFeature { feature: usize },

    #[error("design matrix has no response vector")]
    MissingResponse,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown node '{0}'")]
    UnknownNode(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("node sets overlap on '{0}'")]
    OverlappingSets(String),

    #[error("latent node '{0}' cannot be conditioned on")]
    LatentConditioning(String),

    #[error("graph has no selection node")]
    NoSelectionNode,

    #[error("graph roles are not set: {0}")]
    RolesUnset(&'static str),

    #[error("assumption check failed: {0}")]
    AssumptionViolated(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("column '{0}' not found")]
    ColumnNotFound(String),

    #[error("estimator case mismatch: {0}")]
    CaseMismatch(String),

    #[error("invalid structural model: {0}")]
    InvalidScm(String),

    #[error("selection kept no rows after {attempts} attempts")]
    EmptySelection { attempts: usize },

    #[error("unknown example '{0}'")]
    UnknownExample(String),

    #[error("experiment degraded: {failures} of {runs} runs failed for {estimator} at n={n}")]
    ExperimentDegraded {
        estimator: String,
        n: usize,
        failures: usize,
        runs: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
