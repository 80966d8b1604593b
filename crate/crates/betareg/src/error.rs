use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A special function was called outside its domain.
    #[error("domain error in {function}: argument {value} must satisfy {requirement}")]
    Domain {
        function: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// Invalid dataset, coefficients, or configuration.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A fitted mean underflowed to 0 or 1 during evaluation.
    #[error("fitted mean for observation {observation} underflowed to {value}")]
    DegenerateMean { observation: usize, value: f64 },

    /// A design column has zero weighted curvature; its coefficient cannot move.
    #[error("zero curvature in design column {column}")]
    ZeroCurvature { column: usize },

    /// All canonical coefficients are exactly zero; no shrinkage parameter can be formed.
    #[error("all canonical coefficients are zero; shrinkage selector undefined")]
    DegenerateGamma,

    /// The penalty grid was empty or could not be derived.
    #[error("empty penalty grid")]
    EmptyGrid,

    /// Every cross-validation fold failed to produce a usable fit.
    #[error("all {0} cross-validation folds were skipped")]
    AllFoldsSkipped(usize),

    /// Beta sampling kept hitting the boundary of (0,1).
    #[error("response draw for observation {observation} hit the boundary of (0,1) after {attempts} attempts")]
    BoundaryDraw { observation: usize, attempts: usize },

    /// Bootstrap resampling exceeded the redraw cap.
    #[error("bootstrap redraw cap exceeded: {attempts} attempts for {requested} resamples")]
    RedrawCapExceeded { attempts: usize, requested: usize },

    /// A named CSV column is absent.
    #[error("column '{name}' not found in input")]
    MissingColumn { name: String },

    /// A CSV cell failed to parse as a number.
    #[error("non-numeric cell at data row {row}, column '{column}': '{contents}'")]
    NonNumericCell {
        row: usize,
        column: String,
        contents: String,
    },

    /// Response values fall outside the open interval (0,1) after scaling.
    #[error("response outside (0,1) at data rows {rows:?}")]
    ResponseOutOfRange { rows: Vec<usize> },

    /// A predictor column is constant.
    #[error("column '{column}' has zero variance")]
    ZeroVariance { column: String },

    /// A distribution fit used by a diagnostic failed.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
