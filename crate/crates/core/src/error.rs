use thiserror::Error;

use crate::grid::ValidityReport;
use crate::MAX_DIM;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree must be at least 1, got {0}")]
    InvalidDegree(usize),

    #[error("coordinate {index} is {value}, outside the unit interval [0, 1]")]
    PointOutOfRange { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {0} exceeds the supported maximum of {MAX_DIM}")]
    DimensionTooLarge(usize),

    #[error("grid would hold {nodes} nodes, over the {limit} limit")]
    GridTooLarge { nodes: u128, limit: u128 },

    #[error("unknown copula family '{0}' (expected independence, min, w2, fgm or clayton)")]
    UnknownFamily(String),

    #[error("invalid parameter for family '{family}': {message}")]
    InvalidParameter {
        family: &'static str,
        message: String,
    },

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("copula '{0}' has no exact sampler")]
    NoSampler(String),

    #[error(
        "grid of '{source}' fails copula validation at tolerance {tol:e}: \
         boundary violation {max_boundary_violation:e}, min cell mass {min_cell_mass:e}, \
         total mass {mass_total}"
    )]
    ValidityFailure {
        source: String,
        tol: f64,
        max_boundary_violation: f64,
        min_cell_mass: f64,
        mass_total: f64,
    },

    #[error("empirical data rejected: {0}")]
    EmpiricalData(String),

    #[error("data error at row {row}: {message}")]
    DataRow { row: usize, message: String },

    #[error("could not draw {count} distinct uniforms on axis {axis} within the re-draw budget")]
    RedrawBudgetExhausted { axis: usize, count: usize },

    #[error("sample batch does not match the model: {0}")]
    BatchMismatch(String),

    #[error("copula '{0}' provides no analytic partial derivatives")]
    MissingPartial(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validity(source: &str, tol: f64, report: &ValidityReport) -> Self {
        Error::ValidityFailure {
            source: source.to_string(),
            tol,
            max_boundary_violation: report.max_boundary_violation,
            min_cell_mass: report.min_cell_mass,
            mass_total: report.mass_total,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
