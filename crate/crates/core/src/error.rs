use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChaosError {
    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("contraction order {p} out of range for orders {n} and {q}")]
    ContractionOrder { p: usize, n: usize, q: usize },

    #[error("slice position {k} / cell {cell} out of range for order {order} on {cells} cells")]
    SliceOutOfRange { k: usize, cell: usize, order: usize, cells: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("odd number of points ({0}) cannot be paired")]
    OddSize(usize),

    #[error("{points} points exceeds the enumeration guard of {guard}")]
    SizeGuard { points: usize, guard: usize },

    #[error("budget exceeded: {needed} entries requested, budget is {budget}")]
    BudgetExceeded { needed: usize, budget: usize },

    #[error("kernel norm {norm} is not 1 (tolerance {tol})")]
    NotUnitNorm { norm: f64, tol: f64 },

    #[error("kernel is not mirror symmetric (defect {defect})")]
    NotMirrorSymmetric { defect: f64 },

    #[error("matrix is not Hermitian (defect {defect})")]
    NotHermitian { defect: f64 },

    #[error("{count} pairs of coincident eigenvalues within {tol}")]
    DuplicateEigenvalues { count: usize, tol: f64 },

    #[error("quantile level {0} outside (0, 1)")]
    InvalidQuantile(f64),

    #[error("sample size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("kernel file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ChaosError>;
