use thiserror::Error;

use crate::model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("enumeration needs {size} states, above the cap of {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("object `{id}` is normally distributed; discretize it before enumerating")]
    NonDiscrete { id: String },
    #[error("value {value} is not in the support of object `{id}`")]
    ValueNotInSupport { id: String, value: f64 },
    #[error("object index {index} is out of range ({len} objects)")]
    UnknownObject { index: usize, len: usize },
    #[error("unknown object id `{0}`")]
    UnknownId(String),
    #[error("assignment is missing values for object indices {0:?}")]
    MissingValues(Vec<usize>),
    #[error("dataset failed validation: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("window claims do not fit in the series: {0}")]
    InsufficientRange(String),
    #[error("cost {cost} of object {index} is not an integer; pass a cost scale or use the FPTAS")]
    NonIntegerCost { index: usize, cost: f64 },
    #[error("ill-posed probability: {0}")]
    IllPosed(String),
    #[error("object `{id}` is not normally distributed")]
    NonNormal { id: String },
    #[error("dataset has no covariance matrix")]
    MissingCovariance,
    #[error("operation assumes independent objects but the dataset carries a covariance model")]
    Dependent,
    #[error("dependent objects are only supported for linear queries")]
    DependentNonLinear,
    #[error("query is not a sum of per-claim terms")]
    NotDecomposable,
    #[error("brute force over {n} objects exceeds the limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("curvature undefined: EVar(O \\ {{i}}) is zero for every object")]
    CurvatureUndefined,
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("claims file: {0}")]
    Claims(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for problems with the inputs rather than the solve.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Infeasible(_) | Error::Io(_))
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
