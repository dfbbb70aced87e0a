use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} = {value} is not a probability in [0, 1]")]
    NotAProbability { name: &'static str, value: f64 },
    #[error("noise-location probabilities sum to {sum}, expected 1")]
    QSum { sum: f64 },
    #[error(
        "expected {expected} noise-location probabilities for {n_eves} eavesdroppers, got {got}"
    )]
    QArity {
        n_eves: usize,
        expected: usize,
        got: usize,
    },
    #[error("eavesdropper index {m} outside 1..={n_eves}")]
    EveIndex { m: usize, n_eves: usize },
    #[error("enumeration over {n} eavesdroppers exceeds the limit of {limit}")]
    TooManyEavesdroppers { n: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("at least one eavesdropper is required, got {0}")]
    NoEavesdroppers(usize),
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error("parameter grid is not strictly increasing at index {0}")]
    UnorderedGrid(usize),
    #[error("no secured/unsecured threshold exists at p = {p}: {boundary}")]
    NoThreshold {
        p: f64,
        boundary: crate::analysis::Boundary,
    },
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("row {row} has {got} cells, header has {expected}")]
    Arity {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("row {row}, column `{column}`: non-finite value {value}")]
    NonFinite {
        row: usize,
        column: String,
        value: f64,
    },
    #[error("no column named `{0}`")]
    NoColumn(String),
    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for TableError {
    fn from(e: csv::Error) -> Self {
        TableError::Csv(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("photon count must be at least 1")]
    NoPhotons,
    #[error("no photon survived basis sifting out of {0}")]
    NothingSifted(u64),
    #[error("{party}: zero standard error with estimate {hat} against closed form {expected}")]
    DegenerateStderr {
        party: String,
        hat: f64,
        expected: f64,
    },
}
