use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("csv error: {0}")]
    Csv(String),

    #[error("attribute `{0}` not found")]
    UnknownAttribute(String),

    #[error("duplicate attribute `{0}` in header")]
    DuplicateAttribute(String),

    #[error("row {row}, column `{column}`: `{value}` is not a number")]
    NotNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}, column `{column}`: {value} lies outside [{low}, {high})")]
    OutOfRange {
        row: usize,
        column: String,
        value: f64,
        low: f64,
        high: f64,
    },

    #[error("bin boundaries must be strictly increasing with at least two entries")]
    InvalidBoundaries,

    #[error("unknown item id {0}")]
    UnknownItem(u32),

    #[error("unknown item `{0}`")]
    UnknownItemLabel(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no frequent itemset of size >= 2 to seed the population; try a lower minimum support")]
    NoSeedItemsets,

    #[error("refusing to enumerate: {0}")]
    EnumerationTooLarge(String),

    #[error("catalog mismatch: {0}")]
    CatalogMismatch(String),

    #[error("{0}")]
    Format(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
