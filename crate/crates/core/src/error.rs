use std::io;

use thiserror::Error;

/// Errors raised anywhere in the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed CSV at line {line}: {message}")]
    MalformedCsv { line: u64, message: String },
    #[error("column `{0}` not found in CSV header")]
    UnknownColumn(String),
    #[error("column mapping names must be distinct, `{0}` is used twice")]
    DuplicateColumnMapping(String),
    #[error("duplicate row for task `{task}`, case `{case}`, algorithm `{algorithm}`")]
    DuplicateCell {
        task: String,
        case: String,
        algorithm: String,
    },
    #[error("value `{value}` at line {line} is not a decimal number")]
    NonNumericValue { line: u64, value: String },
    #[error("{count} missing value(s) present, first at task `{task}`, case `{case}`, algorithm `{algorithm}`")]
    MissingPresent {
        count: usize,
        task: String,
        case: String,
        algorithm: String,
    },
    #[error("worst value {0} is not finite")]
    NonFiniteWorstValue(f64),
    #[error("tasks have differing algorithm sets (task `{task}` differs); use intersect mode to restrict to the common set")]
    DifferingAlgorithmSets { task: String },
    #[error("no data: {0}")]
    EmptyInput(String),
    #[error("at least {required} algorithms are required, found {found}")]
    TooFewAlgorithms { required: usize, found: usize },
    #[error("rank lists do not share the same keys")]
    KeyMismatch,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("p-value {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("rankings cover different algorithm sets")]
    AlgorithmSetMismatch,
    #[error("weight for task `{0}` must be positive")]
    NonPositiveWeight(String),
    #[error("at least 2 tasks are required, found {0}; use single-task mode")]
    TooFewTasks(usize),
    #[error("{requested} algorithms do not fit into disjoint intervals of width 0.1 (max 9 with lower bound > 0)")]
    TooManyAlgorithms { requested: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
