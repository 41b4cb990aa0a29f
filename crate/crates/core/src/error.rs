use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("space has no dimensions")]
    EmptySpace,
    #[error("duplicate dimension name `{0}`")]
    DuplicateDimension(String),
    #[error("dimension `{0}`: inverted bounds (low must be < high)")]
    InvertedBounds(String),
    #[error("dimension `{0}`: log2 scale requires low > 0")]
    NonPositiveLogBound(String),
    #[error("dimension `{0}`: non-finite bound")]
    NonFiniteBound(String),
    #[error("dimension `{0}`: categorical dimensions need at least 2 distinct levels")]
    TooFewLevels(String),
    #[error("dimension `{name}`: invalid value {value}")]
    InvalidValue { name: String, value: String },
    #[error("configuration has {got} values, space has {expected} dimensions")]
    ArityMismatch { expected: usize, got: usize },
    #[error("no run records")]
    NoRecords,
    #[error("mixed measure names `{0}` and `{1}`")]
    MixedMeasures(String, String),
    #[error("non-finite measure value for dataset `{0}`")]
    NonFiniteMeasure(String),
    #[error("missing (dataset, configuration) cells: {}", fmt_pairs(.0))]
    MissingCells(Vec<(String, usize)>),
    #[error("matrix entries must be finite")]
    NonFiniteRisk,
    #[error("matrix shape mismatch: {0}")]
    Shape(&'static str),
    #[error("operation requires provenance {expected}, got {got}")]
    Provenance { expected: &'static str, got: &'static str },
    #[error("empty input")]
    Empty,
    #[error("invalid aggregator `{0}`")]
    InvalidAggregator(String),
    #[error("empty member set")]
    EmptyMembers,
    #[error("configuration index {index} out of range (M = {columns})")]
    IndexOutOfRange { index: usize, columns: usize },
    #[error("configuration {0} is already a member")]
    AlreadyMember(usize),
    #[error("set size n = {n} out of range (M = {columns})")]
    SizeOutOfRange { n: usize, columns: usize },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("need at least {needed} {what}, got {got}")]
    TooFew { what: &'static str, needed: usize, got: usize },
    #[error("budget {budget} exceeds the {columns} available configurations")]
    BudgetTooLarge { budget: usize, columns: usize },
    #[error("spaces do not match")]
    SpaceMismatch,
    #[error("unsupported {0}")]
    Unsupported(String),
}

fn fmt_pairs(pairs: &[(String, usize)]) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    for (i, (d, c)) in pairs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "({d}, {c})");
    }
    out
}
