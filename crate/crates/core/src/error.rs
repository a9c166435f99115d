use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("schedule shape mismatch: expected {expected_rows}x{expected_cols} (elements x time steps), found {found_rows}x{found_cols}")]
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        found_rows: usize,
        found_cols: usize,
    },

    #[error("gene {value} at element {element}, step {step} is outside [0, {max_gene}]")]
    GeneOutOfRange {
        element: usize,
        step: usize,
        value: u32,
        max_gene: u8,
    },

    #[error("element index {k} outside 1..={element_pairs}")]
    ElementIndex { k: usize, element_pairs: usize },

    #[error("invalid angle grid: {0}")]
    InvalidGrid(String),

    #[error("time {t} s outside one modulation period [0, {period})")]
    TimeOutOfRange { t: f64, period: f64 },

    #[error("pattern grid has {0} points; peak search needs at least 3")]
    GridTooShort(usize),

    #[error("degenerate input: all-zero schedule has no main beam, metrics are undefined")]
    DegenerateSchedule,

    #[error("degenerate input: fitness weights w1 and w2 are both zero")]
    ZeroWeights,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for inputs that are well-formed but have no defined metrics.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::DegenerateSchedule | Error::ZeroWeights)
    }
}
