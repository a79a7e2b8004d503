use thiserror::Error;

/// Errors raised by the comb-domain library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid family parameter: {0}")]
    InvalidFamilyParam(String),

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    /// The query lies to the right of the last materialized tooth.
    #[error("point lies beyond the materialized teeth (Re z > {last_x})")]
    OutsideTruncation { last_x: f64 },

    #[error("log x_{n} is not positive")]
    DegenerateLog { n: usize },

    #[error("gap alpha_{index} is not representable as a float below the cap")]
    Overflow { index: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("target unreachable on the grid (cells too coarse?)")]
    Unreachable,

    #[error("start point is not inside the domain")]
    StartOutsideDomain,

    #[error("{hits} of {n} paths were truncated, above the {cap} cap")]
    TooManyTruncations { hits: usize, n: usize, cap: f64 },

    #[error("spec parse error: {0}")]
    SpecParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
