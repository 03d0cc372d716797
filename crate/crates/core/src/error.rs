use thiserror::Error;

/// Errors raised by the analysis, optimization and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty distribution")]
    Empty,

    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, outside tolerance {tol}")]
    NotNormalized { sum: f64, tol: f64 },

    #[error("row {row} invalid: {source}")]
    InvalidRow {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("symbol {symbol} outside alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("size cap exceeded: {what} needs {needed}, cap is {cap}; {hint}")]
    CapExceeded {
        what: &'static str,
        needed: f64,
        cap: f64,
        hint: &'static str,
    },

    #[error("could not draw a typical codeword after {attempts} attempts (n={n}, delta={delta})")]
    TypicalityRejection {
        attempts: usize,
        n: usize,
        delta: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize, context: &'static str) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            got,
            context,
        })
    }
}
