//! JSON channel files.
//!
//! ```json
//! { "x": 2, "y": 2, "z": 2, "s": 1,
//!   "W": [[[0.9, 0.1], [0.1, 0.9]]],
//!   "V": [[[0.6, 0.4], [0.4, 0.6]]] }
//! ```
//!
//! `W[s][x]` is the output law of Bob's channel in state `s` for input `x`;
//! `V` is the same for Eve.

use std::path::Path;

use avwc_core::channel::AvwcPair;
use avwc_core::{Distribution, StochasticMatrix};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Row sums may deviate from one by at most this much.
pub const ROW_TOLERANCE: f64 = 1e-9;

/// Name that resolves to the bundled three-input example.
pub const BUNDLED_EXAMPLE: &str = "example_sec5";
pub const BUNDLED_EXAMPLE_JSON: &str = include_str!("../fixtures/example_sec5.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub s: usize,
    #[serde(rename = "W")]
    pub w: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "V")]
    pub v: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("malformed channel file at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("alphabet size `{field}` must be at least 1")]
    EmptyAlphabet { field: &'static str },

    #[error("{matrix} has {got} states, expected s = {expected}")]
    StateCount {
        matrix: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{matrix}[{state}] has {got} rows, expected x = {expected}")]
    RowCount {
        matrix: &'static str,
        state: usize,
        expected: usize,
        got: usize,
    },

    #[error("{matrix}[{state}][{row}] has {got} entries, expected {expected}")]
    RowLength {
        matrix: &'static str,
        state: usize,
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("{matrix}[{state}][{row}][{col}] = {value} is not a probability")]
    BadEntry {
        matrix: &'static str,
        state: usize,
        row: usize,
        col: usize,
        value: f64,
    },

    #[error("{matrix}[{state}][{row}] sums to {sum}, not 1 (tolerance {tol:e})")]
    RowSum {
        matrix: &'static str,
        state: usize,
        row: usize,
        sum: f64,
        tol: f64,
    },
}

impl ChannelSpecFile {
    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let spec: Self = serde_json::from_str(text).map_err(|e| SpecError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    /// Pretty JSON; parsing it back gives a bit-identical file.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data always serializes")
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        for (field, v) in [("x", self.x), ("y", self.y), ("z", self.z), ("s", self.s)] {
            if v == 0 {
                return Err(SpecError::EmptyAlphabet { field });
            }
        }
        check_family("W", &self.w, self.s, self.x, self.y)?;
        check_family("V", &self.v, self.s, self.x, self.z)
    }

    pub fn from_pair(pair: &AvwcPair) -> Self {
        let dump = |f: &avwc_core::channel::ChannelFamily| {
            f.states().iter().map(StochasticMatrix::to_rows).collect()
        };
        Self {
            name: None,
            description: None,
            x: pair.n_inputs(),
            y: pair.n_legit_outputs(),
            z: pair.n_eve_outputs(),
            s: pair.n_states(),
            w: dump(pair.legit()),
            v: dump(pair.eve()),
        }
    }

    pub fn to_pair(&self) -> Result<AvwcPair, CliError> {
        self.validate()?;
        let build = |states: &[Vec<Vec<f64>>]| -> Result<Vec<StochasticMatrix>, CliError> {
            states
                .iter()
                .map(|rows| {
                    Ok(StochasticMatrix::from_rows_with_tolerance(
                        rows.clone(),
                        ROW_TOLERANCE,
                    )?)
                })
                .collect()
        };
        Ok(AvwcPair::from_matrices(build(&self.w)?, build(&self.v)?)?)
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or("(unnamed)")
    }
}

fn check_family(
    matrix: &'static str,
    states: &[Vec<Vec<f64>>],
    s: usize,
    x: usize,
    n_out: usize,
) -> Result<(), SpecError> {
    if states.len() != s {
        return Err(SpecError::StateCount {
            matrix,
            expected: s,
            got: states.len(),
        });
    }
    for (state, rows) in states.iter().enumerate() {
        if rows.len() != x {
            return Err(SpecError::RowCount {
                matrix,
                state,
                expected: x,
                got: rows.len(),
            });
        }
        for (row, probs) in rows.iter().enumerate() {
            if probs.len() != n_out {
                return Err(SpecError::RowLength {
                    matrix,
                    state,
                    row,
                    expected: n_out,
                    got: probs.len(),
                });
            }
            if let Some((col, &value)) = probs
                .iter()
                .enumerate()
                .find(|(_, v)| !v.is_finite() || **v < 0.0 || **v > 1.0 + ROW_TOLERANCE)
            {
                return Err(SpecError::BadEntry {
                    matrix,
                    state,
                    row,
                    col,
                    value,
                });
            }
            let sum: f64 = probs.iter().sum();
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(SpecError::RowSum {
                    matrix,
                    state,
                    row,
                    sum,
                    tol: ROW_TOLERANCE,
                });
            }
        }
    }
    Ok(())
}

/// Reads a channel file, or the bundled example when `arg` names it and no
/// such file exists.
pub fn load_channel(arg: &str) -> Result<ChannelSpecFile, CliError> {
    let path = Path::new(arg);
    if !path.exists() && arg == BUNDLED_EXAMPLE {
        return Ok(ChannelSpecFile::from_json(BUNDLED_EXAMPLE_JSON)?);
    }
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(ChannelSpecFile::from_json(&text)?)
}

/// Loads and validates a channel file into a channel pair.
pub fn parse_channel_file(path: impl AsRef<Path>) -> Result<AvwcPair, CliError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ChannelSpecFile::from_json(&text)?.to_pair()
}

/// Parses `"0.5,0.25,0.25"` into a distribution over `n` symbols.
pub fn parse_distribution(text: &str, n: usize) -> Result<Distribution, CliError> {
    let probs: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("--input: {e}")))?;
    if probs.len() != n {
        return Err(CliError::Usage(format!(
            "--input has {} entries, the channel has {n} inputs",
            probs.len()
        )));
    }
    Distribution::with_tolerance(probs, ROW_TOLERANCE)
        .map_err(|e| CliError::Usage(format!("--input: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_example_parses() {
        let spec = ChannelSpecFile::from_json(BUNDLED_EXAMPLE_JSON).unwrap();
        assert_eq!((spec.x, spec.y, spec.z, spec.s), (3, 2, 2, 2));
        assert_eq!(spec.w[1][1], vec![0.85, 0.15]);
        spec.to_pair().unwrap();
    }

    #[test]
    fn row_errors_name_the_row() {
        let mut spec = ChannelSpecFile::from_json(BUNDLED_EXAMPLE_JSON).unwrap();
        spec.v[1][2] = vec![0.65, 0.3];
        let err = spec.validate().unwrap_err();
        assert!(matches!(
            err,
            SpecError::RowSum {
                matrix: "V",
                state: 1,
                row: 2,
                ..
            }
        ));
        assert!(err.to_string().starts_with("V[1][2] sums to"));
    }

    #[test]
    fn tiny_rounding_is_accepted() {
        let mut spec = ChannelSpecFile::from_json(BUNDLED_EXAMPLE_JSON).unwrap();
        spec.w[0][0] = vec![0.1, 0.9 + 5e-10];
        spec.validate().unwrap();
        spec.w[0][0] = vec![0.1, 0.9 + 5e-9];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn input_lists() {
        let p = parse_distribution("0.5, 0.5,0", 3).unwrap();
        assert_eq!(p.probs(), &[0.5, 0.5, 0.0]);
        assert!(parse_distribution("0.5,0.5", 3).is_err());
        assert!(parse_distribution("a,b,c", 3).is_err());
    }
}
