//! Delimited-text tables of tabulated functions.
//!
//! One row per grid node: `x, re` or `x, re, im`, separated by commas and/or
//! whitespace. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use crate::metric::{Grid, GridFunction, MetricError};

/// Maximum allowed deviation of a row's `x` from the problem grid node.
pub const GRID_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CandidateError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("grid mismatch at line {line}: expected x = {expected}, found {found}")]
    GridMismatch {
        line: usize,
        expected: f64,
        found: f64,
    },
    #[error("grid mismatch: expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

pub fn read_candidate(text: &str, grid: Grid) -> Result<GridFunction, CandidateError> {
    let mut values = Vec::with_capacity(grid.n());
    let mut rows = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(CandidateError::Malformed {
                line,
                message: format!("expected 2 or 3 columns, found {}", fields.len()),
            });
        }
        let num = |s: &str| {
            s.parse::<f64>().map_err(|_| CandidateError::Malformed {
                line,
                message: format!("'{s}' is not a number"),
            })
        };
        let x = num(fields[0])?;
        let re = num(fields[1])?;
        let im = fields.get(2).map(|s| num(s)).transpose()?.unwrap_or(0.0);

        if rows < grid.n() {
            let expected = grid.node(rows);
            if !((x - expected).abs() <= GRID_MATCH_TOL) {
                return Err(CandidateError::GridMismatch {
                    line,
                    expected,
                    found: x,
                });
            }
            values.push(Complex64::new(re, im));
        }
        rows += 1;
    }
    if rows != grid.n() {
        return Err(CandidateError::RowCount {
            expected: grid.n(),
            found: rows,
        });
    }
    Ok(GridFunction::new(grid, values)?)
}

/// Three-column table readable by [`read_candidate`]; values round-trip exactly.
pub fn write_table(f: &GridFunction) -> String {
    let mut out = String::from("# x, re, im\n");
    for (x, v) in f.grid().nodes().zip(f.values()) {
        writeln!(out, "{x:?}, {:?}, {:?}", v.re, v.im).expect("writing to a String");
    }
    out
}
