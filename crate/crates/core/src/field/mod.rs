//! Regular 2D scalar grids: ingestion, serialization and comparison.
//!
//! Grid text format: the first line is `<height> <width>`, followed by
//! `height` lines of `width` comma-separated decimal numbers.

mod synth;
mod triangulation;

pub use synth::{perturb_field, synth_baseline, BaselineParams};
pub use triangulation::{triangulate, SimplicialField};

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("empty grid file")]
    Empty,
    #[error("line {line}: malformed header, expected `<height> <width>`")]
    BadHeader { line: usize },
    #[error("line {line}: non-numeric token `{token}`")]
    NonNumeric { line: usize, token: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("grid must have positive width and height")]
    ZeroSized,
    #[error("degenerate grid {height}x{width}: triangulation needs at least 2 rows and 2 columns")]
    Degenerate { width: usize, height: usize },
    #[error("perturbation amplitude must be non-negative, got {0}")]
    NegativeAmplitude(f64),
}

/// A scalar field sampled on a regular grid, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScalarGrid {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::ZeroSized);
        }
        if values.len() != width * height {
            return Err(GridError::DimensionMismatch(format!(
                "expected {} values for a {}x{} grid, got {}",
                width * height,
                height,
                width,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite(i));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Builds a grid by evaluating `f(row, col)` at every sample.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, GridError> {
        let mut values = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                values.push(f(row, col));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    /// Returns a copy with every value negated.
    pub fn negated(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Parses the grid text format. Decimal separator is always a period.
    pub fn parse(text: &str) -> Result<Self, GridError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (header_line, header) = lines.next().ok_or(GridError::Empty)?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        let [h, w] = dims.as_slice() else {
            return Err(GridError::BadHeader { line: header_line });
        };
        let height: usize = h
            .parse()
            .map_err(|_| GridError::BadHeader { line: header_line })?;
        let width: usize = w
            .parse()
            .map_err(|_| GridError::BadHeader { line: header_line })?;

        let mut values = Vec::with_capacity(width * height);
        let mut rows = 0;
        for (line_no, line) in lines {
            rows += 1;
            if rows > height {
                return Err(GridError::DimensionMismatch(format!(
                    "line {line_no}: more than {height} rows"
                )));
            }
            let before = values.len();
            for token in line.split(',') {
                let token = token.trim();
                let v: f64 = token.parse().map_err(|_| GridError::NonNumeric {
                    line: line_no,
                    token: token.to_string(),
                })?;
                values.push(v);
            }
            if values.len() - before != width {
                return Err(GridError::DimensionMismatch(format!(
                    "line {line_no}: expected {width} values, got {}",
                    values.len() - before
                )));
            }
        }
        if rows != height {
            return Err(GridError::DimensionMismatch(format!(
                "expected {height} rows, got {rows}"
            )));
        }
        Self::new(width, height, values)
    }

    /// Serializes to the grid text format using shortest round-trip decimals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.height, self.width);
        for row in self.values.chunks(self.width) {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Maximum absolute sample-wise difference between two grids.
pub fn linf_distance(a: &ScalarGrid, b: &ScalarGrid) -> Result<f64, GridError> {
    if a.width != b.width || a.height != b.height {
        return Err(GridError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.height, a.width, b.height, b.width
        )));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}
