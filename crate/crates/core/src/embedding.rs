//! Per-snapshot vertex embeddings and their text serialization.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// |V| x d matrix, row v = embedding of vertex v. Entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    values: DMatrix<f64>,
}

impl EmbeddingMatrix {
    pub fn from_matrix(values: DMatrix<f64>) -> Result<Self> {
        if values.ncols() == 0 {
            return Err(Error::invalid("dim", "embedding dimension must be at least 1"));
        }
        if let Some(bad) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::invalid("values", format!("non-finite entry {bad}")));
        }
        Ok(EmbeddingMatrix { values })
    }

    pub fn zeros(rows: usize, dim: usize) -> Self {
        EmbeddingMatrix { values: DMatrix::zeros(rows, dim) }
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.values
    }

    /// Row `v` as a plain vector.
    pub fn row(&self, v: usize) -> Vec<f64> {
        self.values.row(v).iter().copied().collect()
    }

    pub fn same_shape(&self, other: &EmbeddingMatrix) -> bool {
        self.rows() == other.rows() && self.dim() == other.dim()
    }

    /// Header `rows dim`, then one space-separated row per line.
    /// Floats print at full round-trip precision.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{} {}", self.rows(), self.dim())?;
        for i in 0..self.rows() {
            let line = format_floats(self.values.row(i).iter().copied());
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("float text is utf-8")
    }

    pub fn read_from(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "missing header".into() })?;
        let header = header?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse { line: 1, msg: format!("bad header {header:?}") })?;
        let [rows, dim] = dims[..] else {
            return Err(Error::Parse { line: 1, msg: format!("bad header {header:?}") });
        };
        let mut values = DMatrix::zeros(rows, dim);
        for i in 0..rows {
            let (lineno, line) = lines
                .next()
                .ok_or_else(|| Error::Parse { line: i + 2, msg: "unexpected end of file".into() })?;
            let row = parse_floats(&line?, lineno + 1, dim)?;
            for (j, x) in row.into_iter().enumerate() {
                values[(i, j)] = x;
            }
        }
        Self::from_matrix(values)
    }
}

pub(crate) fn format_floats(xs: impl Iterator<Item = f64>) -> String {
    let mut line = String::new();
    for (j, x) in xs.enumerate() {
        if j > 0 {
            line.push(' ');
        }
        line.push_str(&x.to_string());
    }
    line
}

pub(crate) fn parse_floats(line: &str, lineno: usize, expected: usize) -> Result<Vec<f64>> {
    let vals: Vec<f64> = line
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse { line: lineno, msg: format!("bad float in {line:?}") })?;
    if vals.len() != expected {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("expected {expected} values, found {}", vals.len()),
        });
    }
    if let Some(bad) = vals.iter().find(|x| !x.is_finite()) {
        return Err(Error::Parse { line: lineno, msg: format!("non-finite value {bad}") });
    }
    Ok(vals)
}
