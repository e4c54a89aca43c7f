//! Online boolean matrix-vector multiplication for matrices whose rows have
//! the consecutive-ones property. Rows become intervals of column indices;
//! one product is an intersection query instead of n dot products.

use thiserror::Error;

use crate::index::IntervalTree;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OmvError {
    #[error("row {row}: ones are not consecutive")]
    NotConsecutiveOnes { row: usize },
    #[error("query vector: ones are not consecutive")]
    QueryNotConsecutive,
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0}")]
    BadFormat(String),
}

/// Dense 0/1 matrix, the naive path's input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    pub n: usize,
    pub rows: Vec<Vec<bool>>,
}

/// Compressed consecutive-ones matrix: per row the inclusive column range
/// holding 1s, or None for an all-zero row. Columns are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct C1Matrix {
    pub n: usize,
    pub rows: Vec<Option<(usize, usize)>>,
}

/// Query-ready form: row intervals in an interval tree tagged with row ids.
#[derive(Debug)]
pub struct C1Index {
    n: usize,
    tree: IntervalTree<()>,
}

/// Marker for a 0/1 line whose 1s are not one contiguous block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotConsecutive;

/// Inclusive range of the 1s in `bits`, or None if all zero; errors if the
/// 1s are not contiguous.
pub fn one_run(bits: &[bool]) -> Result<Option<(usize, usize)>, NotConsecutive> {
    let Some(first) = bits.iter().position(|&b| b) else { return Ok(None) };
    let last = bits.iter().rposition(|&b| b).unwrap();
    if bits[first..=last].iter().all(|&b| b) {
        Ok(Some((first, last)))
    } else {
        Err(NotConsecutive)
    }
}

fn parse_bit_line(line: &str, expected: usize) -> Result<Vec<bool>, OmvError> {
    if line.len() != expected {
        return Err(OmvError::DimensionMismatch { expected, got: line.len() });
    }
    line.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(OmvError::BadFormat(format!("invalid character {other:?} in 0/1 line"))),
        })
        .collect()
}

impl DenseMatrix {
    /// Format: first line n, then n lines of exactly n characters from {0,1}.
    pub fn parse(text: &str) -> Result<Self, OmvError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| OmvError::BadFormat("empty matrix file".into()))?;
        let n: usize = header
            .trim()
            .parse()
            .map_err(|_| OmvError::BadFormat(format!("bad dimension line {header:?}")))?;
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| OmvError::BadFormat(format!("expected {n} matrix rows")))?;
            rows.push(parse_bit_line(line, n)?);
        }
        Ok(DenseMatrix { n, rows })
    }
}

impl C1Matrix {
    pub fn parse(text: &str) -> Result<Self, OmvError> {
        Self::from_dense(&DenseMatrix::parse(text)?)
    }

    pub fn from_dense(m: &DenseMatrix) -> Result<Self, OmvError> {
        let rows = m
            .rows
            .iter()
            .enumerate()
            .map(|(row, bits)| one_run(bits).map_err(|_| OmvError::NotConsecutiveOnes { row }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(C1Matrix { n: m.n, rows })
    }
}

impl C1Index {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row intervals into the index; all-zero rows are simply absent.
    pub fn build(m: &C1Matrix) -> Self {
        let mut tree = IntervalTree::new();
        for (row, range) in m.rows.iter().enumerate() {
            if let Some((l, r)) = range {
                tree.insert(*l as i64, *r as i64, row as u64, ()).expect("row ids are distinct");
            }
        }
        C1Index { n: m.n, tree }
    }

    /// One online product: output bit i is 1 iff row i's interval intersects
    /// the query vector's 1-run.
    pub fn multiply(&self, v: &[bool]) -> Result<Vec<bool>, OmvError> {
        if v.len() != self.n {
            return Err(OmvError::DimensionMismatch { expected: self.n, got: v.len() });
        }
        let mut out = vec![false; self.n];
        let Some((p, q)) = one_run(v).map_err(|_| OmvError::QueryNotConsecutive)? else {
            return Ok(out);
        };
        for hit in self.tree.overlapping(p as i64, q as i64).expect("p <= q") {
            out[hit.id as usize] = true;
        }
        Ok(out)
    }
}

/// Plain boolean matrix-vector product over the AND/OR semiring; works for
/// any 0/1 matrix.
pub fn naive_multiply(m: &DenseMatrix, v: &[bool]) -> Result<Vec<bool>, OmvError> {
    if v.len() != m.n {
        return Err(OmvError::DimensionMismatch { expected: m.n, got: v.len() });
    }
    Ok(m.rows
        .iter()
        .map(|row| row.iter().zip(v).fold(false, |acc, (&a, &b)| acc | (a & b)))
        .collect())
}

pub fn parse_vector(line: &str, n: usize) -> Result<Vec<bool>, OmvError> {
    parse_bit_line(line, n)
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
