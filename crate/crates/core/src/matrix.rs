use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix dimension must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("declared dimension {declared} but found {rows} rows")]
    RowCount { declared: usize, rows: usize },
    #[error("row {row} has {len} entries, expected {n}")]
    RaggedRow { row: usize, len: usize, n: usize },
    #[error("invalid matrix JSON: {0}")]
    Json(String),
}

/// Square matrix of nonnegative integers, stored row-major.
///
/// `entry(i, j)` is the number of occurrences of letter `i` in the image of
/// letter `j` when the matrix is the abelianization of a substitution.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<u64>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n < 2 {
            return Err(MatrixError::TooSmall(n));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(MatrixError::RaggedRow {
                    row,
                    len: r.len(),
                    n,
                });
            }
            entries.extend(r);
        }
        Ok(Self { n, entries })
    }

    /// Builds a matrix from a row-major slice of length `n * n`.
    pub fn from_flat(n: usize, entries: Vec<u64>) -> Result<Self, MatrixError> {
        if n < 2 {
            return Err(MatrixError::TooSmall(n));
        }
        if entries.len() != n * n {
            return Err(MatrixError::RowCount {
                declared: n,
                rows: entries.len() / n.max(1),
            });
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Result<Self, MatrixError> {
        Self::from_fn(n, |i, j| u64::from(i == j))
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> u64) -> Result<Self, MatrixError> {
        if n < 2 {
            return Err(MatrixError::TooSmall(n));
        }
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Ok(Self { n, entries })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn as_flat(&self) -> &[u64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.entries.chunks_exact(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.rows().map(<[u64]>::to_vec).collect()
    }

    pub fn column_sum(&self, j: usize) -> u64 {
        (0..self.n).map(|i| self.entry(i, j)).sum()
    }

    pub fn trace(&self) -> u128 {
        (0..self.n).map(|i| u128::from(self.entry(i, i))).sum()
    }

    pub fn is_binary(&self) -> bool {
        self.entries.iter().all(|&e| e <= 1)
    }

    /// Parses the `{"n": .., "rows": [[..]]}` document.
    pub fn from_json(text: &str) -> Result<Self, MatrixError> {
        let doc: MatrixJson =
            serde_json::from_str(text).map_err(|e| MatrixError::Json(e.to_string()))?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixJson::from(self)).expect("matrix serializes")
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Wire form of an [`IntMatrix`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub rows: Vec<Vec<u64>>,
}

impl From<&IntMatrix> for MatrixJson {
    fn from(m: &IntMatrix) -> Self {
        Self {
            n: m.n,
            rows: m.to_rows(),
        }
    }
}

impl TryFrom<MatrixJson> for IntMatrix {
    type Error = MatrixError;

    fn try_from(doc: MatrixJson) -> Result<Self, MatrixError> {
        if doc.rows.len() != doc.n {
            return Err(MatrixError::RowCount {
                declared: doc.n,
                rows: doc.rows.len(),
            });
        }
        IntMatrix::from_rows(doc.rows)
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        MatrixJson::deserialize(d)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}
