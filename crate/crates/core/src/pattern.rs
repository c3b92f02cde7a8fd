//! Zero/nonzero structure of a matrix.
//!
//! Indices are 0-based inside the library. Everything that talks to a user
//! (file formats, reports, vertex names) is 1-based.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A structured matrix: only the positions of the nonzero entries are known.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatternMatrix {
    n_rows: usize,
    n_cols: usize,
    nonzeros: BTreeSet<(usize, usize)>,
}

impl PatternMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            nonzeros: BTreeSet::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            nonzeros: (0..n).map(|i| (i, i)).collect(),
        }
    }

    /// Builds a pattern from 0-based `(row, col)` pairs. Duplicates collapse.
    pub fn new<I>(n_rows: usize, n_cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut p = Self::zeros(n_rows, n_cols);
        for (row, col) in entries {
            p.insert(row, col)?;
        }
        Ok(p)
    }

    /// Builds a pattern from 1-based `(row, col)` pairs as written in the
    /// literature and in pattern files.
    pub fn from_one_based<I>(n_rows: usize, n_cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut p = Self::zeros(n_rows, n_cols);
        for (row, col) in entries {
            if row == 0 || col == 0 {
                return Err(Error::EntryOutOfRange {
                    row,
                    col,
                    n_rows,
                    n_cols,
                });
            }
            p.insert(row - 1, col - 1)
                .map_err(|_| Error::EntryOutOfRange {
                    row,
                    col,
                    n_rows,
                    n_cols,
                })?;
        }
        Ok(p)
    }

    /// Marks `(row, col)` (0-based) as nonzero. Returns whether it was new.
    pub fn insert(&mut self, row: usize, col: usize) -> Result<bool> {
        if row >= self.n_rows || col >= self.n_cols {
            return Err(Error::EntryOutOfRange {
                row: row + 1,
                col: col + 1,
                n_rows: self.n_rows,
                n_cols: self.n_cols,
            });
        }
        Ok(self.nonzeros.insert((row, col)))
    }

    pub fn remove(&mut self, row: usize, col: usize) -> bool {
        self.nonzeros.remove(&(row, col))
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.nonzeros.len()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.nonzeros.contains(&(row, col))
    }

    /// Nonzeros in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nonzeros.iter().copied()
    }

    /// Column indices of the nonzeros in `row`.
    pub fn row(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        self.nonzeros.range((row, 0)..(row + 1, 0)).map(|&(_, c)| c)
    }

    /// `[self, other]`, side by side.
    pub fn hcat(&self, other: &PatternMatrix) -> Result<PatternMatrix> {
        if self.n_rows != other.n_rows {
            return Err(Error::DimensionMismatch {
                what: "horizontal concatenation needs equal row counts",
                a_rows: self.n_rows,
                a_cols: self.n_cols,
                b_rows: other.n_rows,
                b_cols: other.n_cols,
            });
        }
        let mut out = PatternMatrix::zeros(self.n_rows, self.n_cols + other.n_cols);
        out.nonzeros.extend(self.iter());
        out.nonzeros
            .extend(other.iter().map(|(r, c)| (r, c + self.n_cols)));
        Ok(out)
    }

    /// The submatrix on the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> PatternMatrix {
        let mut out = PatternMatrix::zeros(rows.len(), cols.len());
        for (new_r, &r) in rows.iter().enumerate() {
            for (new_c, &c) in cols.iter().enumerate() {
                if self.contains(r, c) {
                    out.nonzeros.insert((new_r, new_c));
                }
            }
        }
        out
    }
}

impl fmt::Display for PatternMatrix {
    /// Grid rendering with `*` for nonzeros, like the printed matrices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.n_rows {
            let line: Vec<&str> = (0..self.n_cols)
                .map(|c| if self.contains(r, c) { "*" } else { "0" })
                .collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Name of state vertex `i` (0-based): `x1`, `x2`, ...
pub fn state_name(i: usize) -> String {
    format!("x{}", i + 1)
}

/// Name of input vertex `j` (0-based): `u1`, `u2`, ...
pub fn input_name(j: usize) -> String {
    format!("u{}", j + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_based_entries_are_shifted() {
        let p = PatternMatrix::from_one_based(2, 3, [(1, 1), (2, 3)]).unwrap();
        assert!(p.contains(0, 0));
        assert!(p.contains(1, 2));
        assert_eq!(p.nnz(), 2);
    }

    #[test]
    fn out_of_range_reports_one_based_entry() {
        let err = PatternMatrix::from_one_based(5, 5, [(6, 1)]).unwrap_err();
        assert_eq!(
            err,
            Error::EntryOutOfRange {
                row: 6,
                col: 1,
                n_rows: 5,
                n_cols: 5
            }
        );
        assert!(PatternMatrix::from_one_based(2, 2, [(0, 1)]).is_err());
    }

    #[test]
    fn duplicates_collapse() {
        let p = PatternMatrix::new(2, 2, [(0, 1), (0, 1)]).unwrap();
        assert_eq!(p.nnz(), 1);
    }

    #[test]
    fn hcat_shifts_columns() {
        let a = PatternMatrix::identity(2);
        let b = PatternMatrix::new(2, 1, [(1, 0)]).unwrap();
        let ab = a.hcat(&b).unwrap();
        assert_eq!(ab.n_cols(), 3);
        assert!(ab.contains(1, 2));
        assert!(a.hcat(&PatternMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn row_iteration() {
        let p = PatternMatrix::new(3, 3, [(1, 0), (1, 2), (2, 2)]).unwrap();
        assert_eq!(p.row(1).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(p.row(0).count(), 0);
    }
}
