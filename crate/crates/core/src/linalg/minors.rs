use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Row and column index sets of a square minor. Both lists are zero-based and
/// strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorSelector {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl MinorSelector {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::InvalidArgument(format!(
                "minor selector needs equal lengths, got {} rows and {} cols",
                rows.len(),
                cols.len()
            )));
        }
        for (name, list) in [("row", &rows), ("column", &cols)] {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "{name} indices must be strictly increasing: {list:?}"
                )));
            }
        }
        Ok(Self { rows, cols })
    }

    /// The last `k` rows of an `n x n` matrix together with the given columns.
    pub fn bottom_rows(n: usize, cols: Vec<usize>) -> Result<Self> {
        let k = cols.len();
        if k > n {
            return Err(Error::InvalidArgument(format!("{k} columns for {n} rows")));
        }
        Self::new((n - k..n).collect(), cols)
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    fn check_bounds(&self, m: &ComplexMatrix) -> Result<()> {
        let row_ok = self.rows.last().map_or(true, |&r| r < m.rows());
        let col_ok = self.cols.last().map_or(true, |&c| c < m.cols());
        if row_ok && col_ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "selector {:?}/{:?} out of bounds for a {}x{} matrix",
                self.rows,
                self.cols,
                m.rows(),
                m.cols()
            )))
        }
    }
}

/// Determinant by partially pivoted LU.
pub fn determinant(m: &ComplexMatrix) -> Result<C64> {
    m.ensure_square("determinant argument")?;
    if m.rows() == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    Ok(m.as_nalgebra().clone().determinant())
}

/// Determinant of the trailing `k x k` block.
pub fn bottom_right_minor(m: &ComplexMatrix, k: usize) -> Result<C64> {
    let n = m.ensure_square("matrix")?;
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "minor order {k} outside 1..={n}"
        )));
    }
    let idx: Vec<usize> = (n - k..n).collect();
    determinant(&m.select(&idx, &idx))
}

pub fn general_minor(m: &ComplexMatrix, sel: &MinorSelector) -> Result<C64> {
    sel.check_bounds(m)?;
    determinant(&m.select(sel.rows(), sel.cols()))
}

/// All `k`-element subsets of `0..n` as strictly increasing lists, in
/// lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // Rightmost position that can still advance.
        let Some(pos) = (0..k).rev().find(|&i| current[i] < n - k + i) else {
            return out;
        };
        current[pos] += 1;
        for i in pos + 1..k {
            current[i] = current[i - 1] + 1;
        }
    }
}
