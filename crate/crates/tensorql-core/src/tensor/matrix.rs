use crate::error::{Error, Result};

use super::vector::{merge_and, merge_and_not, merge_or};
use super::{checked_mul, sparsity_of, BoolVector};

/// Sparse binary matrix: a sorted set of `(row, col)` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    rows: usize,
    cols: usize,
    nz: Vec<(usize, usize)>,
}

impl BoolMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BoolMatrix {
            rows,
            cols,
            nz: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        BoolMatrix {
            rows: n,
            cols: n,
            nz: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        let mut nz = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                nz.push((r, c));
            }
        }
        BoolMatrix { rows, cols, nz }
    }

    /// Builds a matrix from arbitrary coordinates; duplicates collapse.
    pub fn from_coords(
        rows: usize,
        cols: usize,
        coords: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut nz: Vec<(usize, usize)> = coords.into_iter().collect();
        nz.sort_unstable();
        nz.dedup();
        for &(r, c) in &nz {
            if r >= rows {
                return Err(Error::IndexOutOfRange {
                    what: "row",
                    index: r,
                    dim: rows,
                });
            }
            if c >= cols {
                return Err(Error::IndexOutOfRange {
                    what: "column",
                    index: c,
                    dim: cols,
                });
            }
        }
        Ok(BoolMatrix { rows, cols, nz })
    }

    pub(crate) fn from_sorted(rows: usize, cols: usize, nz: Vec<(usize, usize)>) -> Self {
        debug_assert!(nz.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(nz.iter().all(|&(r, c)| r < rows && c < cols));
        BoolMatrix { rows, cols, nz }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.nz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nz.is_empty()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.nz.binary_search(&(row, col)).is_ok()
    }

    /// Nonzero coordinates in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nz.iter().copied()
    }

    pub fn coords(&self) -> &[(usize, usize)] {
        &self.nz
    }

    pub fn density(&self) -> f64 {
        1.0 - self.sparsity()
    }

    pub fn sparsity(&self) -> f64 {
        sparsity_of(self.nz.len(), self.rows as u128 * self.cols as u128)
    }

    pub fn transpose(&self) -> BoolMatrix {
        let mut nz: Vec<(usize, usize)> = self.nz.iter().map(|&(r, c)| (c, r)).collect();
        nz.sort_unstable();
        BoolMatrix::from_sorted(self.cols, self.rows, nz)
    }

    pub fn row(&self, r: usize) -> BoolVector {
        let start = self.nz.partition_point(|&(pr, _)| pr < r);
        let end = self.nz.partition_point(|&(pr, _)| pr <= r);
        BoolVector::from_sorted(
            self.cols,
            self.nz[start..end].iter().map(|&(_, c)| c).collect(),
        )
    }

    pub fn column(&self, c: usize) -> BoolVector {
        BoolVector::from_sorted(
            self.rows,
            self.nz
                .iter()
                .filter(|&&(_, pc)| pc == c)
                .map(|&(r, _)| r)
                .collect(),
        )
    }

    /// Number of nonzeros per column (the column marginals).
    pub fn column_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.cols];
        for &(_, c) in &self.nz {
            counts[c] += 1;
        }
        counts
    }

    /// Number of nonzeros per row.
    pub fn row_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.rows];
        for &(r, _) in &self.nz {
            counts[r] += 1;
        }
        counts
    }

    /// Indicator vector of columns that contain at least one nonzero.
    pub fn column_support(&self) -> BoolVector {
        let mut cols: Vec<usize> = self.nz.iter().map(|&(_, c)| c).collect();
        cols.sort_unstable();
        cols.dedup();
        BoolVector::from_sorted(self.cols, cols)
    }

    /// Indicator vector of rows that contain at least one nonzero.
    pub fn row_support(&self) -> BoolVector {
        let mut rows: Vec<usize> = self.nz.iter().map(|&(r, _)| r).collect();
        rows.dedup();
        BoolVector::from_sorted(self.rows, rows)
    }

    /// Keeps only the columns whose index is set in `mask`, zeroing the rest.
    pub fn mask_columns(&self, mask: &BoolVector) -> Result<BoolMatrix> {
        if mask.dim() != self.cols {
            return Err(Error::shape(format!(
                "column mask length {} does not match column count {}",
                mask.dim(),
                self.cols
            )));
        }
        let nz = self
            .nz
            .iter()
            .copied()
            .filter(|&(_, c)| mask.contains(c))
            .collect();
        Ok(BoolMatrix::from_sorted(self.rows, self.cols, nz))
    }

    /// Kronecker product: block matrix of all pairwise conjunctions. The
    /// result is `(rows_a * rows_b) x (cols_a * cols_b)` and entry
    /// `(i1 * rows_b + i2, j1 * cols_b + j2)` is `a[i1,j1] AND b[i2,j2]`.
    pub fn kronecker(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        let rows = checked_mul(self.rows, other.rows)?;
        let cols = checked_mul(self.cols, other.cols)?;
        checked_mul(self.nz.len().max(1), other.nz.len().max(1))?;
        let mut nz = Vec::with_capacity(self.nz.len() * other.nz.len());
        for &(r1, c1) in &self.nz {
            for &(r2, c2) in &other.nz {
                nz.push((r1 * other.rows + r2, c1 * other.cols + c2));
            }
        }
        nz.sort_unstable();
        Ok(BoolMatrix::from_sorted(rows, cols, nz))
    }

    /// Khatri-Rao product: column-wise Kronecker. Both matrices must have the
    /// same number of columns; column `c` of the result is the Kronecker
    /// product of column `c` of `self` with column `c` of `other`, with the
    /// left row index major: row `ra * rows_b + rb`.
    pub fn khatri_rao(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        if self.cols != other.cols {
            return Err(Error::shape(format!(
                "khatri-rao needs equal column counts: {} vs {}",
                self.cols, other.cols
            )));
        }
        let rows = checked_mul(self.rows, other.rows)?;
        let a_by_col = sort_col_major(&self.nz);
        let b_by_col = sort_col_major(&other.nz);
        let mut nz = Vec::new();
        let mut bi = 0;
        for (c, a_rows) in group_by_col(&a_by_col) {
            while bi < b_by_col.len() && b_by_col[bi].0 < c {
                bi += 1;
            }
            let b_start = bi;
            while bi < b_by_col.len() && b_by_col[bi].0 == c {
                bi += 1;
            }
            for ra in a_rows {
                for &(_, rb) in &b_by_col[b_start..bi] {
                    nz.push((ra * other.rows + rb, c));
                }
            }
        }
        nz.sort_unstable();
        Ok(BoolMatrix::from_sorted(rows, self.cols, nz))
    }

    /// Boolean matrix product: `(a o b)[i,j] = OR_k a[i,k] AND b[k,j]`.
    pub fn matmul(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "inner dimensions differ: {} vs {}",
                self.cols, other.rows
            )));
        }
        // rows of `other`, addressable by row index
        let mut b_rows: Vec<&[(usize, usize)]> = Vec::with_capacity(other.rows);
        let mut start = 0;
        for r in 0..other.rows {
            let end = other.nz.partition_point(|&(pr, _)| pr <= r);
            b_rows.push(&other.nz[start..end]);
            start = end;
        }
        let mut nz = Vec::new();
        let mut i = 0;
        while i < self.nz.len() {
            let row = self.nz[i].0;
            let mut out_cols: Vec<usize> = Vec::new();
            while i < self.nz.len() && self.nz[i].0 == row {
                let k = self.nz[i].1;
                out_cols.extend(b_rows[k].iter().map(|&(_, j)| j));
                i += 1;
            }
            out_cols.sort_unstable();
            out_cols.dedup();
            nz.extend(out_cols.into_iter().map(|j| (row, j)));
        }
        Ok(BoolMatrix::from_sorted(self.rows, other.cols, nz))
    }

    pub fn and(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        self.check_shape(other)?;
        Ok(BoolMatrix::from_sorted(
            self.rows,
            self.cols,
            merge_and(&self.nz, &other.nz),
        ))
    }

    pub fn or(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        self.check_shape(other)?;
        Ok(BoolMatrix::from_sorted(
            self.rows,
            self.cols,
            merge_or(&self.nz, &other.nz),
        ))
    }

    pub fn and_not(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        self.check_shape(other)?;
        Ok(BoolMatrix::from_sorted(
            self.rows,
            self.cols,
            merge_and_not(&self.nz, &other.nz),
        ))
    }

    fn check_shape(&self, other: &BoolMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::shape(format!(
                "matrix shapes differ: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

fn sort_col_major(nz: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = nz.iter().map(|&(r, c)| (c, r)).collect();
    v.sort_unstable();
    v
}

fn group_by_col(col_major: &[(usize, usize)]) -> Vec<(usize, Vec<usize>)> {
    let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
    for &(c, r) in col_major {
        match out.last_mut() {
            Some((lc, rows)) if *lc == c => rows.push(r),
            _ => out.push((c, vec![r])),
        }
    }
    out
}
