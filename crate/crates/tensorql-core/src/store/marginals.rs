//! Marginal sum matrices maintained alongside a graph's tensor.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::cardinality::MarginalVector;
use crate::tensor::{Axis, BoolTensor3};

/// Sparse matrix of nonnegative counts, indexed both row- and column-major so
/// either kind of marginal vector comes out in support time. Row and column
/// norms (exact sums of squares) are cached lazily and dropped on update.
#[derive(Debug, Default)]
pub struct CountMatrix {
    rows: usize,
    cols: usize,
    by_row: BTreeMap<(usize, usize), u64>,
    by_col: BTreeMap<(usize, usize), u64>,
    norms: OnceLock<NormTables>,
}

#[derive(Debug)]
struct NormTables {
    row_sq: Vec<u128>,
    col_sq: Vec<u128>,
}

impl Clone for CountMatrix {
    fn clone(&self) -> Self {
        CountMatrix {
            rows: self.rows,
            cols: self.cols,
            by_row: self.by_row.clone(),
            by_col: self.by_col.clone(),
            norms: OnceLock::new(),
        }
    }
}

impl CountMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        CountMatrix {
            rows,
            cols,
            ..Default::default()
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.by_row.len()
    }

    /// Sum of all entries.
    pub fn total(&self) -> u64 {
        self.by_row.values().sum()
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.by_row.get(&(row, col)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.by_row.iter().map(|(&k, &v)| (k, v))
    }

    pub(crate) fn grow_to(&mut self, rows: usize, cols: usize) {
        self.rows = self.rows.max(rows);
        self.cols = self.cols.max(cols);
        self.norms = OnceLock::new();
    }

    pub(crate) fn inc(&mut self, row: usize, col: usize) {
        *self.by_row.entry((row, col)).or_insert(0) += 1;
        *self.by_col.entry((col, row)).or_insert(0) += 1;
        self.norms = OnceLock::new();
    }

    pub(crate) fn dec(&mut self, row: usize, col: usize) {
        if let Some(v) = self.by_row.get_mut(&(row, col)) {
            *v -= 1;
            if *v == 0 {
                self.by_row.remove(&(row, col));
                self.by_col.remove(&(col, row));
            } else {
                *self.by_col.get_mut(&(col, row)).expect("mirrored entry") -= 1;
            }
            self.norms = OnceLock::new();
        }
    }

    pub fn row_vector(&self, row: usize) -> MarginalVector {
        let entries = self
            .by_row
            .range((row, 0)..=(row, usize::MAX))
            .map(|(&(_, c), &v)| (c, v));
        MarginalVector::from_entries(self.cols, entries)
    }

    pub fn col_vector(&self, col: usize) -> MarginalVector {
        let entries = self
            .by_col
            .range((col, 0)..=(col, usize::MAX))
            .map(|(&(_, r), &v)| (r, v));
        MarginalVector::from_entries(self.rows, entries)
    }

    pub fn row_sums(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.rows];
        for (&(r, _), &v) in &self.by_row {
            out[r] += v;
        }
        out
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.cols];
        for (&(_, c), &v) in &self.by_row {
            out[c] += v;
        }
        out
    }

    fn norm_tables(&self) -> &NormTables {
        self.norms.get_or_init(|| {
            let mut row_sq = vec![0u128; self.rows];
            let mut col_sq = vec![0u128; self.cols];
            for (&(r, c), &v) in &self.by_row {
                let sq = v as u128 * v as u128;
                row_sq[r] += sq;
                col_sq[c] += sq;
            }
            NormTables { row_sq, col_sq }
        })
    }

    /// Exact squared l2 norm of a row; the float norm is its square root.
    pub fn row_norm_sq(&self, row: usize) -> u128 {
        self.norm_tables().row_sq.get(row).copied().unwrap_or(0)
    }

    pub fn col_norm_sq(&self, col: usize) -> u128 {
        self.norm_tables().col_sq.get(col).copied().unwrap_or(0)
    }

    pub fn row_norm(&self, row: usize) -> f64 {
        (self.row_norm_sq(row) as f64).sqrt()
    }

    pub fn col_norm(&self, col: usize) -> f64 {
        (self.col_norm_sq(col) as f64).sqrt()
    }
}

/// The three marginal sum matrices of an RDF tensor. Every triple contributes
/// exactly one count to each matrix, so their totals all equal the tensor's
/// nonzero count and their combined support never exceeds three times it.
///
/// - `p`: predicates x objects, summed over subjects
/// - `q`: subjects x objects, summed over predicates
/// - `r`: subjects x predicates, summed over objects
#[derive(Clone, Debug, Default)]
pub struct MarginalStats {
    p: CountMatrix,
    q: CountMatrix,
    r: CountMatrix,
}

impl MarginalStats {
    pub fn new(dims: (usize, usize, usize)) -> Self {
        MarginalStats {
            p: CountMatrix::new(dims.1, dims.2),
            q: CountMatrix::new(dims.0, dims.2),
            r: CountMatrix::new(dims.0, dims.1),
        }
    }

    pub fn from_tensor(tensor: &BoolTensor3) -> Self {
        let mut stats = MarginalStats::new(tensor.dims());
        for coord in tensor.iter() {
            stats.apply_add(coord);
        }
        stats
    }

    pub fn p(&self) -> &CountMatrix {
        &self.p
    }

    pub fn q(&self) -> &CountMatrix {
        &self.q
    }

    pub fn r(&self) -> &CountMatrix {
        &self.r
    }

    pub(crate) fn grow_to(&mut self, dims: (usize, usize, usize)) {
        self.p.grow_to(dims.1, dims.2);
        self.q.grow_to(dims.0, dims.2);
        self.r.grow_to(dims.0, dims.1);
    }

    pub(crate) fn apply_add(&mut self, (i, j, k): (usize, usize, usize)) {
        self.p.inc(j, k);
        self.q.inc(i, k);
        self.r.inc(i, j);
    }

    pub(crate) fn apply_remove(&mut self, (i, j, k): (usize, usize, usize)) {
        self.p.dec(j, k);
        self.q.dec(i, k);
        self.r.dec(i, j);
    }

    /// Totals of the three matrices; each must equal the tensor nonzero count.
    pub fn totals(&self) -> (u64, u64, u64) {
        (self.p.total(), self.q.total(), self.r.total())
    }

    /// Combined nonzero count of the three matrices.
    pub fn support(&self) -> usize {
        self.p.nnz() + self.q.nnz() + self.r.nnz()
    }

    /// Column-marginal vector, along `shared`, of the slice with `fixed` held
    /// at `index`. Each combination reads one row or column of one matrix.
    pub fn sigma_for_slice(&self, fixed: Axis, index: usize, shared: Axis) -> MarginalVector {
        match (fixed, shared) {
            (Axis::Mode2, Axis::Mode3) => self.p.row_vector(index),
            (Axis::Mode2, Axis::Mode1) => self.r.col_vector(index),
            (Axis::Mode1, Axis::Mode3) => self.q.row_vector(index),
            (Axis::Mode1, Axis::Mode2) => self.r.row_vector(index),
            (Axis::Mode3, Axis::Mode1) => self.q.col_vector(index),
            (Axis::Mode3, Axis::Mode2) => self.p.col_vector(index),
            _ => panic!("fixed and shared axes must differ"),
        }
    }

    /// Per-index totals along `shared` for a whole tensor (the marginals of
    /// its matricization on that mode).
    pub fn sigma_for_tensor(&self, shared: Axis) -> MarginalVector {
        let dense = match shared {
            Axis::Mode1 => self.q.row_sums(),
            Axis::Mode2 => self.p.row_sums(),
            Axis::Mode3 => self.p.col_sums(),
        };
        MarginalVector::from_dense(&dense)
    }
}
