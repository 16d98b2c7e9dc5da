use crate::error::{Error, Result};

use super::vector::{merge_and, merge_and_not, merge_or};
use super::{checked_mul, sparsity_of, Axis, BoolMatrix, BoolVector};

/// Sparse binary 3-way tensor: a sorted set of `(i, j, k)` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoolTensor3 {
    dims: (usize, usize, usize),
    nz: Vec<(usize, usize, usize)>,
}

impl BoolTensor3 {
    pub fn zeros(dims: (usize, usize, usize)) -> Self {
        BoolTensor3 {
            dims,
            nz: Vec::new(),
        }
    }

    /// Builds a tensor from arbitrary coordinates; duplicates collapse.
    pub fn from_coords(
        dims: (usize, usize, usize),
        coords: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        let mut nz: Vec<(usize, usize, usize)> = coords.into_iter().collect();
        nz.sort_unstable();
        nz.dedup();
        for &(i, j, k) in &nz {
            for (what, index, dim) in [
                ("mode-1", i, dims.0),
                ("mode-2", j, dims.1),
                ("mode-3", k, dims.2),
            ] {
                if index >= dim {
                    return Err(Error::IndexOutOfRange { what, index, dim });
                }
            }
        }
        Ok(BoolTensor3 { dims, nz })
    }

    pub(crate) fn from_sorted(dims: (usize, usize, usize), nz: Vec<(usize, usize, usize)>) -> Self {
        debug_assert!(nz.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(nz
            .iter()
            .all(|&(i, j, k)| i < dims.0 && j < dims.1 && k < dims.2));
        BoolTensor3 { dims, nz }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn dim(&self, axis: Axis) -> usize {
        match axis {
            Axis::Mode1 => self.dims.0,
            Axis::Mode2 => self.dims.1,
            Axis::Mode3 => self.dims.2,
        }
    }

    pub fn nnz(&self) -> usize {
        self.nz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nz.is_empty()
    }

    pub fn contains(&self, coord: (usize, usize, usize)) -> bool {
        self.nz.binary_search(&coord).is_ok()
    }

    /// Nonzero coordinates in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.nz.iter().copied()
    }

    pub fn coords(&self) -> &[(usize, usize, usize)] {
        &self.nz
    }

    pub fn cells(&self) -> u128 {
        self.dims.0 as u128 * self.dims.1 as u128 * self.dims.2 as u128
    }

    pub fn density(&self) -> f64 {
        1.0 - self.sparsity()
    }

    pub fn sparsity(&self) -> f64 {
        sparsity_of(self.nz.len(), self.cells())
    }

    /// 2-D restriction with `axis` fixed at `index`. The remaining axes keep
    /// their mode order: slicing mode 2 yields rows = mode 1, cols = mode 3.
    pub fn slice(&self, axis: Axis, index: usize) -> Result<BoolMatrix> {
        if index >= self.dim(axis) {
            return Err(Error::IndexOutOfRange {
                what: "slice",
                index,
                dim: self.dim(axis),
            });
        }
        let (ra, ca) = axis.others();
        let mut nz = Vec::new();
        for &coord in &self.nz {
            if coord_at(coord, axis) == index {
                nz.push((coord_at(coord, ra), coord_at(coord, ca)));
            }
        }
        nz.sort_unstable();
        Ok(BoolMatrix::from_sorted(self.dim(ra), self.dim(ca), nz))
    }

    /// 1-D restriction with two distinct axes fixed.
    pub fn fibre(&self, fixed_a: (Axis, usize), fixed_b: (Axis, usize)) -> Result<BoolVector> {
        if fixed_a.0 == fixed_b.0 {
            return Err(Error::DuplicateAxis);
        }
        for (axis, index) in [fixed_a, fixed_b] {
            if index >= self.dim(axis) {
                return Err(Error::IndexOutOfRange {
                    what: "fibre",
                    index,
                    dim: self.dim(axis),
                });
            }
        }
        let free = Axis::ALL
            .into_iter()
            .find(|&a| a != fixed_a.0 && a != fixed_b.0)
            .unwrap();
        let nz: Vec<usize> = self
            .nz
            .iter()
            .filter(|&&c| {
                coord_at(c, fixed_a.0) == fixed_a.1 && coord_at(c, fixed_b.0) == fixed_b.1
            })
            .map(|&c| coord_at(c, free))
            .collect();
        Ok(BoolVector::from_indices(self.dim(free), nz).expect("fibre indices in range"))
    }

    /// Mode-`mode` matricization: the mode-`mode` fibres become the columns.
    /// Columns are ordered with the earlier-numbered free mode varying
    /// fastest, i.e. column index = later_index * earlier_dim + earlier_index.
    /// With this layout the unfolding of a factorized tensor satisfies the
    /// usual factor-matrix identities (see [`crate::cp`]).
    pub fn matricize(&self, mode: Axis) -> Result<(BoolMatrix, ColumnDecoder)> {
        let decoder = ColumnDecoder::new(mode, self.dims)?;
        let mut nz: Vec<(usize, usize)> = self
            .nz
            .iter()
            .map(|&coord| {
                let (ea, la) = mode.others();
                let col = decoder.encode(coord_at(coord, ea), coord_at(coord, la));
                (coord_at(coord, mode), col)
            })
            .collect();
        nz.sort_unstable();
        Ok((
            BoolMatrix::from_sorted(self.dim(mode), decoder.cols(), nz),
            decoder,
        ))
    }

    /// Grows dimensions in place; existing coordinates keep their meaning.
    pub(crate) fn grow_dims(&mut self, dims: (usize, usize, usize)) {
        self.dims = (
            self.dims.0.max(dims.0),
            self.dims.1.max(dims.1),
            self.dims.2.max(dims.2),
        );
    }

    /// Sets one cell; returns false if it was already set.
    pub(crate) fn insert(&mut self, coord: (usize, usize, usize)) -> bool {
        debug_assert!(coord.0 < self.dims.0 && coord.1 < self.dims.1 && coord.2 < self.dims.2);
        match self.nz.binary_search(&coord) {
            Ok(_) => false,
            Err(pos) => {
                self.nz.insert(pos, coord);
                true
            }
        }
    }

    /// Clears one cell; returns false if it was not set.
    pub(crate) fn remove(&mut self, coord: (usize, usize, usize)) -> bool {
        match self.nz.binary_search(&coord) {
            Ok(pos) => {
                self.nz.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn and(&self, other: &BoolTensor3) -> Result<BoolTensor3> {
        self.check_shape(other)?;
        Ok(BoolTensor3::from_sorted(
            self.dims,
            merge_and(&self.nz, &other.nz),
        ))
    }

    pub fn or(&self, other: &BoolTensor3) -> Result<BoolTensor3> {
        self.check_shape(other)?;
        Ok(BoolTensor3::from_sorted(
            self.dims,
            merge_or(&self.nz, &other.nz),
        ))
    }

    pub fn and_not(&self, other: &BoolTensor3) -> Result<BoolTensor3> {
        self.check_shape(other)?;
        Ok(BoolTensor3::from_sorted(
            self.dims,
            merge_and_not(&self.nz, &other.nz),
        ))
    }

    fn check_shape(&self, other: &BoolTensor3) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::shape(format!(
                "tensor shapes differ: {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }
}

fn coord_at(coord: (usize, usize, usize), axis: Axis) -> usize {
    match axis {
        Axis::Mode1 => coord.0,
        Axis::Mode2 => coord.1,
        Axis::Mode3 => coord.2,
    }
}

/// Rank-1 tensor: `x[i,j,k] = a[i] AND b[j] AND c[k]`.
pub fn outer3(a: &BoolVector, b: &BoolVector, c: &BoolVector) -> BoolTensor3 {
    let mut nz = Vec::with_capacity(a.nnz() * b.nnz() * c.nnz());
    for i in a.iter() {
        for j in b.iter() {
            for k in c.iter() {
                nz.push((i, j, k));
            }
        }
    }
    BoolTensor3::from_sorted((a.dim(), b.dim(), c.dim()), nz)
}

/// Maps column indices of a matricization back to the two free-mode indices.
#[derive(Clone, Copy, Debug)]
pub struct ColumnDecoder {
    mode: Axis,
    earlier_dim: usize,
    later_dim: usize,
}

impl ColumnDecoder {
    fn new(mode: Axis, dims: (usize, usize, usize)) -> Result<Self> {
        let (ea, la) = mode.others();
        let earlier_dim = match ea {
            Axis::Mode1 => dims.0,
            Axis::Mode2 => dims.1,
            Axis::Mode3 => dims.2,
        };
        let later_dim = match la {
            Axis::Mode1 => dims.0,
            Axis::Mode2 => dims.1,
            Axis::Mode3 => dims.2,
        };
        checked_mul(earlier_dim, later_dim)?;
        Ok(ColumnDecoder {
            mode,
            earlier_dim,
            later_dim,
        })
    }

    pub fn mode(&self) -> Axis {
        self.mode
    }

    pub fn cols(&self) -> usize {
        self.earlier_dim * self.later_dim
    }

    /// Free-mode indices for a column, as ((earlier axis, index), (later axis, index)).
    pub fn decode(&self, col: usize) -> ((Axis, usize), (Axis, usize)) {
        let (ea, la) = self.mode.others();
        ((ea, col % self.earlier_dim), (la, col / self.earlier_dim))
    }

    pub fn encode(&self, earlier_index: usize, later_index: usize) -> usize {
        later_index * self.earlier_dim + earlier_index
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(dim: usize, idx: &[usize]) -> BoolVector {
        BoolVector::from_indices(dim, idx.iter().copied()).unwrap()
    }

    #[test]
    fn outer3_zero_factor() {
        let t = outer3(&v(2, &[0]), &BoolVector::zeros(3), &v(2, &[1]));
        assert_eq!(t.nnz(), 0);
        assert_eq!(t.dims(), (2, 3, 2));
    }

    #[test]
    fn outer3_unit() {
        let one = v(1, &[0]);
        let t = outer3(&one, &one, &one);
        assert_eq!(t.dims(), (1, 1, 1));
        assert!(t.contains((0, 0, 0)));
    }

    #[test]
    fn outer3_enumerates_product() {
        let t = outer3(&v(2, &[0]), &v(2, &[0, 1]), &v(2, &[1]));
        assert_eq!(t.coords(), &[(0, 0, 1), (0, 1, 1)]);
    }

    #[test]
    fn slice_of_zero_and_rank1() {
        let z = BoolTensor3::zeros((2, 3, 4));
        assert_eq!(z.slice(Axis::Mode2, 1).unwrap(), BoolMatrix::zeros(2, 4));

        let (a, b, c) = (v(2, &[1]), v(3, &[0, 2]), v(4, &[3]));
        let t = outer3(&a, &b, &c);
        // slicing mode 2 at j: a (x) c^T masked by b[j]
        let hit = t.slice(Axis::Mode2, 2).unwrap();
        assert_eq!(hit, BoolMatrix::from_coords(2, 4, [(1, 3)]).unwrap());
        let miss = t.slice(Axis::Mode2, 1).unwrap();
        assert_eq!(miss.nnz(), 0);
    }

    #[test]
    fn slice_bounds() {
        let z = BoolTensor3::zeros((2, 3, 4));
        assert!(z.slice(Axis::Mode3, 4).is_err());
    }

    #[test]
    fn fibre_restriction() {
        let t = BoolTensor3::from_coords((2, 2, 3), [(0, 1, 0), (0, 1, 2), (1, 1, 2)]).unwrap();
        let f = t.fibre((Axis::Mode1, 0), (Axis::Mode2, 1)).unwrap();
        assert_eq!(f.indices(), &[0, 2]);
        assert!(t.fibre((Axis::Mode1, 0), (Axis::Mode1, 1)).is_err());
        assert!(t.fibre((Axis::Mode1, 0), (Axis::Mode3, 3)).is_err());
    }

    #[test]
    fn matricize_basics() {
        let z = BoolTensor3::zeros((2, 3, 4));
        let (m, _) = z.matricize(Axis::Mode1).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 12));
        assert_eq!(m.nnz(), 0);

        let one = outer3(&v(1, &[0]), &v(1, &[0]), &v(1, &[0]));
        let (m, _) = one.matricize(Axis::Mode3).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 1));
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn matricize_rank1_count_and_roundtrip() {
        let (a, b, c) = (v(3, &[0, 2]), v(2, &[1]), v(4, &[0, 1, 3]));
        let t = outer3(&a, &b, &c);
        for mode in Axis::ALL {
            let (m, dec) = t.matricize(mode).unwrap();
            assert_eq!(m.nnz(), a.nnz() * b.nnz() * c.nnz());
            // every nonzero decodes back to a coordinate of the tensor
            for (r, col) in m.iter() {
                let ((ea, ei), (la, li)) = dec.decode(col);
                let mut coord = [0usize; 3];
                coord[mode.index()] = r;
                coord[ea.index()] = ei;
                coord[la.index()] = li;
                assert!(t.contains((coord[0], coord[1], coord[2])));
                assert_eq!(dec.encode(ei, li), col);
            }
        }
    }

    #[test]
    fn sparsity_direct_formula() {
        let z = BoolTensor3::zeros((2, 2, 2));
        assert_eq!(z.sparsity(), 1.0);
        let t = BoolTensor3::from_coords((2, 2, 2), [(0, 0, 0), (1, 1, 1)]).unwrap();
        assert_eq!(t.sparsity(), 0.75);
        assert_eq!(t.density(), 0.25);
        let mut all = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    all.push((i, j, k));
                }
            }
        }
        let full = BoolTensor3::from_coords((2, 2, 2), all).unwrap();
        assert_eq!(full.sparsity(), 0.0);
    }

    #[test]
    fn elementwise_trivials() {
        let t = BoolTensor3::from_coords((2, 2, 2), [(0, 1, 0)]).unwrap();
        let z = BoolTensor3::zeros((2, 2, 2));
        assert_eq!(t.or(&z).unwrap(), t);
        assert_eq!(t.and(&t).unwrap(), t);
        assert_eq!(t.and_not(&t).unwrap(), z);
        assert!(t.and(&BoolTensor3::zeros((2, 2, 3))).is_err());
    }
}
