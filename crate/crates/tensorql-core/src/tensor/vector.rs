use crate::error::{Error, Result};

use super::sparsity_of;

/// Sparse binary vector: a sorted set of indices below `dim`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoolVector {
    dim: usize,
    nz: Vec<usize>,
}

impl BoolVector {
    pub fn zeros(dim: usize) -> Self {
        BoolVector {
            dim,
            nz: Vec::new(),
        }
    }

    pub fn ones(dim: usize) -> Self {
        BoolVector {
            dim,
            nz: (0..dim).collect(),
        }
    }

    /// Builds a vector from arbitrary indices; duplicates collapse.
    pub fn from_indices(dim: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut nz: Vec<usize> = indices.into_iter().collect();
        nz.sort_unstable();
        nz.dedup();
        if let Some(&max) = nz.last() {
            if max >= dim {
                return Err(Error::IndexOutOfRange {
                    what: "vector",
                    index: max,
                    dim,
                });
            }
        }
        Ok(BoolVector { dim, nz })
    }

    /// Internal constructor for indices already sorted, deduplicated and in range.
    pub(crate) fn from_sorted(dim: usize, nz: Vec<usize>) -> Self {
        debug_assert!(nz.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(nz.last().is_none_or(|&m| m < dim));
        BoolVector { dim, nz }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.nz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nz.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.nz.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.nz.iter().copied()
    }

    pub fn indices(&self) -> &[usize] {
        &self.nz
    }

    pub fn density(&self) -> f64 {
        1.0 - self.sparsity()
    }

    pub fn sparsity(&self) -> f64 {
        sparsity_of(self.nz.len(), self.dim as u128)
    }

    pub fn and(&self, other: &BoolVector) -> Result<BoolVector> {
        self.check_dim(other)?;
        let nz = merge_and(&self.nz, &other.nz);
        Ok(BoolVector::from_sorted(self.dim, nz))
    }

    pub fn or(&self, other: &BoolVector) -> Result<BoolVector> {
        self.check_dim(other)?;
        let nz = merge_or(&self.nz, &other.nz);
        Ok(BoolVector::from_sorted(self.dim, nz))
    }

    pub fn and_not(&self, other: &BoolVector) -> Result<BoolVector> {
        self.check_dim(other)?;
        let nz = merge_and_not(&self.nz, &other.nz);
        Ok(BoolVector::from_sorted(self.dim, nz))
    }

    fn check_dim(&self, other: &BoolVector) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::shape(format!(
                "vector dimensions differ: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

pub(crate) fn merge_and<T: Ord + Copy>(a: &[T], b: &[T]) -> Vec<T> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub(crate) fn merge_or<T: Ord + Copy>(a: &[T], b: &[T]) -> Vec<T> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub(crate) fn merge_and_not<T: Ord + Copy>(a: &[T], b: &[T]) -> Vec<T> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_semantics() {
        let v = BoolVector::from_indices(5, [3, 1, 3, 1]).unwrap();
        assert_eq!(v.indices(), &[1, 3]);
        assert!(v.contains(3));
        assert!(!v.contains(0));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(BoolVector::from_indices(2, [2]).is_err());
    }

    #[test]
    fn elementwise_identities() {
        let v = BoolVector::from_indices(4, [0, 2]).unwrap();
        let z = BoolVector::zeros(4);
        assert_eq!(v.or(&z).unwrap(), v);
        assert_eq!(v.and(&v).unwrap(), v);
        assert_eq!(v.and_not(&v).unwrap(), z);
    }

    #[test]
    fn dim_mismatch() {
        let a = BoolVector::zeros(3);
        let b = BoolVector::zeros(4);
        assert!(a.and(&b).is_err());
    }
}
