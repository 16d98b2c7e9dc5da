//! Sparse Boolean vectors, matrices and 3-way tensors.
//!
//! Every structure stores its nonzero coordinates as a sorted, deduplicated
//! list. All products of binary inputs stay binary: results are coordinate
//! sets, never counts. Dimension products are computed with overflow checks.

mod matrix;
mod tensor3;
mod vector;

pub use matrix::BoolMatrix;
pub use tensor3::{outer3, BoolTensor3, ColumnDecoder};
pub use vector::BoolVector;

use crate::error::{Error, Result};

/// One of the three modes of a 3-way tensor. For RDF tensors mode 1 indexes
/// subjects, mode 2 predicates and mode 3 objects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    Mode1,
    Mode2,
    Mode3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Mode1, Axis::Mode2, Axis::Mode3];

    pub fn index(self) -> usize {
        match self {
            Axis::Mode1 => 0,
            Axis::Mode2 => 1,
            Axis::Mode3 => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Axis::ALL.get(i).copied()
    }

    /// The two remaining axes, in ascending mode order.
    pub fn others(self) -> (Axis, Axis) {
        match self {
            Axis::Mode1 => (Axis::Mode2, Axis::Mode3),
            Axis::Mode2 => (Axis::Mode1, Axis::Mode3),
            Axis::Mode3 => (Axis::Mode1, Axis::Mode2),
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Mode1 => write!(f, "mode1"),
            Axis::Mode2 => write!(f, "mode2"),
            Axis::Mode3 => write!(f, "mode3"),
        }
    }
}

pub(crate) fn checked_mul(a: usize, b: usize) -> Result<usize> {
    a.checked_mul(b).ok_or(Error::DimensionOverflow)
}

/// Sparsity of a structure with `nnz` nonzeros out of `cells` cells:
/// `1 - nnz / cells`. A structure with no cells is fully sparse.
pub(crate) fn sparsity_of(nnz: usize, cells: u128) -> f64 {
    if cells == 0 {
        1.0
    } else {
        1.0 - nnz as f64 / cells as f64
    }
}
