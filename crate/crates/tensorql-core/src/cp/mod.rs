//! Boolean CP decomposition: a binary tensor as an OR of rank-1 tensors,
//! each the outer product of one column from each of three binary factor
//! matrices.
//!
//! Exact minimal decompositions are NP-hard, so this module provides the
//! always-available unfolding construction, a greedy cover heuristic,
//! reduction to irreducible form, and verification of the sparsity bounds
//! that make the factorized format a sensible storage choice.

mod greedy;
mod io;

pub use greedy::{greedy_cp, GreedyOptions};
pub use io::{export_factors, import_factors};

use crate::error::{Error, Result};
use crate::tensor::{outer3, Axis, BoolMatrix, BoolTensor3, BoolVector};

/// Three binary factor matrices of shared column count (the rank).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpFactors {
    pub a: BoolMatrix,
    pub b: BoolMatrix,
    pub c: BoolMatrix,
}

impl CpFactors {
    pub fn new(a: BoolMatrix, b: BoolMatrix, c: BoolMatrix) -> Result<Self> {
        if a.cols() != b.cols() || b.cols() != c.cols() {
            return Err(Error::shape(format!(
                "factor ranks differ: {} / {} / {}",
                a.cols(),
                b.cols(),
                c.cols()
            )));
        }
        Ok(CpFactors { a, b, c })
    }

    pub fn rank(&self) -> usize {
        self.a.cols()
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.a.rows(), self.b.rows(), self.c.rows())
    }

    pub fn nnz(&self) -> usize {
        self.a.nnz() + self.b.nnz() + self.c.nnz()
    }

    /// The rank-1 tensor of component `i`.
    pub fn component(&self, i: usize) -> BoolTensor3 {
        outer3(&self.a.column(i), &self.b.column(i), &self.c.column(i))
    }

    /// Factors with the listed components removed.
    pub fn without_components(&self, drop: &[usize]) -> CpFactors {
        let keep: Vec<usize> = (0..self.rank()).filter(|i| !drop.contains(i)).collect();
        let pick = |m: &BoolMatrix| {
            let mut nz = Vec::new();
            for (new_c, &old_c) in keep.iter().enumerate() {
                for r in m.column(old_c).iter() {
                    nz.push((r, new_c));
                }
            }
            BoolMatrix::from_coords(m.rows(), keep.len(), nz).expect("column subset stays valid")
        };
        CpFactors {
            a: pick(&self.a),
            b: pick(&self.b),
            c: pick(&self.c),
        }
    }
}

/// What a decomposition looks like against its target tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompReport {
    pub exact: bool,
    pub rank: usize,
    pub rank_upper_bound: usize,
    pub factor_nnz: usize,
    pub sparsity_a: f64,
    pub sparsity_b: f64,
    pub sparsity_c: f64,
    pub sparsity_t: f64,
    /// `|A| + |B| + |C| <= 3 |T|`
    pub absolute_bound_holds: bool,
    /// `s(A) + s(B) + s(C) >= s(T)`
    pub relative_bound_holds: bool,
    pub irreducible: bool,
}

/// OR of the factor columns' rank-1 tensors.
pub fn reconstruct(factors: &CpFactors) -> BoolTensor3 {
    let mut coords = Vec::new();
    for i in 0..factors.rank() {
        coords.extend(factors.component(i).iter());
    }
    BoolTensor3::from_coords(factors.dims(), coords).expect("component coords in range")
}

/// Largest rank the unfolding construction ever needs.
pub fn rank_upper_bound(dims: (usize, usize, usize)) -> usize {
    let (n, m, l) = dims;
    (n * m).min(n * l).min(m * l)
}

/// Checks the three unfolding identities of an exact decomposition: the
/// mode-1 unfolding equals `A o (C kr B)^T`, and cyclically for the others.
/// All three hold exactly when the factors reconstruct the tensor.
pub fn unfold_identity_check(factors: &CpFactors, tensor: &BoolTensor3) -> Result<[bool; 3]> {
    if factors.dims() != tensor.dims() {
        return Err(Error::shape(format!(
            "factor dims {:?} do not match tensor dims {:?}",
            factors.dims(),
            tensor.dims()
        )));
    }
    let check = |mode: Axis, head: &BoolMatrix, x: &BoolMatrix, y: &BoolMatrix| -> Result<bool> {
        let (unfolded, _) = tensor.matricize(mode)?;
        let rhs = head.matmul(&x.khatri_rao(y)?.transpose())?;
        Ok(unfolded == rhs)
    };
    Ok([
        check(Axis::Mode1, &factors.a, &factors.c, &factors.b)?,
        check(Axis::Mode2, &factors.b, &factors.c, &factors.a)?,
        check(Axis::Mode3, &factors.c, &factors.b, &factors.a)?,
    ])
}

/// Exact decomposition at the rank upper bound: unfold along the mode with
/// the fewest fibre columns, take the unfolding as one factor, and give the
/// other two factors one nonzero per column so their Khatri-Rao product is
/// the identity. Column `c` of that product is the `c`-th standard basis
/// vector, so the head factor passes through unchanged.
pub fn naive_decomposition(tensor: &BoolTensor3) -> Result<CpFactors> {
    let (n, m, l) = tensor.dims();
    let candidates = [
        (Axis::Mode1, m * l),
        (Axis::Mode2, n * l),
        (Axis::Mode3, n * m),
    ];
    let (mode, rank) = candidates
        .into_iter()
        .min_by_key(|&(_, cols)| cols)
        .expect("three candidates");
    let (head, _) = tensor.matricize(mode)?;
    debug_assert_eq!(head.cols(), rank);

    // identity Khatri-Rao pair: column c gets a single 1 in each factor so
    // that (later kr earlier) column c = e_c
    let (earlier_axis, later_axis) = mode.others();
    let earlier_dim = tensor.dim(earlier_axis);
    let later_dim = tensor.dim(later_axis);
    let mut earlier_nz = Vec::with_capacity(rank);
    let mut later_nz = Vec::with_capacity(rank);
    for c in 0..rank {
        earlier_nz.push((c % earlier_dim.max(1), c));
        later_nz.push((c / earlier_dim.max(1), c));
    }
    let earlier = BoolMatrix::from_coords(earlier_dim, rank, earlier_nz)?;
    let later = BoolMatrix::from_coords(later_dim, rank, later_nz)?;

    let factors = match mode {
        Axis::Mode1 => CpFactors::new(head, earlier, later),
        Axis::Mode2 => CpFactors::new(earlier, head, later),
        Axis::Mode3 => CpFactors::new(earlier, later, head),
    }?;
    debug_assert_eq!(factors.rank(), rank);
    Ok(factors)
}

/// Drops components whose removal leaves the reconstruction unchanged until
/// none remains. Requires an exact decomposition and keeps it exact. The
/// residual sparsity chain is checked on the way out: once irreducible,
/// removing each component's cover from the remaining tensor must strictly
/// increase sparsity.
pub fn reduce_to_irreducible(factors: &CpFactors, tensor: &BoolTensor3) -> Result<CpFactors> {
    if &reconstruct(factors) != tensor {
        return Err(Error::eval(
            "reduce requires an exact decomposition".to_string(),
        ));
    }
    // cover counts per cell
    let mut cover: std::collections::BTreeMap<(usize, usize, usize), u32> =
        std::collections::BTreeMap::new();
    let components: Vec<BoolTensor3> = (0..factors.rank()).map(|i| factors.component(i)).collect();
    for comp in &components {
        for coord in comp.iter() {
            *cover.entry(coord).or_insert(0) += 1;
        }
    }
    let mut alive: Vec<bool> = vec![true; factors.rank()];
    loop {
        let mut dropped_any = false;
        for i in 0..components.len() {
            if !alive[i] {
                continue;
            }
            let removable = components[i]
                .iter()
                .all(|coord| cover.get(&coord).copied().unwrap_or(0) >= 2)
                || components[i].is_empty();
            if removable {
                alive[i] = false;
                dropped_any = true;
                for coord in components[i].iter() {
                    *cover.get_mut(&coord).expect("covered cell") -= 1;
                }
            }
        }
        if !dropped_any {
            break;
        }
    }
    let drop: Vec<usize> = (0..factors.rank()).filter(|&i| !alive[i]).collect();
    let reduced = factors.without_components(&drop);
    debug_assert_eq!(&reconstruct(&reduced), tensor);
    assert!(
        residual_sparsity_strictly_increases(&reduced, tensor),
        "irreducible decomposition must strictly shrink the residual per component"
    );
    Ok(reduced)
}

/// Residual chain: start from the tensor and strip one component's cover at
/// a time; each step of an irreducible decomposition removes at least one
/// remaining nonzero.
fn residual_sparsity_strictly_increases(factors: &CpFactors, tensor: &BoolTensor3) -> bool {
    let mut residual = tensor.clone();
    for i in 1..factors.rank() {
        let next = residual.and_not(&factors.component(i)).expect("same dims");
        if next.nnz() == residual.nnz() {
            return false;
        }
        residual = next;
    }
    true
}

/// True when no component can be dropped without changing the
/// reconstruction.
pub fn is_irreducible(factors: &CpFactors, tensor: &BoolTensor3) -> bool {
    let full = reconstruct(factors);
    if &full != tensor {
        // measured against the reconstruction, not the target
    }
    for i in 0..factors.rank() {
        let without = factors.without_components(&[i]);
        if reconstruct(&without) == full {
            return false;
        }
    }
    true
}

/// Sparsity and bound report for a decomposition against its target.
pub fn verify_sparsity(factors: &CpFactors, tensor: &BoolTensor3) -> DecompReport {
    let recon = reconstruct(factors);
    let exact = &recon == tensor;
    let (sa, sb, sc, st) = (
        factors.a.sparsity(),
        factors.b.sparsity(),
        factors.c.sparsity(),
        tensor.sparsity(),
    );
    DecompReport {
        exact,
        rank: factors.rank(),
        rank_upper_bound: rank_upper_bound(tensor.dims()),
        factor_nnz: factors.nnz(),
        sparsity_a: sa,
        sparsity_b: sb,
        sparsity_c: sc,
        sparsity_t: st,
        absolute_bound_holds: factors.nnz() <= 3 * tensor.nnz(),
        relative_bound_holds: sa + sb + sc >= st,
        irreducible: is_irreducible(factors, tensor),
    }
}

/// Rank-1 helper used in tests and reports: a rank-1 tensor's nonzero count
/// is the product of its three factors' nonzero counts.
pub fn rank1_tensor(a: &BoolVector, b: &BoolVector, c: &BoolVector) -> BoolTensor3 {
    outer3(a, b, c)
}
