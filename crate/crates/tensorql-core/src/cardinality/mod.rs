//! Exact counts, bounds and expectation estimators for join result sizes,
//! plus a k-minimum-values sketch for distinct counts.
//!
//! A join that evaluates as a Khatri-Rao product has an exactly computable
//! result size: the inner product of the two column-marginal vectors. The
//! estimators here work entirely on such marginal vectors (rows or columns of
//! the per-graph marginal sum matrices), so they never touch the tensors.

mod kmv;

pub use kmv::{KmvSketch, DEFAULT_KMV_SEED};

use crate::error::{Error, Result};

/// Sparse vector of nonnegative counts with its exact sum of squares cached.
///
/// The squared norm is kept as an exact integer beside the derived float so
/// bounds computed from it can be rounded up without ever dipping below the
/// true value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalVector {
    dim: usize,
    entries: Vec<(usize, u64)>,
    sum_sq: u128,
}

impl MarginalVector {
    pub fn zeros(dim: usize) -> Self {
        MarginalVector {
            dim,
            entries: Vec::new(),
            sum_sq: 0,
        }
    }

    pub fn from_dense(values: &[u64]) -> Self {
        let entries: Vec<(usize, u64)> = values
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v > 0)
            .map(|(i, &v)| (i, v))
            .collect();
        Self::from_entries(values.len(), entries)
    }

    /// `entries` must not contain duplicate indices; zero counts are dropped.
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (usize, u64)>) -> Self {
        let mut entries: Vec<(usize, u64)> = entries.into_iter().filter(|&(_, v)| v > 0).collect();
        entries.sort_unstable();
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.last().is_none_or(|&(i, _)| i < dim));
        let sum_sq = entries
            .iter()
            .map(|&(_, v)| (v as u128) * (v as u128))
            .sum();
        MarginalVector {
            dim,
            entries,
            sum_sq,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of nonzero counts (the alpha/beta of the merge cost contract).
    pub fn support(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, u64)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> u64 {
        match self.entries.binary_search_by_key(&index, |e| e.0) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0,
        }
    }

    pub fn sum(&self) -> u128 {
        self.entries.iter().map(|&(_, v)| v as u128).sum()
    }

    pub fn norm_sq(&self) -> u128 {
        self.sum_sq
    }

    pub fn norm(&self) -> f64 {
        (self.sum_sq as f64).sqrt()
    }

    pub fn to_dense(&self) -> Vec<u64> {
        let mut out = vec![0; self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    /// Maps every index through `map` into a vector of dimension `new_dim`.
    /// The map must be injective on this vector's support.
    pub fn remap(&self, new_dim: usize, map: &[usize]) -> MarginalVector {
        let entries: Vec<(usize, u64)> = self.entries.iter().map(|&(i, v)| (map[i], v)).collect();
        MarginalVector::from_entries(new_dim, entries)
    }

    fn check_len(&self, other: &MarginalVector) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::shape(format!(
                "marginal vector lengths differ: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

/// What an estimate claims about the true count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateKind {
    Exact,
    LowerBound,
    UpperBound,
    Expectation,
}

impl std::fmt::Display for EstimateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimateKind::Exact => write!(f, "exact"),
            EstimateKind::LowerBound => write!(f, "lower bound"),
            EstimateKind::UpperBound => write!(f, "upper bound"),
            EstimateKind::Expectation => write!(f, "expectation"),
        }
    }
}

/// A single cardinality figure together with the number of marginal entries
/// touched to produce it.
#[derive(Clone, Debug, PartialEq)]
pub struct CardEstimate {
    pub kind: EstimateKind,
    pub value: f64,
    pub cost: usize,
}

impl CardEstimate {
    fn exact(value: u128, cost: usize) -> Self {
        CardEstimate {
            kind: EstimateKind::Exact,
            value: value as f64,
            cost,
        }
    }
}

/// Exact nonzero count of the Khatri-Rao product of two matrices with these
/// column marginals: the inner product of the marginal vectors. Runs in time
/// proportional to the two supports, touching nonzero entries only.
pub fn exact_kr_nnz(sa: &MarginalVector, sb: &MarginalVector) -> Result<CardEstimate> {
    let (value, cost) = merge_products(sa, sb)?;
    Ok(CardEstimate::exact(value, cost))
}

fn merge_products(sa: &MarginalVector, sb: &MarginalVector) -> Result<(u128, usize)> {
    sa.check_len(sb)?;
    let (a, b) = (sa.entries(), sb.entries());
    let (mut i, mut j) = (0, 0);
    let mut sum: u128 = 0;
    let mut cost = 0;
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                sum += a[i].1 as u128 * b[j].1 as u128;
                cost += 1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok((sum, cost))
}

/// Number of indices where both marginal vectors are nonzero. This is the
/// result size of a DISTINCT query that projects only the bound variable
/// (the nonzero columns of the Khatri-Rao product), again in support time.
pub fn support_intersection(sa: &MarginalVector, sb: &MarginalVector) -> Result<CardEstimate> {
    sa.check_len(sb)?;
    let (a, b) = (sa.entries(), sb.entries());
    let (mut i, mut j) = (0, 0);
    let mut count: u128 = 0;
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok(CardEstimate::exact(count, count as usize))
}

/// Sum of the kept side's marginals over the indices where the other side is
/// nonzero: the result size of a DISTINCT query keeping one free variable.
pub fn masked_sum(kept: &MarginalVector, mask: &MarginalVector) -> Result<CardEstimate> {
    kept.check_len(mask)?;
    let mut sum: u128 = 0;
    let mut cost = 0;
    for &(i, v) in kept.entries() {
        if mask.get(i) > 0 {
            sum += v as u128;
            cost += 1;
        }
    }
    Ok(CardEstimate::exact(sum, cost))
}

/// Cosine upper bound on the Khatri-Rao nonzero count: the product of the two
/// marginal norms. Constant time given cached norms; computed from the exact
/// sums of squares and rounded up so it never falls below the true count.
pub fn kr_upper_cosine(sa: &MarginalVector, sb: &MarginalVector) -> Result<CardEstimate> {
    sa.check_len(sb)?;
    let bound = ceil_sqrt(sa.norm_sq().saturating_mul(sb.norm_sq()));
    Ok(CardEstimate {
        kind: EstimateKind::UpperBound,
        value: bound as f64,
        cost: 0,
    })
}

/// Integer ceiling of the square root.
fn ceil_sqrt(x: u128) -> u128 {
    if x == 0 {
        return 0;
    }
    let mut r = (x as f64).sqrt() as u128;
    while r.saturating_mul(r) > x {
        r -= 1;
    }
    while r.saturating_mul(r) < x {
        r += 1;
    }
    r
}

/// Sandwich bounds for the number of distinct nonzero positions left after
/// OR-ing the Khatri-Rao columns together: the largest single column product
/// from below, the sum of column products from above.
pub fn bool_product_bounds(
    sa: &MarginalVector,
    sb: &MarginalVector,
) -> Result<(CardEstimate, CardEstimate)> {
    let (sum, cost) = merge_products(sa, sb)?;
    let (a, b) = (sa.entries(), sb.entries());
    let (mut i, mut j) = (0, 0);
    let mut max: u128 = 0;
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                max = max.max(a[i].1 as u128 * b[j].1 as u128);
                i += 1;
                j += 1;
            }
        }
    }
    Ok((
        CardEstimate {
            kind: EstimateKind::LowerBound,
            value: max as f64,
            cost,
        },
        CardEstimate {
            kind: EstimateKind::UpperBound,
            value: sum as f64,
            cost,
        },
    ))
}

/// Per-entry fill probability of a Boolean product of an `m x k` and a
/// `k x n` matrix whose nonzeros are placed independently with densities
/// `p_a` and `p_b`: `1 - (1 - p_a * p_b)^k`. Multiply by the output shape
/// for the expected nonzero count.
pub fn expected_density_uniform(p_a: f64, p_b: f64, k: usize) -> Result<f64> {
    for p in [p_a, p_b] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::eval(format!("density {p} outside [0, 1]")));
        }
    }
    Ok(1.0 - (1.0 - p_a * p_b).powi(k as i32))
}

/// Which closed form to use for the rank-1 expectation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Rank1Form {
    /// `1 - prod_i (1 - pa_i * pb_i)`: the form the independence assumption
    /// yields; reduces to [`expected_density_uniform`] for constant densities.
    #[default]
    Complement,
    /// `1 - prod_i pa_i * pb_i`: kept selectable for comparison.
    Product,
}

/// Per-entry fill probability of a Boolean product seen as an OR of `k`
/// rank-1 matrices with per-component densities.
pub fn expected_density_rank1(p_a: &[f64], p_b: &[f64], form: Rank1Form) -> Result<f64> {
    if p_a.len() != p_b.len() {
        return Err(Error::shape(format!(
            "density lists differ in length: {} vs {}",
            p_a.len(),
            p_b.len()
        )));
    }
    for p in p_a.iter().chain(p_b) {
        if !(0.0..=1.0).contains(p) {
            return Err(Error::eval(format!("density {p} outside [0, 1]")));
        }
    }
    let prod: f64 = match form {
        Rank1Form::Complement => p_a
            .iter()
            .zip(p_b)
            .map(|(&pa, &pb)| 1.0 - pa * pb)
            .product(),
        Rank1Form::Product => p_a.iter().zip(p_b).map(|(&pa, &pb)| pa * pb).product(),
    };
    Ok(1.0 - prod)
}

/// Marginal data for one side of a join, oriented so the shared dimension is
/// the marginal vector's index space and `free_len` is the other dimension.
#[derive(Clone, Debug)]
pub struct JoinSideStats {
    pub sigma: MarginalVector,
    pub free_len: usize,
}

/// Which estimator family applies to a plan step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JoinStatKind {
    /// Plain join evaluated as a Khatri-Rao product.
    KhatriRao,
    /// DISTINCT projecting only the shared variable.
    DistinctBound,
    /// DISTINCT keeping the shared variable and one side's free variable.
    DistinctMixed { keep_left: bool },
    /// DISTINCT projecting the two free variables (Boolean matrix product).
    DistinctPair,
}

/// Everything the estimators can say about one join step.
#[derive(Clone, Debug, Default)]
pub struct CardBundle {
    pub exact: Option<CardEstimate>,
    pub cosine_upper: Option<CardEstimate>,
    pub lower: Option<CardEstimate>,
    pub upper: Option<CardEstimate>,
    pub expected_uniform: Option<CardEstimate>,
    pub expected_rank1: Option<CardEstimate>,
}

/// Assembles the estimate bundle for one join step from the two sides'
/// marginal statistics.
pub fn estimate_join(
    kind: JoinStatKind,
    left: &JoinSideStats,
    right: &JoinSideStats,
) -> Result<CardBundle> {
    let mut bundle = CardBundle::default();
    match kind {
        JoinStatKind::KhatriRao => {
            bundle.exact = Some(exact_kr_nnz(&left.sigma, &right.sigma)?);
            bundle.cosine_upper = Some(kr_upper_cosine(&left.sigma, &right.sigma)?);
        }
        JoinStatKind::DistinctBound => {
            bundle.exact = Some(support_intersection(&left.sigma, &right.sigma)?);
        }
        JoinStatKind::DistinctMixed { keep_left } => {
            bundle.exact = Some(if keep_left {
                masked_sum(&left.sigma, &right.sigma)?
            } else {
                masked_sum(&right.sigma, &left.sigma)?
            });
        }
        JoinStatKind::DistinctPair => {
            let (lower, upper) = bool_product_bounds(&left.sigma, &right.sigma)?;
            let cost = lower.cost;
            bundle.lower = Some(lower);
            bundle.upper = Some(upper);

            let n = left.sigma.dim();
            let cells_l = (left.free_len as u128) * (n as u128);
            let cells_r = (right.free_len as u128) * (n as u128);
            let out_cells = (left.free_len as f64) * (right.free_len as f64);
            if cells_l > 0 && cells_r > 0 {
                let p_a = left.sigma.sum() as f64 / cells_l as f64;
                let p_b = right.sigma.sum() as f64 / cells_r as f64;
                let fill = expected_density_uniform(p_a, p_b, n)?;
                bundle.expected_uniform = Some(CardEstimate {
                    kind: EstimateKind::Expectation,
                    value: out_cells * fill,
                    cost,
                });

                let pa_cols: Vec<f64> = sigma_densities(&left.sigma, left.free_len);
                let pb_cols: Vec<f64> = sigma_densities(&right.sigma, right.free_len);
                let fill = expected_density_rank1(&pa_cols, &pb_cols, Rank1Form::Complement)?;
                bundle.expected_rank1 = Some(CardEstimate {
                    kind: EstimateKind::Expectation,
                    value: out_cells * fill,
                    cost,
                });
            }
        }
    }
    Ok(bundle)
}

fn sigma_densities(sigma: &MarginalVector, free_len: usize) -> Vec<f64> {
    let denom = free_len.max(1) as f64;
    sigma
        .to_dense()
        .into_iter()
        .map(|v| (v as f64 / denom).min(1.0))
        .collect()
}
