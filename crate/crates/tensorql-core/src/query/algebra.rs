//! Algebraic query results: a sparse Boolean payload whose axes decompose
//! into variable blocks.
//!
//! A Khatri-Rao join of two slices, for instance, yields a matrix whose rows
//! run over (left variable, right variable) block pairs and whose columns run
//! over the shared variable. The `axes` metadata records, per payload axis,
//! the ordered blocks (outermost first); decoding a nonzero coordinate yields
//! one full variable binding.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::store::{Dictionary, Term};
use crate::tensor::{BoolMatrix, BoolTensor3, BoolVector};

/// One variable's segment of a payload axis. When `with_unbound` is set the
/// block has one extra index past the dictionary; it decodes to an unbound
/// value (introduced only by OPTIONAL).
#[derive(Clone, Debug)]
pub struct AxisBlock {
    pub var: String,
    pub terms: Arc<Dictionary>,
    pub with_unbound: bool,
}

impl AxisBlock {
    pub fn new(var: impl Into<String>, terms: Arc<Dictionary>) -> Self {
        AxisBlock {
            var: var.into(),
            terms,
            with_unbound: false,
        }
    }

    pub fn size(&self) -> usize {
        self.terms.len() + usize::from(self.with_unbound)
    }

    /// Term for a block-local index; `None` is the unbound extra index.
    pub fn decode(&self, index: usize) -> Option<Term> {
        self.terms.term(index).cloned()
    }
}

#[derive(Clone, Debug)]
pub enum Payload {
    Vector(BoolVector),
    Matrix(BoolMatrix),
    Tensor(BoolTensor3),
}

impl Payload {
    pub fn ndim(&self) -> usize {
        match self {
            Payload::Vector(_) => 1,
            Payload::Matrix(_) => 2,
            Payload::Tensor(_) => 3,
        }
    }

    pub fn axis_len(&self, axis: usize) -> usize {
        match (self, axis) {
            (Payload::Vector(v), 0) => v.dim(),
            (Payload::Matrix(m), 0) => m.rows(),
            (Payload::Matrix(m), 1) => m.cols(),
            (Payload::Tensor(t), 0) => t.dims().0,
            (Payload::Tensor(t), 1) => t.dims().1,
            (Payload::Tensor(t), 2) => t.dims().2,
            _ => panic!("axis {axis} out of range"),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            Payload::Vector(v) => v.nnz(),
            Payload::Matrix(m) => m.nnz(),
            Payload::Tensor(t) => t.nnz(),
        }
    }

    /// Nonzero coordinates as per-axis index lists, in sorted payload order.
    pub fn coords(&self) -> Vec<Vec<usize>> {
        match self {
            Payload::Vector(v) => v.iter().map(|i| vec![i]).collect(),
            Payload::Matrix(m) => m.iter().map(|(r, c)| vec![r, c]).collect(),
            Payload::Tensor(t) => t.iter().map(|(i, j, k)| vec![i, j, k]).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AlgebraicResult {
    pub payload: Payload,
    pub axes: Vec<Vec<AxisBlock>>,
}

pub(crate) fn axis_size(blocks: &[AxisBlock]) -> usize {
    blocks.iter().map(AxisBlock::size).product()
}

/// Splits one axis index into per-block indices, outermost block first.
pub(crate) fn split_axis_index(blocks: &[AxisBlock], mut index: usize) -> Vec<usize> {
    let mut out = vec![0; blocks.len()];
    for (pos, block) in blocks.iter().enumerate().rev() {
        let size = block.size();
        out[pos] = index % size;
        index /= size;
    }
    out
}

pub(crate) fn join_axis_index(blocks: &[AxisBlock], indices: &[usize]) -> usize {
    debug_assert_eq!(blocks.len(), indices.len());
    let mut idx = 0;
    for (block, &i) in blocks.iter().zip(indices) {
        idx = idx * block.size() + i;
    }
    idx
}

impl AlgebraicResult {
    pub fn new(payload: Payload, axes: Vec<Vec<AxisBlock>>) -> Self {
        debug_assert_eq!(payload.ndim(), axes.len());
        for (i, blocks) in axes.iter().enumerate() {
            debug_assert_eq!(
                payload.axis_len(i),
                axis_size(blocks),
                "axis {i} length must equal the product of its block sizes"
            );
        }
        AlgebraicResult { payload, axes }
    }

    /// All variables in flattened order: axis 0 blocks, then axis 1, ...
    pub fn vars(&self) -> Vec<String> {
        self.blocks_flat().map(|b| b.var.clone()).collect()
    }

    pub fn blocks_flat(&self) -> impl Iterator<Item = &AxisBlock> {
        self.axes.iter().flatten()
    }

    pub fn has_var(&self, var: &str) -> bool {
        self.blocks_flat().any(|b| b.var == var)
    }

    pub fn block(&self, var: &str) -> Option<&AxisBlock> {
        self.blocks_flat().find(|b| b.var == var)
    }

    pub fn nnz(&self) -> usize {
        self.payload.nnz()
    }

    pub fn is_empty(&self) -> bool {
        self.nnz() == 0
    }

    /// True for a plain three-variable pattern result: a tensor payload with
    /// one ordinary block per axis.
    pub fn is_full_tensor(&self) -> bool {
        matches!(self.payload, Payload::Tensor(_))
            && self.axes.len() == 3
            && self
                .axes
                .iter()
                .all(|blocks| blocks.len() == 1 && !blocks[0].with_unbound)
    }

    /// Per-nonzero block index tuples in flattened block order, sorted in
    /// payload (row-major) order.
    pub fn block_tuples(&self) -> Vec<Vec<usize>> {
        self.payload
            .coords()
            .into_iter()
            .map(|coord| {
                let mut tuple = Vec::with_capacity(self.blocks_flat().count());
                for (axis, &idx) in coord.iter().enumerate() {
                    tuple.extend(split_axis_index(&self.axes[axis], idx));
                }
                tuple
            })
            .collect()
    }

    /// Decodes one block tuple into (variable, bound term or unbound) pairs.
    pub fn decode_tuple(&self, tuple: &[usize]) -> Vec<(String, Option<Term>)> {
        self.blocks_flat()
            .zip(tuple)
            .map(|(block, &i)| (block.var.clone(), block.decode(i)))
            .collect()
    }

    /// Rebuilds this result as a matrix with the requested variables on rows
    /// and columns (each flattened variable exactly once across the two).
    pub fn rearrange(&self, rows: &[String], cols: &[String]) -> Result<AlgebraicResult> {
        let flat: Vec<&AxisBlock> = self.blocks_flat().collect();
        let order: Vec<String> = flat.iter().map(|b| b.var.clone()).collect();
        let mut seen = vec![false; flat.len()];
        let mut pick = |var: &String| -> Result<AxisBlock> {
            let pos = order
                .iter()
                .position(|v| v == var)
                .ok_or_else(|| Error::eval(format!("no block for variable ?{var}")))?;
            if seen[pos] {
                return Err(Error::eval(format!("variable ?{var} selected twice")));
            }
            seen[pos] = true;
            Ok(flat[pos].clone())
        };
        let row_blocks: Vec<AxisBlock> = rows.iter().map(&mut pick).collect::<Result<_>>()?;
        let col_blocks: Vec<AxisBlock> = cols.iter().map(&mut pick).collect::<Result<_>>()?;
        if !seen.iter().all(|&s| s) {
            return Err(Error::eval(
                "rearrange must mention every variable exactly once".to_string(),
            ));
        }

        let row_src: Vec<usize> = rows
            .iter()
            .map(|v| order.iter().position(|o| o == v).unwrap())
            .collect();
        let col_src: Vec<usize> = cols
            .iter()
            .map(|v| order.iter().position(|o| o == v).unwrap())
            .collect();

        let mut nz = Vec::with_capacity(self.nnz());
        for tuple in self.block_tuples() {
            let r_indices: Vec<usize> = row_src.iter().map(|&p| tuple[p]).collect();
            let c_indices: Vec<usize> = col_src.iter().map(|&p| tuple[p]).collect();
            nz.push((
                join_axis_index(&row_blocks, &r_indices),
                join_axis_index(&col_blocks, &c_indices),
            ));
        }
        nz.sort_unstable();
        let matrix = BoolMatrix::from_coords(axis_size(&row_blocks), axis_size(&col_blocks), nz)?;
        Ok(AlgebraicResult::new(
            Payload::Matrix(matrix),
            vec![row_blocks, col_blocks],
        ))
    }

    /// Replaces one block's dictionary, translating its indices through
    /// `map` (old index -> new index). Grows the payload accordingly.
    pub fn remap_block(
        &mut self,
        var: &str,
        new_dict: Arc<Dictionary>,
        map: &[usize],
    ) -> Result<()> {
        let flat_pos = self
            .blocks_flat()
            .position(|b| b.var == var)
            .ok_or_else(|| Error::eval(format!("no block for variable ?{var}")))?;
        {
            let block = self.blocks_flat().nth(flat_pos).expect("position in range");
            if block.with_unbound {
                return Err(Error::unsupported(format!(
                    "cannot realign optionally-bound variable ?{var}"
                )));
            }
            if map.len() != block.terms.len() {
                return Err(Error::eval("alignment map length mismatch".to_string()));
            }
        }

        // decode against the old layout, then swap the dictionary in and
        // re-encode against the grown one
        let tuples: Vec<Vec<usize>> = self.block_tuples();
        self.block_mut(flat_pos).terms = new_dict;
        let remapped = tuples.into_iter().map(|mut t| {
            t[flat_pos] = map[t[flat_pos]];
            t
        });
        self.payload = rebuild_payload(&self.payload, &self.axes, remapped)?;
        Ok(())
    }

    fn block_mut(&mut self, flat_pos: usize) -> &mut AxisBlock {
        self.axes
            .iter_mut()
            .flatten()
            .nth(flat_pos)
            .expect("flat position in range")
    }

    /// ORs away every variable not in `keep`, leaving the distinct
    /// combinations of the kept variables as a vector result.
    pub fn or_out(&self, keep: &[String]) -> Result<AlgebraicResult> {
        let dropped: Vec<String> = self
            .vars()
            .into_iter()
            .filter(|v| !keep.contains(v))
            .collect();
        let m = self.rearrange(keep, &dropped)?;
        let Payload::Matrix(matrix) = &m.payload else {
            unreachable!("rearrange yields a matrix");
        };
        let support = matrix.row_support();
        Ok(AlgebraicResult::new(
            Payload::Vector(support),
            vec![m.axes[0].clone()],
        ))
    }

    /// Same result with an all-zero payload.
    pub fn zero_like(&self) -> AlgebraicResult {
        let payload = match &self.payload {
            Payload::Vector(v) => Payload::Vector(BoolVector::zeros(v.dim())),
            Payload::Matrix(m) => Payload::Matrix(BoolMatrix::zeros(m.rows(), m.cols())),
            Payload::Tensor(t) => Payload::Tensor(BoolTensor3::zeros(t.dims())),
        };
        AlgebraicResult::new(payload, self.axes.clone())
    }
}

/// Rebuilds a payload of the same arity from block tuples after block sizes
/// changed.
fn rebuild_payload(
    template: &Payload,
    axes: &[Vec<AxisBlock>],
    tuples: impl Iterator<Item = Vec<usize>>,
) -> Result<Payload> {
    let mut axis_coords: Vec<Vec<usize>> = Vec::new();
    for tuple in tuples {
        let mut coord = Vec::with_capacity(axes.len());
        let mut offset = 0;
        for blocks in axes {
            let part = &tuple[offset..offset + blocks.len()];
            coord.push(join_axis_index(blocks, part));
            offset += blocks.len();
        }
        axis_coords.push(coord);
    }
    Ok(match template {
        Payload::Vector(_) => Payload::Vector(BoolVector::from_indices(
            axis_size(&axes[0]),
            axis_coords.into_iter().map(|c| c[0]),
        )?),
        Payload::Matrix(_) => Payload::Matrix(BoolMatrix::from_coords(
            axis_size(&axes[0]),
            axis_size(&axes[1]),
            axis_coords.into_iter().map(|c| (c[0], c[1])),
        )?),
        Payload::Tensor(_) => Payload::Tensor(BoolTensor3::from_coords(
            (
                axis_size(&axes[0]),
                axis_size(&axes[1]),
                axis_size(&axes[2]),
            ),
            axis_coords.into_iter().map(|c| (c[0], c[1], c[2])),
        )?),
    })
}
