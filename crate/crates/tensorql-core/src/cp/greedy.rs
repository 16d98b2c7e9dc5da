//! Greedy cover heuristic for Boolean CP decomposition.
//!
//! Each round grows candidate all-ones boxes from randomly chosen uncovered
//! nonzeros, one index at a time, and keeps the box covering the most not yet
//! covered nonzeros. By default a box may never cover a zero of the target,
//! so the output reconstructs a subset of the tensor and becomes exact once
//! everything is covered.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::tensor::{BoolMatrix, BoolTensor3};

use super::{verify_sparsity, CpFactors, DecompReport};

#[derive(Clone, Debug)]
pub struct GreedyOptions {
    pub rank: usize,
    pub seed: u64,
    /// When set, boxes may cover zeros of the target if that gains more
    /// newly covered ones than it costs in covered zeros. The result is then
    /// generally not exact.
    pub allow_overcover: bool,
    /// Candidate seeds grown per round.
    pub candidates: usize,
}

impl GreedyOptions {
    pub fn new(rank: usize, seed: u64) -> Self {
        GreedyOptions {
            rank,
            seed,
            allow_overcover: false,
            candidates: 8,
        }
    }
}

pub fn greedy_cp(tensor: &BoolTensor3, opts: &GreedyOptions) -> (CpFactors, DecompReport) {
    let dims = tensor.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut uncovered: BTreeSet<(usize, usize, usize)> = tensor.iter().collect();

    let mut a_nz: Vec<(usize, usize)> = Vec::new();
    let mut b_nz: Vec<(usize, usize)> = Vec::new();
    let mut c_nz: Vec<(usize, usize)> = Vec::new();
    let mut used_rank = 0;

    for round in 0..opts.rank {
        if uncovered.is_empty() {
            break;
        }
        let pool: Vec<(usize, usize, usize)> = uncovered.iter().copied().collect();
        let mut best: Option<(usize, Box3)> = None;
        for _ in 0..opts.candidates.max(1) {
            let &seed_coord = pool.choose(&mut rng).expect("uncovered nonzero exists");
            let grown = grow_box(tensor, seed_coord, &uncovered, opts.allow_overcover);
            let gain = grown.gain(&uncovered);
            if best.as_ref().is_none_or(|(g, _)| gain > *g) {
                best = Some((gain, grown));
            }
        }
        let (gain, grown) = best.expect("at least one candidate");
        if gain == 0 {
            break;
        }
        for &i in &grown.rows {
            a_nz.push((i, round));
        }
        for &j in &grown.mids {
            b_nz.push((j, round));
        }
        for &k in &grown.tubes {
            c_nz.push((k, round));
        }
        for coord in grown.cells() {
            uncovered.remove(&coord);
        }
        used_rank = round + 1;
    }

    // zero components fill unused rounds so the rank matches the request
    let _ = used_rank;
    let factors = CpFactors::new(
        BoolMatrix::from_coords(dims.0, opts.rank, a_nz).expect("valid factor coords"),
        BoolMatrix::from_coords(dims.1, opts.rank, b_nz).expect("valid factor coords"),
        BoolMatrix::from_coords(dims.2, opts.rank, c_nz).expect("valid factor coords"),
    )
    .expect("equal ranks by construction");
    let report = verify_sparsity(&factors, tensor);
    (factors, report)
}

struct Box3 {
    rows: BTreeSet<usize>,
    mids: BTreeSet<usize>,
    tubes: BTreeSet<usize>,
}

impl Box3 {
    fn cells(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.rows.len() * self.mids.len() * self.tubes.len());
        for &i in &self.rows {
            for &j in &self.mids {
                for &k in &self.tubes {
                    out.push((i, j, k));
                }
            }
        }
        out
    }

    fn gain(&self, uncovered: &BTreeSet<(usize, usize, usize)>) -> usize {
        self.cells()
            .into_iter()
            .filter(|c| uncovered.contains(c))
            .count()
    }
}

/// Grows a box from one nonzero, adding whichever single index (on any mode)
/// currently gains the most newly covered nonzeros, until no addition gains.
/// Without overcover, an addition is only legal if every new cell is a one
/// of the target.
fn grow_box(
    tensor: &BoolTensor3,
    seed: (usize, usize, usize),
    uncovered: &BTreeSet<(usize, usize, usize)>,
    allow_overcover: bool,
) -> Box3 {
    let dims = tensor.dims();
    let mut b = Box3 {
        rows: BTreeSet::from([seed.0]),
        mids: BTreeSet::from([seed.1]),
        tubes: BTreeSet::from([seed.2]),
    };
    loop {
        let mut best: Option<(i64, usize, usize)> = None; // (gain, mode, index)
        for (mode, dim) in [(0usize, dims.0), (1, dims.1), (2, dims.2)] {
            let have: &BTreeSet<usize> = match mode {
                0 => &b.rows,
                1 => &b.mids,
                _ => &b.tubes,
            };
            for idx in 0..dim {
                if have.contains(&idx) {
                    continue;
                }
                let Some(gain) = addition_gain(tensor, &b, mode, idx, uncovered, allow_overcover)
                else {
                    continue;
                };
                if best.is_none_or(|(g, bm, bi)| gain > g || (gain == g && (mode, idx) < (bm, bi)))
                {
                    best = Some((gain, mode, idx));
                }
            }
        }
        match best {
            Some((gain, mode, idx)) if gain > 0 => match mode {
                0 => {
                    b.rows.insert(idx);
                }
                1 => {
                    b.mids.insert(idx);
                }
                _ => {
                    b.tubes.insert(idx);
                }
            },
            _ => break,
        }
    }
    b
}

/// Net gain of extending the box by `idx` on `mode`: newly covered nonzeros,
/// minus newly covered zeros when overcover is allowed. `None` marks an
/// illegal addition (it would cover a zero and overcover is off).
fn addition_gain(
    tensor: &BoolTensor3,
    b: &Box3,
    mode: usize,
    idx: usize,
    uncovered: &BTreeSet<(usize, usize, usize)>,
    allow_overcover: bool,
) -> Option<i64> {
    let mut gain: i64 = 0;
    let cells: Vec<(usize, usize, usize)> = match mode {
        0 => b
            .mids
            .iter()
            .flat_map(|&j| b.tubes.iter().map(move |&k| (idx, j, k)))
            .collect(),
        1 => b
            .rows
            .iter()
            .flat_map(|&i| b.tubes.iter().map(move |&k| (i, idx, k)))
            .collect(),
        _ => b
            .rows
            .iter()
            .flat_map(|&i| b.mids.iter().map(move |&j| (i, j, idx)))
            .collect(),
    };
    for cell in cells {
        if tensor.contains(cell) {
            if uncovered.contains(&cell) {
                gain += 1;
            }
        } else if allow_overcover {
            gain -= 1;
        } else {
            return None;
        }
    }
    Some(gain)
}
