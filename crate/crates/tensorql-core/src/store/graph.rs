use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tensor::{Axis, BoolTensor3};

use super::dictionary::Dictionary;
use super::marginals::MarginalStats;
use super::term::Term;

static NEXT_SCOPE: AtomicU32 = AtomicU32::new(1);

/// A dictionary-encoded RDF graph: three term dictionaries, one sparse binary
/// tensor whose element `(i, j, k)` is set exactly when the triple
/// `(subject_i, predicate_j, object_k)` is present, and the marginal sum
/// matrices maintained under updates.
///
/// Updates take `&mut self`; readers work on plain shared references
/// (single-writer, multi-reader). Dictionaries are handed out as `Arc`s so
/// query results can decode against a stable snapshot.
#[derive(Clone, Debug)]
pub struct Graph {
    scope: u32,
    dicts: [Arc<Dictionary>; 3],
    tensor: BoolTensor3,
    stats: MarginalStats,
}

impl Default for Graph {
    fn default() -> Self {
        Self::new()
    }
}

impl Graph {
    pub fn new() -> Self {
        Graph {
            scope: NEXT_SCOPE.fetch_add(1, Ordering::Relaxed),
            dicts: [
                Arc::new(Dictionary::new()),
                Arc::new(Dictionary::new()),
                Arc::new(Dictionary::new()),
            ],
            tensor: BoolTensor3::zeros((0, 0, 0)),
            stats: MarginalStats::new((0, 0, 0)),
        }
    }

    /// Scope id for blank nodes minted while loading into this graph.
    pub fn scope(&self) -> u32 {
        self.scope
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.tensor.dims()
    }

    pub fn nnz(&self) -> usize {
        self.tensor.nnz()
    }

    pub fn tensor(&self) -> &BoolTensor3 {
        &self.tensor
    }

    pub fn stats(&self) -> &MarginalStats {
        &self.stats
    }

    pub fn dict(&self, axis: Axis) -> &Arc<Dictionary> {
        &self.dicts[axis.index()]
    }

    pub fn subjects(&self) -> &Arc<Dictionary> {
        self.dict(Axis::Mode1)
    }

    pub fn predicates(&self) -> &Arc<Dictionary> {
        self.dict(Axis::Mode2)
    }

    pub fn objects(&self) -> &Arc<Dictionary> {
        self.dict(Axis::Mode3)
    }

    /// Adds a triple, growing dictionaries on new terms. Returns false when
    /// the triple was already present (set semantics).
    pub fn add_triple(&mut self, s: Term, p: Term, o: Term) -> bool {
        let i = Arc::make_mut(&mut self.dicts[0]).intern(s);
        let j = Arc::make_mut(&mut self.dicts[1]).intern(p);
        let k = Arc::make_mut(&mut self.dicts[2]).intern(o);
        let dims = (
            self.dicts[0].len(),
            self.dicts[1].len(),
            self.dicts[2].len(),
        );
        self.tensor.grow_dims(dims);
        self.stats.grow_to(dims);
        if self.tensor.insert((i, j, k)) {
            self.stats.apply_add((i, j, k));
            true
        } else {
            false
        }
    }

    /// Removes a triple if present; dictionaries never shrink. Returns false
    /// (a no-op signal) when the triple was absent.
    pub fn remove_triple(&mut self, s: &Term, p: &Term, o: &Term) -> bool {
        let Some(coord) = self.encode_triple(s, p, o) else {
            return false;
        };
        if self.tensor.remove(coord) {
            self.stats.apply_remove(coord);
            true
        } else {
            false
        }
    }

    pub fn encode_triple(&self, s: &Term, p: &Term, o: &Term) -> Option<(usize, usize, usize)> {
        Some((
            self.dicts[0].get(s)?,
            self.dicts[1].get(p)?,
            self.dicts[2].get(o)?,
        ))
    }

    pub fn decode_coord(&self, coord: (usize, usize, usize)) -> Result<(Term, Term, Term)> {
        let (i, j, k) = coord;
        let term = |axis: usize, index: usize, dim: usize| {
            self.dicts[axis]
                .term(index)
                .cloned()
                .ok_or(Error::IndexOutOfRange {
                    what: "decode",
                    index,
                    dim,
                })
        };
        Ok((
            term(0, i, self.dims().0)?,
            term(1, j, self.dims().1)?,
            term(2, k, self.dims().2)?,
        ))
    }

    pub fn decode_coords(
        &self,
        coords: &[(usize, usize, usize)],
    ) -> Result<Vec<(Term, Term, Term)>> {
        coords.iter().map(|&c| self.decode_coord(c)).collect()
    }

    /// Decoded triples in coordinate order.
    pub fn triples(&self) -> impl Iterator<Item = (Term, Term, Term)> + '_ {
        self.tensor
            .iter()
            .map(move |c| self.decode_coord(c).expect("stored coordinate decodes"))
    }

    pub fn contains_triple(&self, s: &Term, p: &Term, o: &Term) -> bool {
        self.encode_triple(s, p, o)
            .is_some_and(|c| self.tensor.contains(c))
    }

    /// Recomputes the marginal matrices from the tensor.
    pub fn rebuild_stats(&mut self) {
        let mut stats = MarginalStats::from_tensor(&self.tensor);
        stats.grow_to(self.dims());
        self.stats = stats;
    }

    pub(crate) fn from_parts(
        scope: u32,
        dicts: [Arc<Dictionary>; 3],
        tensor: BoolTensor3,
    ) -> Graph {
        let mut stats = MarginalStats::from_tensor(&tensor);
        stats.grow_to(tensor.dims());
        Graph {
            scope,
            dicts,
            tensor,
            stats,
        }
    }
}

/// Index maps of one aligned mode into the shared (union) term space.
#[derive(Clone, Debug)]
pub struct Alignment {
    pub mode: Axis,
    pub left_map: Vec<usize>,
    pub right_map: Vec<usize>,
}

/// Pads two graphs so the requested modes share one dictionary: the union of
/// both term lists, left graph's order first. Tensors gain structural zeros
/// only; no triple appears or disappears.
pub fn align(left: &Graph, right: &Graph, modes: &[Axis]) -> (Graph, Graph, Vec<Alignment>) {
    let mut left_dicts = left.dicts.clone();
    let mut right_dicts = right.dicts.clone();
    let mut maps: [Option<(Vec<usize>, Vec<usize>)>; 3] = [None, None, None];
    let mut alignments = Vec::new();

    for &mode in modes {
        let idx = mode.index();
        if maps[idx].is_some() {
            continue;
        }
        let (merged, lmap, rmap) = Dictionary::union(&left_dicts[idx], &right_dicts[idx]);
        let merged = Arc::new(merged);
        left_dicts[idx] = Arc::clone(&merged);
        right_dicts[idx] = merged;
        alignments.push(Alignment {
            mode,
            left_map: lmap.clone(),
            right_map: rmap.clone(),
        });
        maps[idx] = Some((lmap, rmap));
    }

    let remap = |tensor: &BoolTensor3, dicts: &[Arc<Dictionary>; 3], take_left: bool| {
        let dims = (dicts[0].len(), dicts[1].len(), dicts[2].len());
        let coords: Vec<(usize, usize, usize)> = tensor
            .iter()
            .map(|(i, j, k)| {
                let tr = |axis: usize, v: usize| match &maps[axis] {
                    Some((lmap, rmap)) => {
                        if take_left {
                            lmap[v]
                        } else {
                            rmap[v]
                        }
                    }
                    None => v,
                };
                (tr(0, i), tr(1, j), tr(2, k))
            })
            .collect();
        BoolTensor3::from_coords(dims, coords).expect("alignment preserves validity")
    };

    let left_tensor = remap(&left.tensor, &left_dicts, true);
    let right_tensor = remap(&right.tensor, &right_dicts, false);

    (
        Graph::from_parts(left.scope, left_dicts, left_tensor),
        Graph::from_parts(right.scope, right_dicts, right_tensor),
        alignments,
    )
}
