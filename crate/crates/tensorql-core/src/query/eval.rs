//! Query evaluation: triple patterns become fibres, slices or whole tensors;
//! joins dispatch on the classified case to Khatri-Rao, Kronecker,
//! element-wise AND or the tube/slice OR forms; OPTIONAL appends the
//! "no value" index; UNION concatenates solution sequences.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::store::{Dictionary, Graph, Term};
use crate::tensor::{Axis, BoolMatrix, BoolTensor3, BoolVector};

use super::algebra::{axis_size, join_axis_index, AlgebraicResult, AxisBlock, Payload};
use super::ast::{Modifier, Pattern, Projection, Query, QueryForm, TermOrVar, TriplePattern};
use super::plan::{
    classify, detect_distinct_fast_path, free_order, DistinctPath, JoinCase, SideView,
};
use super::solutions::{decode_solutions, SolutionSequence};
use super::GraphSet;

/// Result of a query.
#[derive(Clone, Debug)]
pub enum QueryOutcome {
    Solutions(SolutionSequence),
    Boolean(bool),
    Graph(Box<Graph>),
}

/// Result of a WHERE subtree: algebraic until a UNION turns it into a
/// decoded sequence.
#[derive(Clone, Debug)]
pub enum Evaluated {
    Alg(AlgebraicResult),
    Seq(SolutionSequence),
}

impl Evaluated {
    fn available_vars(&self) -> Vec<String> {
        match self {
            Evaluated::Alg(a) => a.vars(),
            Evaluated::Seq(s) => s.vars().to_vec(),
        }
    }

    fn nonempty(&self) -> bool {
        match self {
            Evaluated::Alg(a) => !a.is_empty(),
            Evaluated::Seq(s) => !s.is_empty(),
        }
    }
}

pub fn evaluate(query: &Query, graphs: &GraphSet<'_>) -> Result<QueryOutcome> {
    evaluate_traced(query, graphs).map(|(outcome, _)| outcome)
}

/// Like [`evaluate`] but also reports the result size of every join,
/// optional and union step in plan order.
pub fn evaluate_traced(query: &Query, graphs: &GraphSet<'_>) -> Result<(QueryOutcome, Vec<usize>)> {
    let mut trace = Vec::new();
    let outcome = match &query.form {
        QueryForm::Select {
            projection,
            modifier,
        } => {
            let seq = match modifier {
                Modifier::None => {
                    let ev = eval_where(&query.where_clause, graphs, &mut trace)?;
                    let header = resolve_projection(query, projection, &ev)?;
                    match ev {
                        Evaluated::Alg(a) => decode_solutions(&a, &header),
                        Evaluated::Seq(s) => s.project(&header),
                    }
                }
                Modifier::Distinct | Modifier::Reduced => {
                    eval_distinct(query, projection, graphs, &mut trace)?
                }
            };
            QueryOutcome::Solutions(seq)
        }
        QueryForm::Ask => {
            let ev = eval_where(&query.where_clause, graphs, &mut trace)?;
            QueryOutcome::Boolean(ev.nonempty())
        }
        QueryForm::Construct { template } => {
            let ev = eval_where(&query.where_clause, graphs, &mut trace)?;
            QueryOutcome::Graph(Box::new(construct(template, &ev)?))
        }
    };
    Ok((outcome, trace))
}

/// Projection header: explicit variables must be carried by the result;
/// `*` yields the WHERE clause's variables (in appearance order) that the
/// result still carries, since the tensor-tensor OR forms consume their
/// shared variables.
fn resolve_projection(
    query: &Query,
    projection: &Projection,
    ev: &Evaluated,
) -> Result<Vec<String>> {
    let available = ev.available_vars();
    match projection {
        Projection::Star => Ok(query
            .scope_vars()
            .into_iter()
            .filter(|v| available.contains(v))
            .collect()),
        Projection::Vars(vars) => {
            for v in vars {
                if !available.contains(v) {
                    return Err(Error::unsupported(format!(
                        "variable ?{v} was consumed by the join evaluation and cannot be projected"
                    )));
                }
            }
            Ok(vars.clone())
        }
    }
}

fn eval_distinct(
    query: &Query,
    projection: &Projection,
    graphs: &GraphSet<'_>,
    trace: &mut Vec<usize>,
) -> Result<SolutionSequence> {
    if let Some(fp) = detect_distinct_fast_path(query) {
        let Projection::Vars(header) = projection else {
            unreachable!("fast path implies explicit projection");
        };
        let mut l = eval_pattern(&fp.left, graphs.resolve(fp.left.graph.as_deref())?)?;
        let mut r = eval_pattern(&fp.right, graphs.resolve(fp.right.graph.as_deref())?)?;
        let shared = vec![fp.shared.clone()];
        align_shared(&mut l, &mut r, &shared)?;
        let l_free: Vec<String> = fp.left_free.clone().into_iter().collect();
        let r_free: Vec<String> = fp.right_free.clone().into_iter().collect();
        let lm = l.rearrange(&l_free, &shared)?;
        let rm = r.rearrange(&r_free, &shared)?;
        let (l_mat, r_mat) = (matrix_of(&lm), matrix_of(&rm));

        let result = match fp.path {
            DistinctPath::Bound => AlgebraicResult::new(
                Payload::Vector(l_mat.column_support().and(&r_mat.column_support())?),
                vec![lm.axes[1].clone()],
            ),
            DistinctPath::Mixed { keep_left: true } => AlgebraicResult::new(
                Payload::Matrix(l_mat.mask_columns(&r_mat.column_support())?),
                lm.axes.clone(),
            ),
            DistinctPath::Mixed { keep_left: false } => AlgebraicResult::new(
                Payload::Matrix(r_mat.mask_columns(&l_mat.column_support())?),
                rm.axes.clone(),
            ),
            DistinctPath::Pair => AlgebraicResult::new(
                Payload::Matrix(l_mat.matmul(&r_mat.transpose())?),
                vec![lm.axes[0].clone(), rm.axes[0].clone()],
            ),
        };
        trace.push(result.nnz());
        return Ok(decode_solutions(&result, header));
    }

    // generic path: evaluate, then OR away the unprojected axes
    let ev = eval_where(&query.where_clause, graphs, trace)?;
    let header = resolve_projection(query, projection, &ev)?;
    match ev {
        Evaluated::Alg(a) => {
            let reduced = a.or_out(&header)?;
            Ok(decode_solutions(&reduced, &header))
        }
        Evaluated::Seq(s) => Ok(s.project(&header).dedup()),
    }
}

fn construct(template: &TriplePattern, ev: &Evaluated) -> Result<Graph> {
    let template_vars: Vec<String> = template.vars().iter().map(|s| s.to_string()).collect();
    let available = ev.available_vars();
    for v in &template_vars {
        if !available.contains(v) {
            return Err(Error::unsupported(format!(
                "template variable ?{v} was consumed by the join evaluation"
            )));
        }
    }
    let solutions = match ev {
        Evaluated::Alg(a) => {
            let reduced = a.or_out(&template_vars)?;
            decode_solutions(&reduced, &template_vars)
        }
        Evaluated::Seq(s) => s.project(&template_vars).dedup(),
    };

    let mut out = Graph::new();
    let scope = out.scope();
    'solution: for row in 0..solutions.len() {
        let mut terms = Vec::with_capacity(3);
        for pos in template.positions() {
            let term = match pos {
                TermOrVar::Term(t) => t.to_term(scope),
                TermOrVar::Var(v) => match solutions.get(row, v) {
                    Some(t) => t.clone(),
                    // unbound template variable: skip this solution
                    None => continue 'solution,
                },
            };
            terms.push(term);
        }
        let (s, p, o) = (terms[0].clone(), terms[1].clone(), terms[2].clone());
        // instantiations that cannot form a triple are skipped
        if s.is_literal() || !matches!(p, Term::Iri(_)) {
            continue;
        }
        out.add_triple(s, p, o);
    }
    Ok(out)
}

pub(crate) fn eval_where(
    pattern: &Pattern,
    graphs: &GraphSet<'_>,
    trace: &mut Vec<usize>,
) -> Result<Evaluated> {
    match pattern {
        Pattern::Triple(tp) => {
            let g = graphs.resolve(tp.graph.as_deref())?;
            Ok(Evaluated::Alg(eval_pattern(tp, g)?))
        }
        Pattern::Group(inner) => eval_where(inner, graphs, trace),
        Pattern::Join(l, r) => {
            let le = eval_where(l, graphs, trace)?;
            let re = eval_where(r, graphs, trace)?;
            let (Evaluated::Alg(la), Evaluated::Alg(ra)) = (le, re) else {
                return Err(Error::unsupported(
                    "UNION results cannot take part in further joins".to_string(),
                ));
            };
            let result = eval_join(la, ra)?;
            trace.push(result.nnz());
            Ok(Evaluated::Alg(result))
        }
        Pattern::Optional(l, r) => {
            let le = eval_where(l, graphs, trace)?;
            let re = eval_where(r, graphs, trace)?;
            let (Evaluated::Alg(la), Evaluated::Alg(ra)) = (le, re) else {
                return Err(Error::unsupported(
                    "UNION results cannot take part in OPTIONAL".to_string(),
                ));
            };
            let result = eval_optional(la, ra)?;
            trace.push(result.nnz());
            Ok(Evaluated::Alg(result))
        }
        Pattern::Union(l, r) => {
            let le = eval_where(l, graphs, trace)?;
            let re = eval_where(r, graphs, trace)?;
            let seq = eval_union(le, re);
            trace.push(seq.len());
            Ok(Evaluated::Seq(seq))
        }
    }
}

/// A triple pattern selects a cell, fibre, slice or the whole tensor,
/// depending on how many positions are variables. Fixed terms missing from
/// the dictionaries yield an all-zero result of the correct shape.
pub fn eval_pattern(tp: &TriplePattern, g: &Graph) -> Result<AlgebraicResult> {
    if let Some(v) = tp.repeated_var() {
        return Err(Error::unsupported(format!(
            "variable ?{v} repeated within one triple pattern"
        )));
    }
    let scope = g.scope();
    let mut fixed: Vec<(Axis, Option<usize>)> = Vec::new();
    let mut vars: Vec<(Axis, String)> = Vec::new();
    for (pos, axis) in tp.positions().iter().zip(Axis::ALL) {
        match pos {
            TermOrVar::Var(v) => vars.push((axis, v.clone())),
            TermOrVar::Term(t) => fixed.push((axis, g.dict(axis).get(&t.to_term(scope)))),
        }
    }
    let all_fixed_resolve = fixed.iter().all(|(_, idx)| idx.is_some());
    let block = |axis: Axis, var: &str| AxisBlock::new(var, Arc::clone(g.dict(axis)));

    Ok(match vars.len() {
        0 => {
            let present = all_fixed_resolve && {
                let coord = (
                    fixed[0].1.unwrap(),
                    fixed[1].1.unwrap(),
                    fixed[2].1.unwrap(),
                );
                g.tensor().contains(coord)
            };
            let payload = if present {
                BoolTensor3::from_coords((1, 1, 1), [(0, 0, 0)]).expect("unit tensor")
            } else {
                BoolTensor3::zeros((1, 1, 1))
            };
            AlgebraicResult::new(Payload::Tensor(payload), vec![vec![], vec![], vec![]])
        }
        1 => {
            let (axis, var) = &vars[0];
            let vector = if all_fixed_resolve {
                g.tensor().fibre(
                    (fixed[0].0, fixed[0].1.unwrap()),
                    (fixed[1].0, fixed[1].1.unwrap()),
                )?
            } else {
                BoolVector::zeros(g.tensor().dim(*axis))
            };
            AlgebraicResult::new(Payload::Vector(vector), vec![vec![block(*axis, var)]])
        }
        2 => {
            let (fixed_axis, fixed_idx) = fixed[0];
            let matrix = match fixed_idx {
                Some(idx) => g.tensor().slice(fixed_axis, idx)?,
                None => {
                    let (ra, ca) = fixed_axis.others();
                    BoolMatrix::zeros(g.tensor().dim(ra), g.tensor().dim(ca))
                }
            };
            AlgebraicResult::new(
                Payload::Matrix(matrix),
                vec![
                    vec![block(vars[0].0, &vars[0].1)],
                    vec![block(vars[1].0, &vars[1].1)],
                ],
            )
        }
        3 => AlgebraicResult::new(
            Payload::Tensor(g.tensor().clone()),
            vec![
                vec![block(Axis::Mode1, &vars[0].1)],
                vec![block(Axis::Mode2, &vars[1].1)],
                vec![block(Axis::Mode3, &vars[2].1)],
            ],
        ),
        _ => unreachable!(),
    })
}

fn side_view(a: &AlgebraicResult) -> SideView {
    SideView {
        axes: a
            .axes
            .iter()
            .map(|blocks| blocks.iter().map(|b| b.var.clone()).collect())
            .collect(),
        full_tensor: a.is_full_tensor(),
        sequence: false,
    }
}

fn matrix_of(a: &AlgebraicResult) -> BoolMatrix {
    match &a.payload {
        Payload::Matrix(m) => m.clone(),
        _ => unreachable!("operand was rearranged to a matrix"),
    }
}

/// Pads both sides so every shared variable indexes one common dictionary.
fn align_shared(l: &mut AlgebraicResult, r: &mut AlgebraicResult, shared: &[String]) -> Result<()> {
    for var in shared {
        let lb = l
            .block(var)
            .ok_or_else(|| Error::eval(format!("missing block ?{var}")))?;
        let rb = r
            .block(var)
            .ok_or_else(|| Error::eval(format!("missing block ?{var}")))?;
        if lb.with_unbound || rb.with_unbound {
            return Err(Error::unsupported(format!(
                "joining on optionally-bound variable ?{var}"
            )));
        }
        if Arc::ptr_eq(&lb.terms, &rb.terms) {
            continue;
        }
        let (merged, lmap, rmap) = Dictionary::union(&lb.terms, &rb.terms);
        let merged = Arc::new(merged);
        l.remap_block(var, Arc::clone(&merged), &lmap)?;
        r.remap_block(var, merged, &rmap)?;
    }
    Ok(())
}

pub(crate) fn eval_join(mut l: AlgebraicResult, mut r: AlgebraicResult) -> Result<AlgebraicResult> {
    let case = classify(&side_view(&l), &side_view(&r))?;
    match case {
        JoinCase::ElementwiseAnd { shared } => {
            align_shared(&mut l, &mut r, &shared)?;
            let order = l.vars();
            let lm = l.rearrange(&order, &[])?;
            let rm = r.rearrange(&order, &[])?;
            let anded = matrix_of(&lm).and(&matrix_of(&rm))?;
            Ok(AlgebraicResult::new(
                Payload::Matrix(anded),
                lm.axes.clone(),
            ))
        }
        JoinCase::TubeOuterOr { shared } => {
            align_shared(&mut l, &mut r, &shared)?;
            tube_outer_or(&l, &r, &shared)
        }
        JoinCase::SliceKronOr { shared } => {
            align_shared(&mut l, &mut r, std::slice::from_ref(&shared))?;
            slice_kron_or(&l, &r, &shared)
        }
        JoinCase::Kronecker => kronecker_join(l, r),
        JoinCase::KhatriRao { shared, .. } => {
            align_shared(&mut l, &mut r, &shared)?;
            let l_free = free_order(&side_view(&l), &shared);
            let r_free = free_order(&side_view(&r), &shared);
            let lm = l.rearrange(&l_free, &shared)?;
            let rm = r.rearrange(&r_free, &shared)?;
            let kr = matrix_of(&lm).khatri_rao(&matrix_of(&rm))?;
            let mut rows = lm.axes[0].clone();
            rows.extend(rm.axes[0].iter().cloned());
            Ok(AlgebraicResult::new(
                Payload::Matrix(kr),
                vec![rows, lm.axes[1].clone()],
            ))
        }
    }
}

/// Zero shared variables: Kronecker product. A side with no variables acts as
/// a scalar mask; two vectors take the outer-product orientation.
fn kronecker_join(l: AlgebraicResult, r: AlgebraicResult) -> Result<AlgebraicResult> {
    if l.vars().is_empty() {
        return Ok(if l.is_empty() { r.zero_like() } else { r });
    }
    if r.vars().is_empty() {
        return Ok(if r.is_empty() { l.zero_like() } else { l });
    }
    let (lm, rm) = match (&l.payload, &r.payload) {
        (Payload::Vector(_), Payload::Vector(_)) => {
            (l.rearrange(&l.vars(), &[])?, r.rearrange(&[], &r.vars())?)
        }
        _ => (
            {
                let (rows, cols) = natural_split_result(&l);
                l.rearrange(&rows, &cols)?
            },
            {
                let (rows, cols) = natural_split_result(&r);
                r.rearrange(&rows, &cols)?
            },
        ),
    };
    let kron = matrix_of(&lm).kronecker(&matrix_of(&rm))?;
    let mut rows = lm.axes[0].clone();
    rows.extend(rm.axes[0].iter().cloned());
    let mut cols = lm.axes[1].clone();
    cols.extend(rm.axes[1].iter().cloned());
    Ok(AlgebraicResult::new(
        Payload::Matrix(kron),
        vec![rows, cols],
    ))
}

fn natural_split_result(a: &AlgebraicResult) -> (Vec<String>, Vec<String>) {
    let axis_vars = |i: usize| -> Vec<String> {
        a.axes
            .get(i)
            .map(|blocks| blocks.iter().map(|b| b.var.clone()).collect())
            .unwrap_or_default()
    };
    match a.payload.ndim() {
        1 => (axis_vars(0), vec![]),
        2 => (axis_vars(0), axis_vars(1)),
        _ => {
            let mut cols = axis_vars(1);
            cols.extend(axis_vars(2));
            (axis_vars(0), cols)
        }
    }
}

fn tensor_coords(a: &AlgebraicResult) -> &BoolTensor3 {
    match &a.payload {
        Payload::Tensor(t) => t,
        _ => unreachable!("tensor-tensor case implies tensor payloads"),
    }
}

fn axis_of_var(a: &AlgebraicResult, var: &str) -> usize {
    a.axes
        .iter()
        .position(|blocks| blocks.iter().any(|b| b.var == var))
        .expect("variable present")
}

/// Two full tensors sharing two variables: for every shared index pair, the
/// outer product of the two corresponding tubes, all OR-ed together. Left
/// free variable on rows, right free variable on columns; the shared
/// variables are consumed.
fn tube_outer_or(
    l: &AlgebraicResult,
    r: &AlgebraicResult,
    shared: &[String],
) -> Result<AlgebraicResult> {
    let (s1, s2) = (&shared[0], &shared[1]);
    let group = |a: &AlgebraicResult| -> BTreeMap<(usize, usize), Vec<usize>> {
        let (a1, a2) = (axis_of_var(a, s1), axis_of_var(a, s2));
        let af = 3 - a1 - a2;
        let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for coord in tensor_coords(a).iter() {
            let c = [coord.0, coord.1, coord.2];
            map.entry((c[a1], c[a2])).or_default().push(c[af]);
        }
        map
    };
    let l_tubes = group(l);
    let r_tubes = group(r);

    let l_free_axis = 3 - axis_of_var(l, s1) - axis_of_var(l, s2);
    let r_free_axis = 3 - axis_of_var(r, s1) - axis_of_var(r, s2);
    let l_block = l.axes[l_free_axis][0].clone();
    let r_block = r.axes[r_free_axis][0].clone();

    let mut nz = Vec::new();
    for (key, l_list) in &l_tubes {
        if let Some(r_list) = r_tubes.get(key) {
            for &a in l_list {
                for &b in r_list {
                    nz.push((a, b));
                }
            }
        }
    }
    nz.sort_unstable();
    nz.dedup();
    let matrix = BoolMatrix::from_coords(l_block.size(), r_block.size(), nz)?;
    Ok(AlgebraicResult::new(
        Payload::Matrix(matrix),
        vec![vec![l_block], vec![r_block]],
    ))
}

/// Two full tensors sharing one variable: for every shared index, the
/// Kronecker product of the two corresponding slices, all OR-ed together.
/// Rows pair the two earlier free modes, columns the two later ones; the
/// shared variable is consumed.
fn slice_kron_or(
    l: &AlgebraicResult,
    r: &AlgebraicResult,
    shared: &str,
) -> Result<AlgebraicResult> {
    let split = |a: &AlgebraicResult| -> (usize, usize, usize) {
        let s = axis_of_var(a, shared);
        let mut free = [0, 1, 2].into_iter().filter(|&x| x != s);
        let earlier = free.next().unwrap();
        let later = free.next().unwrap();
        (s, earlier, later)
    };
    let (ls, le, ll) = split(l);
    let (rs, re, rl) = split(r);

    let group = |a: &AlgebraicResult, s: usize, e: usize, t: usize| {
        let mut map: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for coord in tensor_coords(a).iter() {
            let c = [coord.0, coord.1, coord.2];
            map.entry(c[s]).or_default().push((c[e], c[t]));
        }
        map
    };
    let l_slices = group(l, ls, le, ll);
    let r_slices = group(r, rs, re, rl);

    let le_block = l.axes[le][0].clone();
    let ll_block = l.axes[ll][0].clone();
    let re_block = r.axes[re][0].clone();
    let rl_block = r.axes[rl][0].clone();

    let mut nz = Vec::new();
    for (key, l_cells) in &l_slices {
        if let Some(r_cells) = r_slices.get(key) {
            for &(a1, a2) in l_cells {
                for &(b1, b2) in r_cells {
                    nz.push((a1 * re_block.size() + b1, a2 * rl_block.size() + b2));
                }
            }
        }
    }
    nz.sort_unstable();
    nz.dedup();
    let rows = le_block.size() * re_block.size();
    let cols = ll_block.size() * rl_block.size();
    let matrix = BoolMatrix::from_coords(rows, cols, nz)?;
    Ok(AlgebraicResult::new(
        Payload::Matrix(matrix),
        vec![vec![le_block, re_block], vec![ll_block, rl_block]],
    ))
}

/// Left outer join. The right operand's free blocks each gain an extra
/// "no value" index; left solutions whose shared values have no right match
/// appear once with every right variable at that index.
pub(crate) fn eval_optional(
    mut l: AlgebraicResult,
    mut r: AlgebraicResult,
) -> Result<AlgebraicResult> {
    let l_vars = l.vars();
    let r_vars = r.vars();
    let shared: Vec<String> = l_vars
        .iter()
        .filter(|v| r_vars.contains(v))
        .cloned()
        .collect();
    let r_free: Vec<String> = r_vars
        .iter()
        .filter(|v| !shared.contains(v))
        .cloned()
        .collect();
    align_shared(&mut l, &mut r, &shared)?;

    // a right side binding nothing new leaves the left side unchanged
    if r_free.is_empty() {
        return Ok(l);
    }

    let l_free = free_order(&side_view(&l), &shared);
    let lm = l.rearrange(&l_free, &shared)?;
    let rm = r.rearrange(&r_free, &shared)?;
    let l_mat = matrix_of(&lm);
    let r_mat = matrix_of(&rm);

    let dangling = l_mat.column_support().and_not(&r_mat.column_support())?;

    // rebuild the right matrix with every free block one index wider
    let old_blocks = &rm.axes[0];
    let mut ext_blocks: Vec<AxisBlock> = old_blocks.clone();
    for b in &mut ext_blocks {
        b.with_unbound = true;
    }
    let ext_rows = axis_size(&ext_blocks);
    let mut nz: Vec<(usize, usize)> = Vec::with_capacity(r_mat.nnz() + dangling.nnz());
    for (row, col) in r_mat.iter() {
        let indices = super::algebra::split_axis_index(old_blocks, row);
        nz.push((join_axis_index(&ext_blocks, &indices), col));
    }
    let corner: Vec<usize> = ext_blocks.iter().map(|b| b.size() - 1).collect();
    let corner_row = join_axis_index(&ext_blocks, &corner);
    for col in dangling.iter() {
        nz.push((corner_row, col));
    }
    nz.sort_unstable();
    let r_ext = BoolMatrix::from_coords(ext_rows, r_mat.cols(), nz)?;

    let kr = l_mat.khatri_rao(&r_ext)?;
    let mut rows = lm.axes[0].clone();
    rows.extend(ext_blocks);
    Ok(AlgebraicResult::new(
        Payload::Matrix(kr),
        vec![rows, lm.axes[1].clone()],
    ))
}

/// Concatenation of the two solution sequences, left first, each padded with
/// unbound values for the other side's variables.
pub(crate) fn eval_union(l: Evaluated, r: Evaluated) -> SolutionSequence {
    let to_seq = |ev: Evaluated| -> SolutionSequence {
        match ev {
            Evaluated::Alg(a) => decode_solutions(&a, &a.vars()),
            Evaluated::Seq(s) => s,
        }
    };
    let l_seq = to_seq(l);
    let r_seq = to_seq(r);
    let mut vars: Vec<String> = l_seq.vars().to_vec();
    for v in r_seq.vars() {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    let mut out = l_seq.project(&vars);
    out.extend(&r_seq.project(&vars));
    out
}
