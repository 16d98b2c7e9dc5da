//! Static query plans: the pairwise join order (left-to-right, groups
//! override), each step's algebraic case, and cardinality estimates taken
//! from the marginal statistics.

use std::sync::Arc;

use crate::cardinality::{estimate_join, CardBundle, JoinSideStats, JoinStatKind, MarginalVector};
use crate::error::{Error, Result};
use crate::store::{Dictionary, Graph};
use crate::tensor::Axis;

use super::ast::{Modifier, Pattern, Projection, Query, QueryForm, TermOrVar, TriplePattern};
use super::GraphSet;

/// How a pairwise join evaluates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JoinCase {
    /// Shared variables on columns, Khatri-Rao over them; `matricized` when a
    /// three-variable side had to be unfolded first.
    KhatriRao {
        shared: Vec<String>,
        matricized: bool,
    },
    /// No shared variables: Kronecker product (outer product for vectors).
    Kronecker,
    /// The shared variables cover both sides completely: element-wise AND.
    ElementwiseAnd { shared: Vec<String> },
    /// Two full tensors sharing two variables: OR of outer products of
    /// corresponding tubes. The shared variables are consumed.
    TubeOuterOr { shared: Vec<String> },
    /// Two full tensors sharing one variable: OR of Kronecker products of
    /// corresponding slices. The shared variable is consumed.
    SliceKronOr { shared: String },
}

impl std::fmt::Display for JoinCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let list = |vars: &[String]| {
            vars.iter()
                .map(|v| format!("?{v}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        match self {
            JoinCase::KhatriRao { shared, matricized } => {
                write!(f, "khatri-rao join on {}", list(shared))?;
                if *matricized {
                    write!(f, " (matricized)")?;
                }
                Ok(())
            }
            JoinCase::Kronecker => write!(f, "kronecker product (no shared variables)"),
            JoinCase::ElementwiseAnd { shared } => {
                if shared.is_empty() {
                    write!(f, "scalar and")
                } else {
                    write!(f, "element-wise and on {}", list(shared))
                }
            }
            JoinCase::TubeOuterOr { shared } => {
                write!(f, "or of tube outer products over {}", list(shared))
            }
            JoinCase::SliceKronOr { shared } => {
                write!(f, "or of slice kronecker products over ?{shared}")
            }
        }
    }
}

/// Shape of one operand as the classifier sees it.
#[derive(Clone, Debug)]
pub struct SideView {
    pub axes: Vec<Vec<String>>,
    pub full_tensor: bool,
    pub sequence: bool,
}

impl SideView {
    pub fn flat_vars(&self) -> Vec<String> {
        self.axes.iter().flatten().cloned().collect()
    }
}

/// Decides the evaluation rule for a pair of operands.
pub fn classify(left: &SideView, right: &SideView) -> Result<JoinCase> {
    if left.sequence || right.sequence {
        return Err(Error::unsupported(
            "UNION results cannot take part in further joins".to_string(),
        ));
    }
    let l_vars = left.flat_vars();
    let r_vars = right.flat_vars();
    let shared: Vec<String> = l_vars
        .iter()
        .filter(|v| r_vars.contains(v))
        .cloned()
        .collect();

    let covers_both =
        l_vars.iter().all(|v| shared.contains(v)) && r_vars.iter().all(|v| shared.contains(v));
    if covers_both {
        return Ok(JoinCase::ElementwiseAnd { shared });
    }
    if left.full_tensor && right.full_tensor {
        return match shared.len() {
            2 => Ok(JoinCase::TubeOuterOr { shared }),
            1 => Ok(JoinCase::SliceKronOr {
                shared: shared[0].clone(),
            }),
            0 => Err(Error::unsupported(
                "join of two three-variable patterns with no shared variable".to_string(),
            )),
            _ => unreachable!("three shared variables cover both sides"),
        };
    }
    if shared.is_empty() {
        return Ok(JoinCase::Kronecker);
    }
    Ok(JoinCase::KhatriRao {
        matricized: left.full_tensor || right.full_tensor,
        shared,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOp {
    Join,
    LeftOuter,
    Union,
}

impl std::fmt::Display for StepOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepOp::Join => write!(f, "join"),
            StepOp::LeftOuter => write!(f, "left outer join"),
            StepOp::Union => write!(f, "union"),
        }
    }
}

/// The three DISTINCT fast paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistinctPath {
    /// Projection is the shared variable: AND of the two column supports.
    Bound,
    /// Projection keeps one side's free variable plus the shared one:
    /// column-mask of that side by the other side's support.
    Mixed { keep_left: bool },
    /// Projection is the two free variables: Boolean matrix product.
    Pair,
}

impl std::fmt::Display for DistinctPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DistinctPath::Bound => write!(f, "distinct fast path: bound variable"),
            DistinctPath::Mixed { keep_left: true } => {
                write!(f, "distinct fast path: column mask (keep left)")
            }
            DistinctPath::Mixed { keep_left: false } => {
                write!(f, "distinct fast path: column mask (keep right)")
            }
            DistinctPath::Pair => write!(f, "distinct fast path: boolean matrix product"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlanStep {
    pub op: StepOp,
    pub left: String,
    pub right: String,
    pub case: Option<JoinCase>,
    pub distinct: Option<DistinctPath>,
    pub estimate: Option<CardBundle>,
    pub no_estimate_reason: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct QueryPlan {
    pub steps: Vec<PlanStep>,
}

/// Detected DISTINCT fast-path query: a two-pattern join where each side has
/// at most one free variable next to exactly one shared variable.
#[derive(Clone, Debug)]
pub struct FastPath {
    pub left: TriplePattern,
    pub right: TriplePattern,
    pub shared: String,
    pub left_free: Option<String>,
    pub right_free: Option<String>,
    pub path: DistinctPath,
}

fn strip_groups(p: &Pattern) -> &Pattern {
    match p {
        Pattern::Group(inner) => strip_groups(inner),
        other => other,
    }
}

pub fn detect_distinct_fast_path(query: &Query) -> Option<FastPath> {
    let QueryForm::Select {
        projection,
        modifier,
    } = &query.form
    else {
        return None;
    };
    if !matches!(modifier, Modifier::Distinct | Modifier::Reduced) {
        return None;
    }
    let Projection::Vars(proj) = projection else {
        return None;
    };
    let Pattern::Join(l, r) = strip_groups(&query.where_clause) else {
        return None;
    };
    let (Pattern::Triple(lt), Pattern::Triple(rt)) = (strip_groups(l), strip_groups(r)) else {
        return None;
    };
    if lt.repeated_var().is_some() || rt.repeated_var().is_some() {
        return None;
    }
    let l_vars: Vec<String> = lt.vars().iter().map(|s| s.to_string()).collect();
    let r_vars: Vec<String> = rt.vars().iter().map(|s| s.to_string()).collect();
    let shared: Vec<String> = l_vars
        .iter()
        .filter(|v| r_vars.contains(v))
        .cloned()
        .collect();
    if shared.len() != 1 || l_vars.len() > 2 || r_vars.len() > 2 {
        return None;
    }
    let shared = shared.into_iter().next().unwrap();
    let left_free = l_vars.iter().find(|v| **v != shared).cloned();
    let right_free = r_vars.iter().find(|v| **v != shared).cloned();

    let proj_set: std::collections::BTreeSet<String> = proj.iter().cloned().collect();
    let as_set = |items: Vec<Option<&String>>| -> std::collections::BTreeSet<String> {
        items.into_iter().flatten().cloned().collect()
    };
    let path = if proj_set == as_set(vec![Some(&shared)]) {
        DistinctPath::Bound
    } else if left_free.is_some() && proj_set == as_set(vec![Some(&shared), left_free.as_ref()]) {
        DistinctPath::Mixed { keep_left: true }
    } else if right_free.is_some() && proj_set == as_set(vec![Some(&shared), right_free.as_ref()]) {
        DistinctPath::Mixed { keep_left: false }
    } else if left_free.is_some()
        && right_free.is_some()
        && proj_set == as_set(vec![left_free.as_ref(), right_free.as_ref()])
    {
        DistinctPath::Pair
    } else {
        return None;
    };
    Some(FastPath {
        left: lt.clone(),
        right: rt.clone(),
        shared,
        left_free,
        right_free,
        path,
    })
}

/// Builds the plan: post-order walk of the pattern tree, one step per
/// join/optional/union node, annotated with its case and estimates.
pub fn plan(query: &Query, graphs: &GraphSet<'_>) -> Result<QueryPlan> {
    let mut steps = Vec::new();
    walk(&query.where_clause, graphs, &mut steps)?;

    if let Some(fp) = detect_distinct_fast_path(query) {
        if let [step] = steps.as_mut_slice() {
            step.distinct = Some(fp.path);
            let kind = match fp.path {
                DistinctPath::Bound => JoinStatKind::DistinctBound,
                DistinctPath::Mixed { keep_left } => JoinStatKind::DistinctMixed { keep_left },
                DistinctPath::Pair => JoinStatKind::DistinctPair,
            };
            if let Some((l, r)) = sides_stats(&fp.left, &fp.right, &fp.shared, graphs)? {
                step.estimate = Some(estimate_join(kind, &l, &r)?);
                step.no_estimate_reason = None;
            }
        }
    }
    Ok(QueryPlan { steps })
}

struct Shaped {
    view: SideView,
    desc: String,
    leaf: Option<TriplePattern>,
}

fn walk(pattern: &Pattern, graphs: &GraphSet<'_>, steps: &mut Vec<PlanStep>) -> Result<Shaped> {
    match pattern {
        Pattern::Triple(tp) => Ok(Shaped {
            view: pattern_view(tp)?,
            desc: tp.to_string(),
            leaf: Some(tp.clone()),
        }),
        Pattern::Group(inner) => walk(inner, graphs, steps),
        Pattern::Join(l, r) => {
            let ls = walk(l, graphs, steps)?;
            let rs = walk(r, graphs, steps)?;
            let case = classify(&ls.view, &rs.view)?;
            let (estimate, why_not) = step_estimate(&ls, &rs, &case, graphs)?;
            let view = join_view(&ls.view, &rs.view, &case);
            let desc = format!("({} {})", ls.desc, rs.desc);
            steps.push(PlanStep {
                op: StepOp::Join,
                left: ls.desc,
                right: rs.desc,
                case: Some(case),
                distinct: None,
                estimate,
                no_estimate_reason: why_not,
            });
            Ok(Shaped {
                view,
                desc,
                leaf: None,
            })
        }
        Pattern::Optional(l, r) => {
            let ls = walk(l, graphs, steps)?;
            let rs = walk(r, graphs, steps)?;
            let case = classify(&ls.view, &rs.view)?;
            let l_vars = ls.view.flat_vars();
            let r_vars = rs.view.flat_vars();
            let shared: Vec<String> = l_vars
                .iter()
                .filter(|v| r_vars.contains(v))
                .cloned()
                .collect();
            let mut rows: Vec<String> = l_vars.clone();
            rows.extend(r_vars.iter().filter(|v| !shared.contains(v)).cloned());
            let view = SideView {
                axes: vec![
                    rows.iter()
                        .filter(|v| !shared.contains(v))
                        .cloned()
                        .collect(),
                    shared,
                ],
                full_tensor: false,
                sequence: false,
            };
            let desc = format!("({} optional {})", ls.desc, rs.desc);
            steps.push(PlanStep {
                op: StepOp::LeftOuter,
                left: ls.desc,
                right: rs.desc,
                case: Some(case),
                distinct: None,
                estimate: None,
                no_estimate_reason: Some("left outer join".to_string()),
            });
            Ok(Shaped {
                view,
                desc,
                leaf: None,
            })
        }
        Pattern::Union(l, r) => {
            let ls = walk(l, graphs, steps)?;
            let rs = walk(r, graphs, steps)?;
            let mut vars = ls.view.flat_vars();
            for v in rs.view.flat_vars() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            let desc = format!("({} union {})", ls.desc, rs.desc);
            steps.push(PlanStep {
                op: StepOp::Union,
                left: ls.desc,
                right: rs.desc,
                case: None,
                distinct: None,
                estimate: None,
                no_estimate_reason: Some("solution sequence concatenation".to_string()),
            });
            Ok(Shaped {
                view: SideView {
                    axes: vec![vars],
                    full_tensor: false,
                    sequence: true,
                },
                desc,
                leaf: None,
            })
        }
    }
}

/// Axis layout of a single pattern's result.
fn pattern_view(tp: &TriplePattern) -> Result<SideView> {
    if let Some(v) = tp.repeated_var() {
        return Err(Error::unsupported(format!(
            "variable ?{v} repeated within one triple pattern"
        )));
    }
    let vars: Vec<(Axis, String)> = tp
        .positions()
        .iter()
        .zip(Axis::ALL)
        .filter_map(|(t, a)| t.as_var().map(|v| (a, v.to_string())))
        .collect();
    let axes = match vars.len() {
        0 => vec![vec![], vec![], vec![]],
        1 => vec![vec![vars[0].1.clone()]],
        2 => vec![vec![vars[0].1.clone()], vec![vars[1].1.clone()]],
        3 => vec![
            vec![vars[0].1.clone()],
            vec![vars[1].1.clone()],
            vec![vars[2].1.clone()],
        ],
        _ => unreachable!(),
    };
    Ok(SideView {
        full_tensor: vars.len() == 3,
        sequence: false,
        axes,
    })
}

fn join_view(l: &SideView, r: &SideView, case: &JoinCase) -> SideView {
    let l_vars = l.flat_vars();
    let r_vars = r.flat_vars();
    match case {
        JoinCase::KhatriRao { shared, .. } => {
            let mut rows: Vec<String> = free_order(l, shared);
            rows.extend(free_order(r, shared));
            SideView {
                axes: vec![rows, shared.clone()],
                full_tensor: false,
                sequence: false,
            }
        }
        JoinCase::Kronecker => {
            let (l0, l1) = natural_split(l);
            let (r0, r1) = natural_split(r);
            let mut rows = l0;
            rows.extend(r0);
            let mut cols = l1;
            cols.extend(r1);
            SideView {
                axes: vec![rows, cols],
                full_tensor: false,
                sequence: false,
            }
        }
        JoinCase::ElementwiseAnd { .. } => SideView {
            axes: vec![l_vars, vec![]],
            full_tensor: false,
            sequence: false,
        },
        JoinCase::TubeOuterOr { shared } => {
            let lf: Vec<String> = l_vars
                .iter()
                .filter(|v| !shared.contains(v))
                .cloned()
                .collect();
            let rf: Vec<String> = r_vars
                .iter()
                .filter(|v| !shared.contains(v))
                .cloned()
                .collect();
            SideView {
                axes: vec![lf, rf],
                full_tensor: false,
                sequence: false,
            }
        }
        JoinCase::SliceKronOr { shared } => {
            let lf: Vec<String> = l_vars.iter().filter(|v| *v != shared).cloned().collect();
            let rf: Vec<String> = r_vars.iter().filter(|v| *v != shared).cloned().collect();
            SideView {
                axes: vec![
                    vec![lf[0].clone(), rf[0].clone()],
                    vec![lf[1].clone(), rf[1].clone()],
                ],
                full_tensor: false,
                sequence: false,
            }
        }
    }
}

/// Free variables of one side in oriented order: flattened order, except a
/// full tensor unfolds with its later mode outermost.
pub(crate) fn free_order(view: &SideView, shared: &[String]) -> Vec<String> {
    let mut free: Vec<String> = view
        .flat_vars()
        .into_iter()
        .filter(|v| !shared.contains(v))
        .collect();
    if view.full_tensor {
        free.reverse();
    }
    free
}

fn natural_split(view: &SideView) -> (Vec<String>, Vec<String>) {
    match view.axes.len() {
        1 => (view.axes[0].clone(), vec![]),
        2 => (view.axes[0].clone(), view.axes[1].clone()),
        3 => {
            let mut cols = view.axes[1].clone();
            cols.extend(view.axes[2].clone());
            (view.axes[0].clone(), cols)
        }
        _ => (vec![], vec![]),
    }
}

fn step_estimate(
    l: &Shaped,
    r: &Shaped,
    case: &JoinCase,
    graphs: &GraphSet<'_>,
) -> Result<(Option<CardBundle>, Option<String>)> {
    // the single-variable AND of two fibres is the one-column Khatri-Rao,
    // so its count formula applies there as well
    let shared = match case {
        JoinCase::KhatriRao { shared, .. } => shared,
        JoinCase::ElementwiseAnd { shared }
            if shared.len() == 1
                && l.view.flat_vars().len() == 1
                && r.view.flat_vars().len() == 1 =>
        {
            shared
        }
        _ => return Ok((None, Some(format!("no marginal estimator for {case}")))),
    };
    if shared.len() != 1 {
        return Ok((
            None,
            Some("composite shared dimension has no stored marginals".to_string()),
        ));
    }
    let (Some(lt), Some(rt)) = (&l.leaf, &r.leaf) else {
        return Ok((
            None,
            Some("intermediate results carry no marginal statistics".to_string()),
        ));
    };
    match sides_stats(lt, rt, &shared[0], graphs)? {
        Some((ls, rs)) => Ok((
            Some(estimate_join(JoinStatKind::KhatriRao, &ls, &rs)?),
            None,
        )),
        None => Ok((
            None,
            Some("shared variable not on a stored mode".to_string()),
        )),
    }
}

/// Marginal vectors for the two sides of a leaf-leaf join on `shared`, in a
/// common (union-aligned) index space.
pub fn sides_stats(
    left: &TriplePattern,
    right: &TriplePattern,
    shared: &str,
    graphs: &GraphSet<'_>,
) -> Result<Option<(JoinSideStats, JoinSideStats)>> {
    let lg = graphs.resolve(left.graph.as_deref())?;
    let rg = graphs.resolve(right.graph.as_deref())?;
    let (Some((l_sigma, l_dict, l_free)), Some((r_sigma, r_dict, r_free))) =
        (leaf_sigma(left, lg, shared), leaf_sigma(right, rg, shared))
    else {
        return Ok(None);
    };
    let (l_sigma, r_sigma) = if Arc::ptr_eq(&l_dict, &r_dict) {
        (l_sigma, r_sigma)
    } else {
        let (merged, lmap, rmap) = Dictionary::union(&l_dict, &r_dict);
        (
            l_sigma.remap(merged.len(), &lmap),
            r_sigma.remap(merged.len(), &rmap),
        )
    };
    Ok(Some((
        JoinSideStats {
            sigma: l_sigma,
            free_len: l_free,
        },
        JoinSideStats {
            sigma: r_sigma,
            free_len: r_free,
        },
    )))
}

/// Column-marginal vector of one pattern along its `shared` variable, plus
/// the dictionary of that mode and the free-dimension length.
fn leaf_sigma(
    tp: &TriplePattern,
    g: &Graph,
    shared: &str,
) -> Option<(MarginalVector, Arc<Dictionary>, usize)> {
    let mut shared_axis = None;
    let mut fixed: Vec<(Axis, &super::ast::QueryTerm)> = Vec::new();
    let mut free_axes: Vec<Axis> = Vec::new();
    for (pos, axis) in tp.positions().iter().zip(Axis::ALL) {
        match pos {
            TermOrVar::Var(v) if v == shared => shared_axis = Some(axis),
            TermOrVar::Var(_) => free_axes.push(axis),
            TermOrVar::Term(t) => fixed.push((axis, t)),
        }
    }
    let shared_axis = shared_axis?;
    let dims = g.dims();
    let dim_of = |a: Axis| match a {
        Axis::Mode1 => dims.0,
        Axis::Mode2 => dims.1,
        Axis::Mode3 => dims.2,
    };
    let shared_dim = dim_of(shared_axis);
    let free_len = free_axes
        .iter()
        .map(|&a| dim_of(a))
        .product::<usize>()
        .max(1);
    let dict = Arc::clone(g.dict(shared_axis));

    let resolve = |axis: Axis, t: &super::ast::QueryTerm| g.dict(axis).get(&t.to_term(g.scope()));

    let sigma = match fixed.len() {
        0 => g.stats().sigma_for_tensor(shared_axis),
        1 => match resolve(fixed[0].0, fixed[0].1) {
            Some(idx) => g.stats().sigma_for_slice(fixed[0].0, idx, shared_axis),
            None => MarginalVector::zeros(shared_dim),
        },
        2 => {
            let a = resolve(fixed[0].0, fixed[0].1);
            let b = resolve(fixed[1].0, fixed[1].1);
            match (a, b) {
                (Some(ia), Some(ib)) => {
                    let fibre = g
                        .tensor()
                        .fibre((fixed[0].0, ia), (fixed[1].0, ib))
                        .expect("resolved indices are in range");
                    MarginalVector::from_entries(shared_dim, fibre.iter().map(|i| (i, 1)))
                }
                _ => MarginalVector::zeros(shared_dim),
            }
        }
        _ => return None,
    };
    Some((sigma, dict, free_len))
}
