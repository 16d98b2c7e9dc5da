//! Shared test support: a naive nested-loop binding evaluator (the oracle
//! the tensor engine is checked against), random graph and query generators,
//! and multiset/set comparison helpers.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::prelude::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tensorql_core::query::{GraphSet, Pattern, QueryForm, QueryOutcome, TermOrVar};
use tensorql_core::store::{Graph, Term};

/// One oracle solution: variable to bound term (or unbound).
pub type OBinding = BTreeMap<String, Option<Term>>;

/// Nested-loop evaluation of a WHERE tree, entirely at the term level.
pub fn oracle_eval(pattern: &Pattern, graphs: &GraphSet<'_>) -> Vec<OBinding> {
    match pattern {
        Pattern::Triple(tp) => {
            let g = graphs.resolve(tp.graph.as_deref()).expect("alias resolves");
            let mut out = Vec::new();
            'triple: for (s, p, o) in g.triples() {
                let mut binding = OBinding::new();
                for (pos, term) in tp.positions().into_iter().zip([s, p, o]) {
                    match pos {
                        TermOrVar::Term(qt) => {
                            if qt.to_term(g.scope()) != term {
                                continue 'triple;
                            }
                        }
                        TermOrVar::Var(v) => {
                            if let Some(prev) = binding.get(v.as_str()) {
                                if prev.as_ref() != Some(&term) {
                                    continue 'triple;
                                }
                            }
                            binding.insert(v.clone(), Some(term));
                        }
                    }
                }
                out.push(binding);
            }
            out
        }
        Pattern::Group(inner) => oracle_eval(inner, graphs),
        Pattern::Join(l, r) => {
            let left = oracle_eval(l, graphs);
            let right = oracle_eval(r, graphs);
            let mut out = Vec::new();
            for lb in &left {
                for rb in &right {
                    if let Some(merged) = merge(lb, rb) {
                        out.push(merged);
                    }
                }
            }
            out
        }
        Pattern::Optional(l, r) => {
            let left = oracle_eval(l, graphs);
            let right = oracle_eval(r, graphs);
            let right_vars: Vec<String> = r.vars().into_iter().collect();
            let mut out = Vec::new();
            for lb in &left {
                let mut matched = false;
                for rb in &right {
                    if let Some(merged) = merge(lb, rb) {
                        out.push(merged);
                        matched = true;
                    }
                }
                if !matched {
                    let mut padded = lb.clone();
                    for v in &right_vars {
                        padded.entry(v.clone()).or_insert(None);
                    }
                    out.push(padded);
                }
            }
            out
        }
        Pattern::Union(l, r) => {
            let mut out = oracle_eval(l, graphs);
            out.extend(oracle_eval(r, graphs));
            out
        }
    }
}

fn merge(a: &OBinding, b: &OBinding) -> Option<OBinding> {
    let mut merged = a.clone();
    for (var, val) in b {
        match merged.get(var) {
            Some(Some(prev)) => {
                if val.as_ref() != Some(prev) {
                    return None;
                }
            }
            _ => {
                merged.insert(var.clone(), val.clone());
            }
        }
    }
    Some(merged)
}

/// Renders an oracle binding restricted to `header` as one comparable row.
pub fn oracle_row(binding: &OBinding, header: &[String]) -> Vec<Option<String>> {
    header
        .iter()
        .map(|v| {
            binding
                .get(v)
                .and_then(|t| t.as_ref())
                .map(|t| t.to_string())
        })
        .collect()
}

/// Engine solution rows rendered the same way.
pub fn engine_rows(outcome: &QueryOutcome) -> (Vec<String>, Vec<Vec<Option<String>>>) {
    match outcome {
        QueryOutcome::Solutions(seq) => (
            seq.vars().to_vec(),
            seq.rows()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|t| t.as_ref().map(|t| t.to_string()))
                        .collect()
                })
                .collect(),
        ),
        other => panic!("expected solutions, got {other:?}"),
    }
}

pub fn assert_multiset_eq(
    mut left: Vec<Vec<Option<String>>>,
    mut right: Vec<Vec<Option<String>>>,
    context: &str,
) {
    left.sort();
    right.sort();
    assert_eq!(left, right, "multiset mismatch: {context}");
}

pub fn assert_set_eq(
    left: Vec<Vec<Option<String>>>,
    right: Vec<Vec<Option<String>>>,
    context: &str,
) {
    let l: std::collections::BTreeSet<_> = left.into_iter().collect();
    let r: std::collections::BTreeSet<_> = right.into_iter().collect();
    assert_eq!(l, r, "set mismatch: {context}");
}

/// Random graph over small fixed term pools. Objects deliberately reuse some
/// subject names so subject-object joins hit shared labels, and include a
/// literal.
pub fn random_graph(rng: &mut ChaCha8Rng, dims: (usize, usize, usize), density: f64) -> Graph {
    let mut g = Graph::new();
    let subject = |i: usize| Term::iri(format!("s{i}"));
    let predicate = |j: usize| Term::iri(format!("p{j}"));
    let object = |k: usize| -> Term {
        match k % 3 {
            0 => Term::iri(format!("s{k}")),
            1 => Term::iri(format!("o{k}")),
            _ => Term::literal(format!("v{k}")),
        }
    };
    for i in 0..dims.0 {
        for j in 0..dims.1 {
            for k in 0..dims.2 {
                if rng.random_bool(density) {
                    g.add_triple(subject(i), predicate(j), object(k));
                }
            }
        }
    }
    g
}

/// The query shapes the generator emits, spanning the supported join cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    /// One position fixed per pattern, one bound variable; four orientations:
    /// 0 subject-subject, 1 object-object, 2 object-of-left = subject-of-right,
    /// 3 subject-of-left = object-of-right.
    OneFixedOneBound(u8),
    /// Two fixed positions in each pattern sharing the remaining variable.
    TwoFixed,
    /// A slice joined with a whole-tensor pattern (matricized case).
    Matricized,
    /// No shared variables.
    Kronecker,
    /// Two whole-tensor patterns sharing all three variables.
    BoundAll,
    /// Two whole-tensor patterns sharing two variables (collapsing).
    BoundTwo,
    /// Two whole-tensor patterns sharing one variable (collapsing).
    BoundOne,
    Optional,
    Union,
    DistinctBound,
    DistinctMixed,
    DistinctPair,
    Ask,
    Construct,
    /// Three-pattern chain, left-associated.
    Chain,
}

impl Case {
    pub const ALL: [Case; 18] = [
        Case::OneFixedOneBound(0),
        Case::OneFixedOneBound(1),
        Case::OneFixedOneBound(2),
        Case::OneFixedOneBound(3),
        Case::TwoFixed,
        Case::Matricized,
        Case::Kronecker,
        Case::BoundAll,
        Case::BoundTwo,
        Case::BoundOne,
        Case::Optional,
        Case::Union,
        Case::DistinctBound,
        Case::DistinctMixed,
        Case::DistinctPair,
        Case::Ask,
        Case::Construct,
        Case::Chain,
    ];

    /// Collapsing cases compare as sets over the variables the engine keeps.
    pub fn set_compare(self) -> bool {
        matches!(
            self,
            Case::BoundTwo
                | Case::BoundOne
                | Case::DistinctBound
                | Case::DistinctMixed
                | Case::DistinctPair
        )
    }
}

/// Builds query text for a case against graphs known by the given aliases.
/// Fixed terms are drawn from the pools used by [`random_graph`], with a
/// small chance of an absent term (exercising the empty-result path).
pub fn random_query(rng: &mut ChaCha8Rng, case: Case, aliases: &[&str]) -> String {
    let alias = |rng: &mut ChaCha8Rng| *aliases.choose(rng).expect("alias pool");
    let from = |rng: &mut ChaCha8Rng| {
        if aliases.len() > 1 {
            format!("FROM <{}> ", alias(rng))
        } else {
            String::new()
        }
    };
    let fixed_subject = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.1) {
            "<missing>".to_string()
        } else {
            format!("<s{}>", rng.random_range(0..8))
        }
    };
    let fixed_predicate = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.1) {
            "<nosuchp>".to_string()
        } else {
            format!("<p{}>", rng.random_range(0..5))
        }
    };
    let fixed_object = |rng: &mut ChaCha8Rng| {
        let k = rng.random_range(0..8);
        match k % 3 {
            0 => format!("<s{k}>"),
            1 => format!("<o{k}>"),
            _ => format!("\"v{k}\""),
        }
    };

    match case {
        Case::OneFixedOneBound(orientation) => {
            // fix a random position in each pattern, orientations wire the
            // bound variable across subject/object roles
            let (p1, p2) = (fixed_predicate(rng), fixed_predicate(rng));
            let (f1, f2) = (from(rng), from(rng));
            let body = match orientation {
                0 => format!("{f1}?a {p1} ?b . {f2}?a {p2} ?c"),
                1 => format!("{f1}?a {p1} ?b . {f2}?c {p2} ?b"),
                2 => format!("{f1}?a {p1} ?b . {f2}?c {p2} ?a"),
                _ => format!("{f1}?a {p1} ?b . {f2}?b {p2} ?c"),
            };
            format!("SELECT * WHERE {{ {body} }}")
        }
        Case::TwoFixed => {
            let (f1, f2) = (from(rng), from(rng));
            let (s1, p1) = (fixed_subject(rng), fixed_predicate(rng));
            if rng.random_bool(0.5) {
                let (s2, p2) = (fixed_subject(rng), fixed_predicate(rng));
                format!("SELECT * WHERE {{ {f1}{s1} {p1} ?a . {f2}{s2} {p2} ?a }}")
            } else {
                // one pattern two-fixed, the other one-fixed
                let p2 = fixed_predicate(rng);
                format!("SELECT * WHERE {{ {f1}{s1} {p1} ?a . {f2}?b {p2} ?a }}")
            }
        }
        Case::Matricized => {
            let (f1, f2) = (from(rng), from(rng));
            let p = fixed_predicate(rng);
            format!("SELECT * WHERE {{ {f1}?a {p} ?c . {f2}?d ?b ?c }}")
        }
        Case::Kronecker => {
            let (f1, f2) = (from(rng), from(rng));
            if rng.random_bool(0.5) {
                let (s1, p1) = (fixed_subject(rng), fixed_predicate(rng));
                let (s2, p2) = (fixed_subject(rng), fixed_predicate(rng));
                format!("SELECT * WHERE {{ {f1}{s1} {p1} ?a . {f2}{s2} {p2} ?b }}")
            } else {
                let (p1, p2) = (fixed_predicate(rng), fixed_predicate(rng));
                format!("SELECT * WHERE {{ {f1}?a {p1} ?b . {f2}?c {p2} ?d }}")
            }
        }
        Case::BoundAll => {
            let (f1, f2) = (from(rng), from(rng));
            format!("SELECT * WHERE {{ {f1}?a ?b ?c . {f2}?a ?b ?c }}")
        }
        Case::BoundTwo => {
            let (f1, f2) = (from(rng), from(rng));
            format!("SELECT * WHERE {{ {f1}?a ?b ?c . {f2}?a ?e ?c }}")
        }
        Case::BoundOne => {
            let (f1, f2) = (from(rng), from(rng));
            format!("SELECT * WHERE {{ {f1}?a ?b ?c . {f2}?a ?e ?f }}")
        }
        Case::Optional => {
            let (f1, f2) = (from(rng), from(rng));
            let (p1, p2) = (fixed_predicate(rng), fixed_predicate(rng));
            format!("SELECT * WHERE {{ {f1}?a {p1} ?b OPTIONAL {{ {f2}?a {p2} ?c }} }}")
        }
        Case::Union => {
            let (f1, f2) = (from(rng), from(rng));
            let (p1, p2) = (fixed_predicate(rng), fixed_predicate(rng));
            format!("SELECT * WHERE {{ {f1}?a {p1} ?b UNION {{ {f2}?c {p2} ?b }} }}")
        }
        Case::DistinctBound => {
            let (f1, f2) = (from(rng), from(rng));
            let (p1, p2) = (fixed_predicate(rng), fixed_predicate(rng));
            format!("SELECT DISTINCT ?b WHERE {{ {f1}?a {p1} ?b . {f2}?c {p2} ?b }}")
        }
        Case::DistinctMixed => {
            let (f1, f2) = (from(rng), from(rng));
            let (p1, p2) = (fixed_predicate(rng), fixed_predicate(rng));
            format!("SELECT DISTINCT ?a ?b WHERE {{ {f1}?a {p1} ?b . {f2}?c {p2} ?b }}")
        }
        Case::DistinctPair => {
            let (f1, f2) = (from(rng), from(rng));
            let (p1, p2) = (fixed_predicate(rng), fixed_predicate(rng));
            format!("SELECT DISTINCT ?a ?c WHERE {{ {f1}?a {p1} ?b . {f2}?c {p2} ?b }}")
        }
        Case::Ask => {
            let f1 = from(rng);
            match rng.random_range(0..3) {
                0 => format!("ASK WHERE {{ {f1}?a ?b ?c }}"),
                1 => format!(
                    "ASK WHERE {{ {f1}{} {} ?a }}",
                    fixed_subject(rng),
                    fixed_predicate(rng)
                ),
                _ => format!(
                    "ASK WHERE {{ {f1}{} {} {} }}",
                    fixed_subject(rng),
                    fixed_predicate(rng),
                    fixed_object(rng)
                ),
            }
        }
        Case::Construct => {
            let f1 = from(rng);
            if rng.random_bool(0.5) {
                format!("CONSTRUCT {{ ?s ?p ?o }} WHERE {{ {f1}?s ?p ?o }}")
            } else {
                let p = fixed_predicate(rng);
                format!("CONSTRUCT {{ ?o <rel> ?s }} WHERE {{ {f1}?s {p} ?o }}")
            }
        }
        Case::Chain => {
            let (f1, f2, f3) = (from(rng), from(rng), from(rng));
            let (p1, p2, p3) = (
                fixed_predicate(rng),
                fixed_predicate(rng),
                fixed_predicate(rng),
            );
            format!("SELECT * WHERE {{ {f1}?a {p1} ?b . {f2}?b {p2} ?c . {f3}?c {p3} ?d }}")
        }
    }
}

/// Runs one (graphs, query) instance against both evaluators and asserts
/// they agree. Returns the query for failure context.
pub fn check_instance(query_text: &str, graphs: &GraphSet<'_>, case: Case) {
    let query = tensorql_core::query::parse(query_text)
        .unwrap_or_else(|e| panic!("parse failed for `{query_text}`: {e}"));
    let outcome = tensorql_core::query::evaluate(&query, graphs)
        .unwrap_or_else(|e| panic!("evaluation failed for `{query_text}`: {e}"));
    let oracle = oracle_eval(&query.where_clause, graphs);

    match (&query.form, outcome) {
        (QueryForm::Ask, QueryOutcome::Boolean(b)) => {
            assert_eq!(b, !oracle.is_empty(), "ASK mismatch for `{query_text}`");
        }
        (QueryForm::Construct { template }, QueryOutcome::Graph(g)) => {
            let mut expected: std::collections::BTreeSet<String> =
                std::collections::BTreeSet::new();
            let scope = g.scope();
            let mut distinct = std::collections::BTreeSet::new();
            for binding in &oracle {
                if !distinct.insert(oracle_row(
                    binding,
                    &template
                        .vars()
                        .iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>(),
                )) {
                    continue;
                }
                let mut terms = Vec::new();
                let mut ok = true;
                for pos in template.positions() {
                    match pos {
                        TermOrVar::Term(t) => terms.push(t.to_term(scope)),
                        TermOrVar::Var(v) => match binding.get(v.as_str()).and_then(Clone::clone) {
                            Some(t) => terms.push(t),
                            None => {
                                ok = false;
                                break;
                            }
                        },
                    }
                }
                if !ok || terms[0].is_literal() || !matches!(terms[1], Term::Iri(_)) {
                    continue;
                }
                expected.insert(format!("{} {} {}", terms[0], terms[1], terms[2]));
            }
            let actual: std::collections::BTreeSet<String> = g
                .triples()
                .map(|(s, p, o)| format!("{s} {p} {o}"))
                .collect();
            assert_eq!(actual, expected, "CONSTRUCT mismatch for `{query_text}`");
        }
        (_, outcome) => {
            let (header, engine) = engine_rows(&outcome);
            let oracle_rows: Vec<Vec<Option<String>>> =
                oracle.iter().map(|b| oracle_row(b, &header)).collect();
            if case.set_compare() {
                assert_set_eq(engine, oracle_rows, query_text);
            } else {
                assert_multiset_eq(engine, oracle_rows, query_text);
            }
        }
    }
}
