//! Parsed query structure.

use crate::store::Term;

/// A term as written in a query. Blank node labels are resolved against the
/// graph a pattern matches (or, for CONSTRUCT templates, the built graph).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QueryTerm {
    Iri(String),
    Literal(String),
    Blank(String),
}

impl QueryTerm {
    pub fn to_term(&self, scope: u32) -> Term {
        match self {
            QueryTerm::Iri(s) => Term::Iri(s.clone()),
            QueryTerm::Literal(s) => Term::Literal(s.clone()),
            QueryTerm::Blank(label) => Term::Blank {
                scope,
                label: label.clone(),
            },
        }
    }
}

impl std::fmt::Display for QueryTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QueryTerm::Iri(s) => write!(f, "<{s}>"),
            QueryTerm::Literal(s) => write!(f, "\"{}\"", crate::store::escape_literal(s)),
            QueryTerm::Blank(s) => write!(f, "_:{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermOrVar {
    Term(QueryTerm),
    Var(String),
}

impl TermOrVar {
    pub fn as_var(&self) -> Option<&str> {
        match self {
            TermOrVar::Var(v) => Some(v),
            TermOrVar::Term(_) => None,
        }
    }
}

impl std::fmt::Display for TermOrVar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TermOrVar::Term(t) => write!(f, "{t}"),
            TermOrVar::Var(v) => write!(f, "?{v}"),
        }
    }
}

/// One triple pattern; `graph` is the alias from a `FROM <alias>` prefix,
/// defaulting to the session's first graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriplePattern {
    pub graph: Option<String>,
    pub s: TermOrVar,
    pub p: TermOrVar,
    pub o: TermOrVar,
}

impl TriplePattern {
    pub fn positions(&self) -> [&TermOrVar; 3] {
        [&self.s, &self.p, &self.o]
    }

    /// Variable names in subject, predicate, object order.
    pub fn vars(&self) -> Vec<&str> {
        self.positions().iter().filter_map(|t| t.as_var()).collect()
    }

    /// A variable used in more than one position, if any.
    pub fn repeated_var(&self) -> Option<&str> {
        let vars = self.vars();
        for (i, v) in vars.iter().enumerate() {
            if vars[i + 1..].contains(v) {
                return Some(v);
            }
        }
        None
    }
}

impl std::fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{} {} {}}}", self.s, self.p, self.o)?;
        if let Some(g) = &self.graph {
            write!(f, "@{g}")?;
        }
        Ok(())
    }
}

/// WHERE-clause pattern tree. Sequenced patterns inside a group become
/// left-associated `Join` nodes; braces become `Group` nodes and override
/// that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Triple(TriplePattern),
    Join(Box<Pattern>, Box<Pattern>),
    Optional(Box<Pattern>, Box<Pattern>),
    Union(Box<Pattern>, Box<Pattern>),
    Group(Box<Pattern>),
}

impl Pattern {
    /// Variables in first-appearance order.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Pattern::Triple(tp) => {
                for v in tp.vars() {
                    if !out.iter().any(|x| x == v) {
                        out.push(v.to_string());
                    }
                }
            }
            Pattern::Join(l, r) | Pattern::Optional(l, r) | Pattern::Union(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Pattern::Group(c) => c.collect_vars(out),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Projection {
    Star,
    Vars(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Modifier {
    #[default]
    None,
    Distinct,
    /// Answered exactly like DISTINCT, which is within its latitude.
    Reduced,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryForm {
    Select {
        projection: Projection,
        modifier: Modifier,
    },
    Ask,
    Construct {
        template: TriplePattern,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub form: QueryForm,
    pub where_clause: Pattern,
}

impl Query {
    /// Variables of the WHERE clause in first-appearance order.
    pub fn scope_vars(&self) -> Vec<String> {
        self.where_clause.vars()
    }
}
