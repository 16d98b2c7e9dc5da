use std::fmt;

/// One RDF term. IRIs and literals compare by their text; blank nodes carry
/// the scope (load unit) they were minted in, so equal labels from different
/// files never unify.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    Literal(String),
    Blank { scope: u32, label: String },
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Term {
        Term::Iri(s.into())
    }

    pub fn literal(s: impl Into<String>) -> Term {
        Term::Literal(s.into())
    }

    pub fn blank(scope: u32, label: impl Into<String>) -> Term {
        Term::Blank {
            scope,
            label: label.into(),
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank { .. })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Literal(text) => write!(f, "\"{}\"", escape_literal(text)),
            Term::Blank { label, .. } => write!(f, "_:{label}"),
        }
    }
}

pub(crate) fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out
}
