//! N-Triples subset: `<IRI>` or `_:label` subjects, `<IRI>` predicates,
//! `<IRI>`, `_:label` or `"literal"` objects, `.` terminator, `#` comments
//! and blank lines.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

use super::graph::Graph;
use super::term::Term;

/// Parses a stream of N-Triples lines into a fresh graph. Duplicate triples
/// collapse to one tensor cell; dictionaries are in first-appearance order.
/// Blank node labels are scoped to this load, so equal labels from other
/// files stay distinct.
pub fn load_ntriples(reader: impl BufRead) -> Result<Graph> {
    let mut graph = Graph::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if let Some((s, p, o)) = parse_line(&line, lineno)? {
            let scope = graph.scope();
            graph.add_triple(s.into_term(scope), p.into_term(scope), o.into_term(scope));
        }
    }
    Ok(graph)
}

pub fn parse_ntriples_str(text: &str) -> Result<Graph> {
    load_ntriples(text.as_bytes())
}

/// Serializes in coordinate order, one triple per line. Blank labels are kept
/// verbatim unless two scopes collide on a label, in which case every blank
/// from a colliding label is suffixed with its scope to keep nodes distinct.
pub fn write_ntriples(graph: &Graph, mut writer: impl Write) -> std::io::Result<()> {
    let mangle = collision_labels(graph);
    let show = |t: &Term| -> String {
        match t {
            Term::Blank { scope, label } if mangle.contains_key(label.as_str()) => {
                format!("_:{label}.s{scope}")
            }
            other => other.to_string(),
        }
    };
    for (s, p, o) in graph.triples() {
        writeln!(writer, "{} {} {} .", show(&s), show(&p), show(&o))?;
    }
    Ok(())
}

pub fn ntriples_string(graph: &Graph) -> String {
    let mut buf = Vec::new();
    write_ntriples(graph, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("serialized triples are UTF-8")
}

fn collision_labels(graph: &Graph) -> BTreeMap<String, ()> {
    let mut label_scopes: BTreeMap<String, u32> = BTreeMap::new();
    let mut collisions = BTreeMap::new();
    for axis in crate::tensor::Axis::ALL {
        for term in graph.dict(axis).iter() {
            if let Term::Blank { scope, label } = term {
                match label_scopes.get(label) {
                    Some(&seen) if seen != *scope => {
                        collisions.insert(label.clone(), ());
                    }
                    Some(_) => {}
                    None => {
                        label_scopes.insert(label.clone(), *scope);
                    }
                }
            }
        }
    }
    collisions
}

/// Parses a single term in N-Triples syntax (`<iri>`, `"literal"`,
/// `_:label`); blank labels are scoped with `scope`.
pub fn parse_term(text: &str, scope: u32) -> Result<Term> {
    let mut cur = Cursor::new(text.trim(), 1);
    let raw = cur.term()?;
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.fail("unexpected trailing content after term"));
    }
    Ok(raw.into_term(scope))
}

/// Parsed term before blank-node scoping.
#[derive(Debug, PartialEq)]
pub(crate) enum RawTerm {
    Iri(String),
    Literal(String),
    Blank(String),
}

impl RawTerm {
    pub(crate) fn into_term(self, scope: u32) -> Term {
        match self {
            RawTerm::Iri(s) => Term::Iri(s),
            RawTerm::Literal(s) => Term::Literal(s),
            RawTerm::Blank(label) => Term::Blank { scope, label },
        }
    }
}

fn parse_line(line: &str, lineno: usize) -> Result<Option<(RawTerm, RawTerm, RawTerm)>> {
    let mut cur = Cursor::new(line, lineno);
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = cur.term()?;
    if matches!(subject, RawTerm::Literal(_)) {
        return Err(cur.fail("literal not allowed as subject"));
    }
    cur.require_ws()?;
    let predicate = cur.term()?;
    if !matches!(predicate, RawTerm::Iri(_)) {
        return Err(cur.fail("predicate must be an IRI"));
    }
    cur.require_ws()?;
    let object = cur.term()?;
    cur.skip_ws();
    if cur.next() != Some('.') {
        return Err(cur.fail("expected `.` after object"));
    }
    cur.skip_ws();
    if !cur.at_end() && cur.peek() != Some('#') {
        return Err(cur.fail("unexpected trailing content"));
    }
    Ok(Some((subject, predicate, object)))
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    lineno: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: &'a str, lineno: usize) -> Self {
        Cursor {
            chars: line.chars().peekable(),
            lineno,
        }
    }

    fn fail(&self, msg: impl Into<String>) -> Error {
        Error::NTriples {
            line: self.lineno,
            msg: msg.into(),
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn next(&mut self) -> Option<char> {
        self.chars.next()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.next();
        }
    }

    fn require_ws(&mut self) -> Result<()> {
        if !self.peek().is_some_and(|c| c.is_whitespace()) {
            return Err(self.fail("expected whitespace between terms"));
        }
        self.skip_ws();
        Ok(())
    }

    fn term(&mut self) -> Result<RawTerm> {
        match self.peek() {
            Some('<') => {
                self.next();
                let mut iri = String::new();
                loop {
                    match self.next() {
                        Some('>') => return Ok(RawTerm::Iri(iri)),
                        Some(c) if !c.is_whitespace() => iri.push(c),
                        Some(_) => return Err(self.fail("whitespace inside IRI")),
                        None => return Err(self.fail("unterminated IRI")),
                    }
                }
            }
            Some('"') => {
                self.next();
                let mut text = String::new();
                loop {
                    match self.next() {
                        Some('"') => return Ok(RawTerm::Literal(text)),
                        Some('\\') => match self.next() {
                            Some('\\') => text.push('\\'),
                            Some('"') => text.push('"'),
                            Some('n') => text.push('\n'),
                            Some('r') => text.push('\r'),
                            Some('t') => text.push('\t'),
                            Some(c) => return Err(self.fail(format!("unknown escape `\\{c}`"))),
                            None => return Err(self.fail("unterminated literal")),
                        },
                        Some(c) => text.push(c),
                        None => return Err(self.fail("unterminated literal")),
                    }
                }
            }
            Some('_') => {
                self.next();
                if self.next() != Some(':') {
                    return Err(self.fail("blank node must start with `_:`"));
                }
                let mut label = String::new();
                while self
                    .peek()
                    .is_some_and(|c| !c.is_whitespace() && c != '.' || c == '.')
                {
                    // a `.` could end the line; only take it into the label
                    // when more label characters follow
                    if self.peek() == Some('.') {
                        let mut clone = self.chars.clone();
                        clone.next();
                        match clone.peek() {
                            Some(c) if !c.is_whitespace() && *c != '#' => {}
                            _ => break,
                        }
                    }
                    label.push(self.next().unwrap());
                }
                if label.is_empty() {
                    return Err(self.fail("empty blank node label"));
                }
                Ok(RawTerm::Blank(label))
            }
            Some(c) => Err(self.fail(format!("unexpected character `{c}`"))),
            None => Err(self.fail("unexpected end of line")),
        }
    }
}
