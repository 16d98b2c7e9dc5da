//! Hand-rolled lexer and recursive-descent parser for the query language.
//!
//! Grammar (keywords case-insensitive, `#` starts a line comment):
//!
//! ```text
//! Query   := (SELECT (DISTINCT|REDUCED)? (Var+ | `*`) | ASK | CONSTRUCT `{` Triple `}`)
//!            WHERE Group
//! Group   := `{` Pattern ( `.`? Pattern )* `.`? `}`
//! Pattern := Element (OPTIONAL Group | UNION Group)*
//! Element := Triple | Group
//! Triple  := (FROM `<`alias`>`)? (Var|Term) (Var|Term) (Var|Term)
//! Var     := `?`name ; Term := `<`IRI`>` | `"`literal`"` | `_:`name
//! ```
//!
//! Recognized but unsupported keywords (FILTER, ORDER BY, LIMIT, OFFSET,
//! GRAPH, PREFIX, DESCRIBE, BY) fail with an error naming the keyword.

use crate::error::{Error, Result};

use super::ast::{
    Modifier, Pattern, Projection, Query, QueryForm, QueryTerm, TermOrVar, TriplePattern,
};

pub fn parse(text: &str) -> Result<Query> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let query = p.query()?;
    p.expect_end()?;
    validate(&query)?;
    Ok(query)
}

fn validate(query: &Query) -> Result<()> {
    let scope = query.scope_vars();
    let check = |vars: Vec<&str>| -> Result<()> {
        for v in vars {
            if !scope.iter().any(|s| s == v) {
                return Err(Error::eval(format!(
                    "variable ?{v} does not appear in the WHERE clause"
                )));
            }
        }
        Ok(())
    };
    match &query.form {
        QueryForm::Select {
            projection: Projection::Vars(vars),
            ..
        } => check(vars.iter().map(String::as_str).collect())?,
        QueryForm::Construct { template } => check(template.vars())?,
        _ => {}
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Keyword(Kw),
    Var(String),
    Iri(String),
    Literal(String),
    Blank(String),
    LBrace,
    RBrace,
    Dot,
    Star,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kw {
    Select,
    Ask,
    Construct,
    Where,
    Distinct,
    Reduced,
    Optional,
    Union,
    From,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Keyword(k) => write!(f, "{k:?}").map(|_| ()),
            Tok::Var(v) => write!(f, "?{v}"),
            Tok::Iri(i) => write!(f, "<{i}>"),
            Tok::Literal(_) => write!(f, "literal"),
            Tok::Blank(b) => write!(f, "_:{b}"),
            Tok::LBrace => write!(f, "{{"),
            Tok::RBrace => write!(f, "}}"),
            Tok::Dot => write!(f, "."),
            Tok::Star => write!(f, "*"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

const UNSUPPORTED: &[&str] = &[
    "FILTER", "ORDER", "BY", "LIMIT", "OFFSET", "GRAPH", "PREFIX", "DESCRIBE", "BIND", "VALUES",
];

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let lineno = li + 1;
        let mut chars = line.char_indices().peekable();
        while let Some(&(ci, ch)) = chars.peek() {
            let col = ci + 1;
            let fail = |msg: String| Error::QuerySyntax {
                line: lineno,
                col,
                msg,
            };
            match ch {
                '#' => break,
                c if c.is_whitespace() => {
                    chars.next();
                }
                '{' => {
                    chars.next();
                    out.push(Spanned {
                        tok: Tok::LBrace,
                        line: lineno,
                        col,
                    });
                }
                '}' => {
                    chars.next();
                    out.push(Spanned {
                        tok: Tok::RBrace,
                        line: lineno,
                        col,
                    });
                }
                '.' => {
                    chars.next();
                    out.push(Spanned {
                        tok: Tok::Dot,
                        line: lineno,
                        col,
                    });
                }
                '*' => {
                    chars.next();
                    out.push(Spanned {
                        tok: Tok::Star,
                        line: lineno,
                        col,
                    });
                }
                '?' => {
                    chars.next();
                    let name = take_while(&mut chars, is_name_char);
                    if name.is_empty() {
                        return Err(fail("empty variable name".into()));
                    }
                    out.push(Spanned {
                        tok: Tok::Var(name),
                        line: lineno,
                        col,
                    });
                }
                '<' => {
                    chars.next();
                    let mut iri = String::new();
                    let mut closed = false;
                    for (_, c) in chars.by_ref() {
                        if c == '>' {
                            closed = true;
                            break;
                        }
                        if c.is_whitespace() {
                            return Err(fail("whitespace inside IRI".into()));
                        }
                        iri.push(c);
                    }
                    if !closed {
                        return Err(fail("unterminated IRI".into()));
                    }
                    out.push(Spanned {
                        tok: Tok::Iri(iri),
                        line: lineno,
                        col,
                    });
                }
                '"' => {
                    chars.next();
                    let mut text = String::new();
                    let mut closed = false;
                    while let Some((_, c)) = chars.next() {
                        match c {
                            '"' => {
                                closed = true;
                                break;
                            }
                            '\\' => match chars.next() {
                                Some((_, '\\')) => text.push('\\'),
                                Some((_, '"')) => text.push('"'),
                                Some((_, 'n')) => text.push('\n'),
                                Some((_, 'r')) => text.push('\r'),
                                Some((_, 't')) => text.push('\t'),
                                Some((_, c)) => {
                                    return Err(fail(format!("unknown escape `\\{c}`")))
                                }
                                None => return Err(fail("unterminated literal".into())),
                            },
                            c => text.push(c),
                        }
                    }
                    if !closed {
                        return Err(fail("unterminated literal".into()));
                    }
                    out.push(Spanned {
                        tok: Tok::Literal(text),
                        line: lineno,
                        col,
                    });
                }
                '_' => {
                    chars.next();
                    match chars.next() {
                        Some((_, ':')) => {}
                        _ => return Err(fail("blank node must start with `_:`".into())),
                    }
                    let label = take_while(&mut chars, is_name_char);
                    if label.is_empty() {
                        return Err(fail("empty blank node label".into()));
                    }
                    out.push(Spanned {
                        tok: Tok::Blank(label),
                        line: lineno,
                        col,
                    });
                }
                c if c.is_alphabetic() => {
                    let word = take_while(&mut chars, |c| c.is_alphanumeric() || c == '_');
                    let upper = word.to_ascii_uppercase();
                    let kw = match upper.as_str() {
                        "SELECT" => Kw::Select,
                        "ASK" => Kw::Ask,
                        "CONSTRUCT" => Kw::Construct,
                        "WHERE" => Kw::Where,
                        "DISTINCT" => Kw::Distinct,
                        "REDUCED" => Kw::Reduced,
                        "OPTIONAL" => Kw::Optional,
                        "UNION" => Kw::Union,
                        "FROM" => Kw::From,
                        _ if UNSUPPORTED.contains(&upper.as_str()) => {
                            return Err(Error::Unsupported(keyword_name(&upper)))
                        }
                        _ => return Err(fail(format!("unexpected word `{word}`"))),
                    };
                    out.push(Spanned {
                        tok: Tok::Keyword(kw),
                        line: lineno,
                        col,
                    });
                }
                c => return Err(fail(format!("unexpected character `{c}`"))),
            }
        }
    }
    Ok(out)
}

fn keyword_name(upper: &str) -> String {
    match upper {
        "ORDER" | "BY" => "ORDER BY".to_string(),
        other => other.to_string(),
    }
}

fn take_while(
    chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>,
    pred: impl Fn(char) -> bool,
) -> String {
    let mut s = String::new();
    while let Some(&(_, c)) = chars.peek() {
        if pred(c) {
            s.push(c);
            chars.next();
        } else {
            break;
        }
    }
    s
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|s| &s.tok)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos.min(self.tokens.len().saturating_sub(1)))
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1))
    }

    fn fail(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::QuerySyntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        match self.next() {
            Some(s) if s.tok == tok => Ok(()),
            Some(s) => Err(Error::QuerySyntax {
                line: s.line,
                col: s.col,
                msg: format!("expected `{tok}`, found `{}`", s.tok),
            }),
            None => Err(self.fail(format!("expected `{tok}`, found end of input"))),
        }
    }

    fn expect_keyword(&mut self, kw: Kw) -> Result<()> {
        self.expect(Tok::Keyword(kw))
    }

    fn expect_end(&self) -> Result<()> {
        if self.pos < self.tokens.len() {
            let s = &self.tokens[self.pos];
            return Err(Error::QuerySyntax {
                line: s.line,
                col: s.col,
                msg: format!("unexpected `{}` after query", s.tok),
            });
        }
        Ok(())
    }

    fn query(&mut self) -> Result<Query> {
        let form = match self.next() {
            Some(Spanned {
                tok: Tok::Keyword(Kw::Select),
                ..
            }) => {
                let modifier = match self.peek() {
                    Some(Tok::Keyword(Kw::Distinct)) => {
                        self.next();
                        Modifier::Distinct
                    }
                    Some(Tok::Keyword(Kw::Reduced)) => {
                        self.next();
                        Modifier::Reduced
                    }
                    _ => Modifier::None,
                };
                let projection = match self.peek() {
                    Some(Tok::Star) => {
                        self.next();
                        Projection::Star
                    }
                    Some(Tok::Var(_)) => {
                        let mut vars = Vec::new();
                        while let Some(Tok::Var(v)) = self.peek() {
                            let v = v.clone();
                            self.next();
                            if !vars.contains(&v) {
                                vars.push(v);
                            }
                        }
                        Projection::Vars(vars)
                    }
                    _ => return Err(self.fail("SELECT needs `*` or variables")),
                };
                QueryForm::Select {
                    projection,
                    modifier,
                }
            }
            Some(Spanned {
                tok: Tok::Keyword(Kw::Ask),
                ..
            }) => QueryForm::Ask,
            Some(Spanned {
                tok: Tok::Keyword(Kw::Construct),
                ..
            }) => {
                self.expect(Tok::LBrace)?;
                let template = self.triple()?;
                if let Some(Tok::Dot) = self.peek() {
                    self.next();
                }
                self.expect(Tok::RBrace)?;
                QueryForm::Construct { template }
            }
            Some(s) => {
                return Err(Error::QuerySyntax {
                    line: s.line,
                    col: s.col,
                    msg: format!("expected SELECT, ASK or CONSTRUCT, found `{}`", s.tok),
                })
            }
            None => return Err(self.fail("empty query")),
        };
        self.expect_keyword(Kw::Where)?;
        let where_clause = self.group()?;
        Ok(Query { form, where_clause })
    }

    /// `{ pattern ( .? pattern )* .? }`, with OPTIONAL/UNION binding to the
    /// pattern accumulated so far at this nesting level.
    fn group(&mut self) -> Result<Pattern> {
        self.expect(Tok::LBrace)?;
        let mut acc: Option<Pattern> = None;
        loop {
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.next();
                    break;
                }
                Some(Tok::Dot) => {
                    if acc.is_none() {
                        return Err(self.fail("`.` before any pattern"));
                    }
                    self.next();
                }
                Some(Tok::Keyword(Kw::Optional)) => {
                    let left = acc
                        .take()
                        .ok_or_else(|| self.fail("OPTIONAL without a left pattern"))?;
                    self.next();
                    let right = self.group()?;
                    acc = Some(Pattern::Optional(Box::new(left), Box::new(right)));
                }
                Some(Tok::Keyword(Kw::Union)) => {
                    let left = acc
                        .take()
                        .ok_or_else(|| self.fail("UNION without a left pattern"))?;
                    self.next();
                    let right = self.group()?;
                    acc = Some(Pattern::Union(Box::new(left), Box::new(right)));
                }
                Some(Tok::LBrace) => {
                    let sub = Pattern::Group(Box::new(self.group()?));
                    acc = Some(match acc.take() {
                        Some(prev) => Pattern::Join(Box::new(prev), Box::new(sub)),
                        None => sub,
                    });
                }
                Some(_) => {
                    let triple = Pattern::Triple(self.triple()?);
                    acc = Some(match acc.take() {
                        Some(prev) => Pattern::Join(Box::new(prev), Box::new(triple)),
                        None => triple,
                    });
                }
                None => return Err(self.fail("unterminated group, expected `}`")),
            }
        }
        acc.ok_or_else(|| self.fail("empty group pattern"))
    }

    fn triple(&mut self) -> Result<TriplePattern> {
        let graph = if let Some(Tok::Keyword(Kw::From)) = self.peek() {
            self.next();
            match self.next() {
                Some(Spanned {
                    tok: Tok::Iri(alias),
                    ..
                }) => Some(alias),
                _ => return Err(self.fail("FROM needs a `<alias>`")),
            }
        } else {
            None
        };
        let s = self.term_or_var()?;
        let p = self.term_or_var()?;
        let o = self.term_or_var()?;
        Ok(TriplePattern { graph, s, p, o })
    }

    fn term_or_var(&mut self) -> Result<TermOrVar> {
        match self.next() {
            Some(Spanned {
                tok: Tok::Var(v), ..
            }) => Ok(TermOrVar::Var(v)),
            Some(Spanned {
                tok: Tok::Iri(i), ..
            }) => Ok(TermOrVar::Term(QueryTerm::Iri(i))),
            Some(Spanned {
                tok: Tok::Literal(l),
                ..
            }) => Ok(TermOrVar::Term(QueryTerm::Literal(l))),
            Some(Spanned {
                tok: Tok::Blank(b), ..
            }) => Ok(TermOrVar::Term(QueryTerm::Blank(b))),
            Some(s) => Err(Error::QuerySyntax {
                line: s.line,
                col: s.col,
                msg: format!("expected a term or variable, found `{}`", s.tok),
            }),
            None => Err(self.fail("expected a term or variable, found end of input")),
        }
    }
}
