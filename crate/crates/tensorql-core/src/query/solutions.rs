//! Decoded solution sequences and their output renderings.

use serde_json::{Map, Value};

use crate::store::Term;

use super::algebra::AlgebraicResult;

/// An ordered sequence of variable bindings. `None` is an unbound value
/// (introduced by OPTIONAL, or by UNION padding).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSequence {
    vars: Vec<String>,
    rows: Vec<Vec<Option<Term>>>,
}

impl SolutionSequence {
    pub fn new(vars: Vec<String>) -> Self {
        SolutionSequence {
            vars,
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> &[Vec<Option<Term>>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push_row(&mut self, row: Vec<Option<Term>>) {
        debug_assert_eq!(row.len(), self.vars.len());
        self.rows.push(row);
    }

    /// Binding of `var` in row `row`, if the variable exists and is bound.
    pub fn get(&self, row: usize, var: &str) -> Option<&Term> {
        let pos = self.vars.iter().position(|v| v == var)?;
        self.rows.get(row)?.get(pos)?.as_ref()
    }

    /// Reorders/filters columns to `vars`; variables this sequence does not
    /// carry come out unbound in every row (UNION padding).
    pub fn project(&self, vars: &[String]) -> SolutionSequence {
        let positions: Vec<Option<usize>> = vars
            .iter()
            .map(|v| self.vars.iter().position(|s| s == v))
            .collect();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                positions
                    .iter()
                    .map(|p| p.and_then(|i| row[i].clone()))
                    .collect()
            })
            .collect();
        SolutionSequence {
            vars: vars.to_vec(),
            rows,
        }
    }

    /// Drops duplicate rows, keeping first occurrences in order.
    pub fn dedup(&self) -> SolutionSequence {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = SolutionSequence::new(self.vars.clone());
        for row in &self.rows {
            let key: Vec<Option<String>> =
                row.iter().map(|t| t.as_ref().map(render_term)).collect();
            if seen.insert(key) {
                out.rows.push(row.clone());
            }
        }
        out
    }

    /// Appends all rows of `other` (columns must match).
    pub fn extend(&mut self, other: &SolutionSequence) {
        debug_assert_eq!(self.vars, other.vars);
        self.rows.extend(other.rows.iter().cloned());
    }

    /// Tab-separated rendering: header row of variable names, one row per
    /// solution, unbound values as empty fields.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.vars.join("\t"));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|t| t.as_ref().map(render_term).unwrap_or_default())
                .collect();
            out.push_str(&fields.join("\t"));
            out.push('\n');
        }
        out
    }

    /// JSON-lines rendering: one object per solution, unbound values as null.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let mut obj = Map::new();
            for (var, term) in self.vars.iter().zip(row) {
                obj.insert(
                    var.clone(),
                    term.as_ref()
                        .map(|t| Value::String(render_term(t)))
                        .unwrap_or(Value::Null),
                );
            }
            out.push_str(&Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }
}

fn render_term(t: &Term) -> String {
    t.to_string()
}

/// Enumerates the nonzeros of an algebraic result in row-major order and
/// projects each decoded binding onto `vars` (all of which must be carried
/// by the result).
pub fn decode_solutions(result: &AlgebraicResult, vars: &[String]) -> SolutionSequence {
    let flat_vars = result.vars();
    let positions: Vec<usize> = vars
        .iter()
        .map(|v| {
            flat_vars
                .iter()
                .position(|f| f == v)
                .expect("projected variable must be in the result")
        })
        .collect();
    let blocks: Vec<_> = result.blocks_flat().collect();
    let mut seq = SolutionSequence::new(vars.to_vec());
    for tuple in result.block_tuples() {
        let row: Vec<Option<Term>> = positions
            .iter()
            .map(|&p| blocks[p].decode(tuple[p]))
            .collect();
        seq.push_row(row);
    }
    seq
}
