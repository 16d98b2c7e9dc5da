//! SPARQL-subset parsing and tensor-algebra evaluation.

pub mod algebra;
pub mod ast;
pub mod eval;
pub mod parser;
pub mod plan;
pub mod solutions;

pub use algebra::{AlgebraicResult, AxisBlock, Payload};
pub use ast::{
    Modifier, Pattern, Projection, Query, QueryForm, QueryTerm, TermOrVar, TriplePattern,
};
pub use eval::{eval_pattern, evaluate, evaluate_traced, Evaluated, QueryOutcome};
pub use parser::parse;
pub use plan::{plan, DistinctPath, JoinCase, PlanStep, QueryPlan, StepOp};
pub use solutions::{decode_solutions, SolutionSequence};

use crate::error::{Error, Result};
use crate::store::Graph;

/// The graphs a query runs against, by alias. The first entry is the default
/// graph for patterns without a `FROM` prefix.
#[derive(Debug, Default)]
pub struct GraphSet<'a> {
    entries: Vec<(String, &'a Graph)>,
}

impl<'a> GraphSet<'a> {
    pub fn new() -> Self {
        GraphSet {
            entries: Vec::new(),
        }
    }

    pub fn add(&mut self, alias: impl Into<String>, graph: &'a Graph) -> Result<()> {
        let alias = alias.into();
        if self.entries.iter().any(|(a, _)| *a == alias) {
            return Err(Error::eval(format!("graph alias `{alias}` already loaded")));
        }
        self.entries.push((alias, graph));
        Ok(())
    }

    pub fn single(graph: &'a Graph) -> Self {
        GraphSet {
            entries: vec![("default".to_string(), graph)],
        }
    }

    pub fn aliases(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(a, _)| a.as_str())
    }

    pub fn resolve(&self, alias: Option<&str>) -> Result<&'a Graph> {
        match alias {
            Some(name) => self
                .entries
                .iter()
                .find(|(a, _)| a == name)
                .map(|(_, g)| *g)
                .ok_or_else(|| Error::UnknownGraph(name.to_string())),
            None => self
                .entries
                .first()
                .map(|(_, g)| *g)
                .ok_or_else(|| Error::eval("no graph loaded".to_string())),
        }
    }
}
