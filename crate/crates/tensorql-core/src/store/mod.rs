//! Dictionary-encoded RDF graphs stored as sparse Boolean 3-way tensors.

mod dictionary;
mod graph;
mod marginals;
mod ntriples;
mod term;

pub use dictionary::Dictionary;
pub use graph::{align, Alignment, Graph};
pub use marginals::{CountMatrix, MarginalStats};
pub use ntriples::{
    load_ntriples, ntriples_string, parse_ntriples_str, parse_term, write_ntriples,
};
pub use term::Term;

pub(crate) use term::escape_literal;
