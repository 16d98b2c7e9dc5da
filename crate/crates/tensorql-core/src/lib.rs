//! Boolean tensor algebra over RDF data.
//!
//! An RDF graph is a set of (subject, predicate, object) triples; encoding the
//! three term sets as index ranges turns the graph into a sparse binary 3-way
//! tensor. On top of that representation this crate provides:
//!
//! - [`tensor`]: sparse Boolean vectors, matrices and 3-way tensors with the
//!   products needed everywhere else (Kronecker, Khatri-Rao, Boolean matrix
//!   product, outer products, slicing and matricization),
//! - [`store`]: dictionary-encoded graphs, N-Triples ingestion/serialization,
//!   cross-graph label alignment and marginal-sum maintenance,
//! - [`query`]: a SPARQL subset (SELECT/ASK/CONSTRUCT, joins, OPTIONAL,
//!   UNION, DISTINCT) evaluated entirely as tensor algebra,
//! - [`cardinality`]: exact counts, bounds and expectation estimators for
//!   join result sizes, plus a k-minimum-values distinct-count sketch,
//! - [`cp`]: Boolean CP decomposition (construction, reconstruction,
//!   reduction to irreducible form, sparsity verification).

pub mod cardinality;
pub mod cp;
pub mod error;
pub mod query;
pub mod store;
pub mod tensor;

pub use error::{Error, Result};
