//! Tight Hamilton cycles in random r-uniform hypergraphs via the reservoir
//! method.
//!
//! The crate is organized around the stages of the algorithm:
//!
//! - [`hypergraph`]: r-uniform hypergraphs, tuples, tight paths/cycles,
//!   exact 1-density.
//! - [`exposure`]: seeded per-r-set coins, the expose ledger, and the
//!   five-round split of an explicit input graph.
//! - [`reservoir`]: the absorbing gadget with its reservoir vertex and both
//!   stored Hamilton paths, plus density certification.
//! - [`connector`]: fan growth and pairwise tight-path connection under
//!   fresh-exposure discipline.
//! - [`pipeline`]: the five-step end-to-end search for a tight Hamilton
//!   cycle, and the disjoint-cycles variant.
//! - [`oracle`]: independent brute-force verifiers and small-instance
//!   oracles used by tests and final self-verification.

pub mod connector;
pub mod exposure;
pub mod gen;
pub mod hypergraph;
pub mod io;
pub mod oracle;
pub mod pipeline;
pub mod reservoir;
pub mod set;

pub use hypergraph::{RUniformHypergraph, TightCycle, TightPath};
