//! Local computation algorithms under an explicit strong/weak probe model.
//!
//! The crate provides:
//!
//! - a port-numbered immutable [`graph::Graph`] matching the probe model's
//!   two-dimensional array presentation,
//! - [`probe::ProbeSession`], which mediates all graph access for an LCA
//!   query, counts strong and weak probes, enforces budgets, and records the
//!   revealed view for replay checks,
//! - the parent-selection schemes and chain walks of [`parent`],
//! - benchmark and adversarial instance generators in [`instances`],
//! - weak 3- and 2-coloring LCAs in [`coloring`],
//! - greedy-matching LCAs, sparsification, and the augmenting-path phase
//!   hierarchy in [`matching`],
//! - global verifiers and exact matching oracles in [`verify`],
//! - the experiment harness in [`bench`].

pub mod bench;
pub mod coloring;
pub mod graph;
pub mod instances;
pub mod matching;
pub mod mix;
pub mod parent;
pub mod probe;
pub mod verify;

pub use graph::{CellContent, Graph, GraphError, PortOrder, Vertex};
pub use probe::{BudgetKind, ProbeError, ProbeSession, ProbeStats};
