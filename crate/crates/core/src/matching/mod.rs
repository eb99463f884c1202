//! Matching LCAs: rank-based randomized greedy with and without probe caps,
//! degree-reducing sparsification with probe simulation, the high-girth
//! pipeline over an imaginary regular completion, and the augmenting-path
//! phase hierarchy.

mod imaginary;
mod phase;
mod rg;
mod sparsify;

pub use imaginary::{high_girth_matching_lca, high_girth_with_params};
pub use phase::{
    global_phase_matching, phase_matching_lca, phase_sweep, PhaseInfo, PhaseParams, PhaseRun,
};
pub use rg::{bounded_rg_lca_query, global_greedy_matching, rg_lca_query};
pub use sparsify::{
    regular_matching_lca, regular_matching_sweep, sparsified_probe, SparseReply, SparsifiedView,
    SparsifyParams, SparsifyVariant,
};

use crate::graph::{Graph, Vertex};
use crate::mix::mix64;
use crate::probe::{ProbeError, ProbeStats};

#[derive(Debug, thiserror::Error, PartialEq, Clone)]
pub enum MatchError {
    #[error("edge ({0}, {1}) not present")]
    EdgeNotPresent(Vertex, Vertex),
    #[error("eps {0} outside (0, 1/2)")]
    EpsOutOfRange(f64),
    #[error("girth {girth} too small for sparsification parameter t >= 1 (needs girth >= 10)")]
    GirthTooSmall { girth: u32 },
    #[error(transparent)]
    Probe(#[from] ProbeError),
}

/// Deterministic 64-bit edge ranks; the random permutation over the edges.
/// Ties (never observed at 64 bits) break toward the canonical edge id.
#[derive(Clone, Copy, Debug)]
pub struct RankSeed {
    pub seed: u64,
}

impl RankSeed {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    #[inline]
    pub fn rank_of_id(&self, edge_id: u64) -> u64 {
        mix64(self.seed ^ edge_id)
    }

    /// Total order over edges: (rank, canonical id).
    #[inline]
    pub fn key_of_id(&self, edge_id: u64) -> (u64, u64) {
        (self.rank_of_id(edge_id), edge_id)
    }

    #[inline]
    pub fn key(&self, g: &Graph, u: Vertex, v: Vertex) -> (u64, u64) {
        self.key_of_id(g.edge_id(u, v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchVerdict {
    Matched,
    Unmatched,
    /// Only the probe-capped variants produce this.
    UnmatchedByBudget,
}

impl MatchVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            MatchVerdict::Matched => "matched",
            MatchVerdict::Unmatched => "unmatched",
            MatchVerdict::UnmatchedByBudget => "unmatched-by-budget",
        }
    }
}

/// One edge query's outcome with the probes it spent.
#[derive(Clone, Debug)]
pub struct MatchDecision {
    pub edge: (Vertex, Vertex),
    pub verdict: MatchVerdict,
    pub stats: ProbeStats,
}

impl From<MatchVerdict> for crate::verify::EdgeVerdict {
    fn from(v: MatchVerdict) -> Self {
        match v {
            MatchVerdict::Matched => crate::verify::EdgeVerdict::Matched,
            MatchVerdict::Unmatched => crate::verify::EdgeVerdict::Unmatched,
            MatchVerdict::UnmatchedByBudget => crate::verify::EdgeVerdict::UnmatchedByBudget,
        }
    }
}
