//! Degree-reducing sparsification with probe simulation.
//!
//! An edge survives independently with a seed-derived probability; a vertex
//! stays alive while at most `q` of its edges survive. A strong probe into
//! the sparsified graph costs at most `q + 1` strong probes to the base
//! graph: one for the vertex, one per surviving neighbor to check its
//! aliveness. The bipartite variant first splits the vertices into two
//! random sides and keeps only crossing edges.

use std::collections::HashMap;

use super::phase::{phase_matching_lca, PhaseParams};
use super::{MatchDecision, MatchError, MatchVerdict, RankSeed};
use crate::graph::{Graph, Vertex};
use crate::mix::{bernoulli, mix64};
use crate::probe::{ProbeError, ProbeSession};

const SALT_SURVIVE: u64 = 0x51e5_a11f;
const SALT_SIDE: u64 = 0x51de_0001;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SparsifyVariant {
    /// Survival q/(2d), degree cap q.
    Regular,
    /// Random side split, survival q/d among crossing edges, degree cap q.
    Bipartite,
    /// Survival t/d, degree cap d' = t + ceil(t^(2/3)); the high-girth
    /// pipeline completes deficits with imaginary trees.
    HighGirth,
}

#[derive(Clone, Copy, Debug)]
pub struct SparsifyParams {
    pub variant: SparsifyVariant,
    /// Degree cap: q for Regular/Bipartite, d' for HighGirth.
    pub cap: u32,
    pub survival_p: f64,
    pub t: u32,
    pub seed: u64,
}

impl SparsifyParams {
    pub fn regular(q: u32, d: u32, seed: u64) -> Self {
        assert!(q >= 1 && d >= 1);
        Self {
            variant: SparsifyVariant::Regular,
            cap: q,
            survival_p: (q as f64 / (2.0 * d as f64)).min(1.0),
            t: 0,
            seed,
        }
    }

    pub fn bipartite(q: u32, d: u32, seed: u64) -> Self {
        assert!(q >= 1 && d >= 1);
        Self {
            variant: SparsifyVariant::Bipartite,
            cap: q,
            survival_p: (q as f64 / d as f64).min(1.0),
            t: 0,
            seed,
        }
    }

    /// High-girth parameters: `t` capped by girth/10, d' = t + ceil(t^(2/3)).
    pub fn high_girth(t: u32, d: u32, seed: u64) -> Self {
        assert!(t >= 1 && d >= 1);
        let d_prime = t + (t as f64).powf(2.0 / 3.0).ceil() as u32;
        Self {
            variant: SparsifyVariant::HighGirth,
            cap: d_prime,
            survival_p: (t as f64 / d as f64).min(1.0),
            t,
            seed,
        }
    }

    pub fn d_prime(&self) -> u32 {
        debug_assert_eq!(self.variant, SparsifyVariant::HighGirth);
        self.cap
    }
}

/// Pure predicates over the base graph: which edges survive and which
/// vertices stay alive. Deterministic in (seed, edge/vertex), so every
/// session sees the same sparsified graph.
pub struct SparsifiedView<'g> {
    pub graph: &'g Graph,
    pub params: SparsifyParams,
}

impl<'g> SparsifiedView<'g> {
    pub fn new(graph: &'g Graph, params: SparsifyParams) -> Self {
        Self { graph, params }
    }

    /// Random side bit (bipartite variant).
    pub fn side(&self, v: Vertex) -> u8 {
        (mix64(self.params.seed ^ SALT_SIDE ^ ((v as u64) << 20)) & 1) as u8
    }

    pub fn survives(&self, u: Vertex, v: Vertex) -> bool {
        if self.params.variant == SparsifyVariant::Bipartite && self.side(u) == self.side(v) {
            return false;
        }
        let id = self.graph.edge_id(u, v);
        bernoulli(mix64(self.params.seed ^ SALT_SURVIVE ^ id), self.params.survival_p)
    }

    /// Surviving incident edges computed from a known row.
    pub fn surviving_from_row(&self, v: Vertex, row: &[Vertex]) -> Vec<Vertex> {
        row.iter().copied().filter(|&w| self.survives(v, w)).collect()
    }

    /// Oracle-side aliveness (no probe accounting); the probe-simulating
    /// path is [`sparsified_probe`].
    pub fn alive(&self, v: Vertex) -> bool {
        self.surviving_from_row(v, self.graph.row(v)).len() <= self.params.cap as usize
    }

    /// Oracle-side neighbor list in the sparsified graph.
    pub fn sparsified_row(&self, v: Vertex) -> Vec<Vertex> {
        if !self.alive(v) {
            return Vec::new();
        }
        self.surviving_from_row(v, self.graph.row(v))
            .into_iter()
            .filter(|&w| self.alive(w))
            .collect()
    }
}

/// Reply to a strong probe against the sparsified graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseReply {
    /// False: the vertex exceeded the degree cap and is not in the
    /// sparsified graph.
    pub alive: bool,
    /// Alive surviving neighbors (empty when `alive` is false).
    pub neighbors: Vec<Vertex>,
}

/// One strong probe of the sparsified graph, implemented by at most `q + 1`
/// strong probes to the base graph (hard assertion): one for the vertex, and
/// one per surviving neighbor to test the neighbor's aliveness.
pub fn sparsified_probe(
    session: &mut ProbeSession<'_>,
    v: Vertex,
    view: &SparsifiedView<'_>,
) -> Result<SparseReply, ProbeError> {
    let before = session.stats().strong;
    let q = view.params.cap as usize;
    let row = session.strong_probe_cached(v)?;
    let surviving = view.surviving_from_row(v, &row);
    let reply = if surviving.len() > q {
        SparseReply { alive: false, neighbors: Vec::new() }
    } else {
        let mut neighbors = Vec::with_capacity(surviving.len());
        for w in surviving {
            let w_row = session.strong_probe_cached(w)?;
            if view.surviving_from_row(w, &w_row).len() <= q {
                neighbors.push(w);
            }
        }
        SparseReply { alive: true, neighbors }
    };
    let spent = session.stats().strong - before;
    assert!(spent <= q as u64 + 1, "sparsified probe spent {spent} > q+1 = {}", q + 1);
    Ok(reply)
}

/// Adjacency provider for the phase hierarchy: either the base graph or a
/// sparsified view, with session-local caching so a vertex is expanded once.
pub(super) enum Adjacency<'g> {
    Direct,
    Sparsified(SparsifiedView<'g>),
}

pub(super) struct AdjCache<'g> {
    pub adj: Adjacency<'g>,
    rows: HashMap<Vertex, Vec<Vertex>>,
}

impl<'g> AdjCache<'g> {
    pub fn direct() -> Self {
        Self { adj: Adjacency::Direct, rows: HashMap::new() }
    }

    pub fn sparsified(view: SparsifiedView<'g>) -> Self {
        Self { adj: Adjacency::Sparsified(view), rows: HashMap::new() }
    }

    pub fn neighbors(
        &mut self,
        session: &mut ProbeSession<'_>,
        v: Vertex,
    ) -> Result<Vec<Vertex>, ProbeError> {
        if let Some(row) = self.rows.get(&v) {
            return Ok(row.clone());
        }
        let row = match &self.adj {
            Adjacency::Direct => session.strong_probe_cached(v)?,
            Adjacency::Sparsified(view) => sparsified_probe(session, v, view)?.neighbors,
        };
        self.rows.insert(v, row.clone());
        Ok(row)
    }
}

/// Matching LCA for (approximately) regular graphs: run the phase hierarchy
/// directly when the degree is already small, otherwise answer on the
/// sparsified graph ("in the sparsified graph" translates back verbatim: an
/// edge absent there is unmatched).
pub fn regular_matching_lca(
    graph: &Graph,
    e: (Vertex, Vertex),
    eps: f64,
    rs: &RankSeed,
    sparsify_seed: u64,
    q_override: Option<u32>,
    cap_override: Option<u64>,
) -> Result<MatchDecision, MatchError> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(MatchError::EpsOutOfRange(eps));
    }
    let d = graph.max_degree();
    let d_eps = (1.0 / eps).ceil() as u32;
    let params = PhaseParams::new(eps, d, cap_override);
    if d <= d_eps {
        let mut session = ProbeSession::new(graph);
        return phase_matching_lca(&mut session, e, &params, rs, None);
    }
    let q = q_override.unwrap_or_else(|| (17.0 / eps).ceil() as u32);
    let view = SparsifiedView::new(graph, SparsifyParams::regular(q, d, sparsify_seed));
    let mut session = ProbeSession::new(graph);
    // Edge present in the sparsified graph? The endpoint probes double as
    // the aliveness checks.
    let row = session.strong_probe_cached(e.0)?;
    if !row.contains(&e.1) {
        return Err(MatchError::EdgeNotPresent(e.0, e.1));
    }
    if !view.survives(e.0, e.1) {
        return Ok(MatchDecision { edge: e, verdict: MatchVerdict::Unmatched, stats: session.stats() });
    }
    for end in [e.0, e.1] {
        let reply = sparsified_probe(&mut session, end, &view)?;
        if !reply.alive {
            return Ok(MatchDecision {
                edge: e,
                verdict: MatchVerdict::Unmatched,
                stats: session.stats(),
            });
        }
    }
    let view = SparsifiedView::new(graph, SparsifyParams::regular(q, d, sparsify_seed));
    phase_matching_lca(&mut session, e, &params, rs, Some(view))
}

/// Sweep form of [`regular_matching_lca`]: resolves many queries through a
/// shared context. Decisions equal the per-query API's decision for decision
/// (both are pure functions of graph and seeds).
pub fn regular_matching_sweep(
    graph: &Graph,
    queries: &[(Vertex, Vertex)],
    eps: f64,
    rs: &RankSeed,
    sparsify_seed: u64,
    q_override: Option<u32>,
) -> Result<Vec<MatchVerdict>, MatchError> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(MatchError::EpsOutOfRange(eps));
    }
    let d = graph.max_degree();
    let d_eps = (1.0 / eps).ceil() as u32;
    let params = PhaseParams::new(eps, d, None);
    if d <= d_eps {
        let resolved = super::phase::phase_sweep(graph, queries, &params, rs, None)?;
        return Ok(resolved.into_iter().map(|(v, _)| v).collect());
    }
    let q = q_override.unwrap_or_else(|| (17.0 / eps).ceil() as u32);
    let view = SparsifiedView::new(graph, SparsifyParams::regular(q, d, sparsify_seed));
    let mut live = Vec::new();
    let mut verdicts = vec![MatchVerdict::Unmatched; queries.len()];
    for (i, &(u, v)) in queries.iter().enumerate() {
        if view.survives(u, v) && view.alive(u) && view.alive(v) {
            live.push((i, (u, v)));
        }
    }
    let live_edges: Vec<_> = live.iter().map(|&(_, e)| e).collect();
    let view = SparsifiedView::new(graph, SparsifyParams::regular(q, d, sparsify_seed));
    let resolved = super::phase::phase_sweep(graph, &live_edges, &params, rs, Some(view))?;
    for ((i, _), (verdict, _)) in live.into_iter().zip(resolved) {
        verdicts[i] = verdict;
    }
    Ok(verdicts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{generate, InstanceSpec};

    #[test]
    fn degenerate_parameters_keep_everything() {
        let g = generate(&InstanceSpec::random_regular(64, 4, 1)).unwrap().graph;
        // survival 1 and cap above the max degree: the sparsified graph is G.
        let params = SparsifyParams { survival_p: 1.0, ..SparsifyParams::regular(8, 4, 3) };
        let view = SparsifiedView::new(&g, params);
        for v in g.vertices() {
            let mut s = ProbeSession::new(&g);
            let reply = sparsified_probe(&mut s, v, &view).unwrap();
            assert!(reply.alive);
            let mut got = reply.neighbors.clone();
            got.sort_unstable();
            let mut want = g.row(v).to_vec();
            want.sort_unstable();
            assert_eq!(got, want);
            assert_eq!(s.stats().strong, g.degree(v) as u64 + 1, "d_v + 1 probes");
        }
    }

    #[test]
    fn overloaded_vertex_reports_dropped_in_one_probe() {
        let g = generate(&InstanceSpec::random_regular(64, 8, 2)).unwrap().graph;
        // cap 1 with survival 1: every degree-8 vertex is over the cap.
        let params = SparsifyParams { survival_p: 1.0, ..SparsifyParams::regular(1, 8, 3) };
        let view = SparsifiedView::new(&g, params);
        let mut s = ProbeSession::new(&g);
        let reply = sparsified_probe(&mut s, 1, &view).unwrap();
        assert!(!reply.alive);
        assert_eq!(s.stats().strong, 1);
    }

    #[test]
    fn survival_frequency_matches_parameter() {
        // d = 32, q = 8: survival probability q/2d = 0.125.
        let g = generate(&InstanceSpec::random_regular(1024, 32, 7)).unwrap().graph;
        let edges = g.edges();
        let mut kept = 0u64;
        let mut total = 0u64;
        for seed in 0..10u64 {
            let view = SparsifiedView::new(&g, SparsifyParams::regular(8, 32, seed));
            for &(u, v) in &edges {
                total += 1;
                if view.survives(u, v) {
                    kept += 1;
                }
            }
        }
        let freq = kept as f64 / total as f64;
        assert!((freq - 0.125).abs() < 0.01, "survival frequency {freq}");
    }

    #[test]
    fn bipartite_variant_only_keeps_crossing_edges() {
        let g = generate(&InstanceSpec::random_regular(128, 6, 4)).unwrap().graph;
        let params = SparsifyParams { survival_p: 1.0, ..SparsifyParams::bipartite(6, 6, 11) };
        let view = SparsifiedView::new(&g, params);
        for (u, v) in g.edges() {
            if view.survives(u, v) {
                assert_ne!(view.side(u), view.side(v));
            }
        }
    }
}
