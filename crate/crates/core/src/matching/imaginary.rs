//! High-girth matching pipeline: sparsify to degree d', then run the
//! bounded greedy resolution on an imaginary completion in which every
//! deficit edge leads into a fresh, lazily generated d'-regular tree.
//! Imaginary vertex identities and ranks are pure functions of the seed and
//! the anchoring edge, so concurrent sessions walking into the same subtree
//! see identical structure. A traversal entering a real vertex whose
//! surviving degree exceeds d' treats the entering edge as imaginary and
//! continues inside a fresh subtree instead.

use std::collections::HashMap;

use super::rg::bounded_rg_lca_query;
use super::sparsify::{SparsifiedView, SparsifyParams};
use super::{MatchDecision, MatchError, MatchVerdict, RankSeed};
use crate::graph::{Graph, Vertex};
use crate::mix::{mix64, GAMMA};
use crate::probe::{BudgetKind, ProbeError, ProbeSession};

const SALT_DEFICIT: u64 = 0x0def_1c17;
const SALT_REROUTE: u64 = 0x4e40_07e5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum GNode {
    Real(Vertex),
    Imag(u64),
}

/// An edge of the completed graph. Real-real edges keep their canonical id;
/// any edge with an imaginary endpoint is identified by the deeper endpoint
/// (unique, because imaginary vertices form trees).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct EdgeRef {
    a: GNode,
    b: GNode,
    key: u64,
}

struct ImagCtx<'a, 'b, 'g> {
    session: &'b mut ProbeSession<'a>,
    view: &'b SparsifiedView<'g>,
    rs: &'b RankSeed,
    d_prime: u32,
    /// Parent edge of each imaginary vertex seen so far.
    parent_edge: HashMap<u64, EdgeRef>,
    expanded: std::collections::HashSet<GNode>,
    /// Real probes plus imaginary expansions, capped.
    work: u64,
    cap: u64,
    memo: HashMap<u64, bool>,
}

impl ImagCtx<'_, '_, '_> {
    fn charge(&mut self, node: GNode) -> Result<(), ProbeError> {
        if self.expanded.insert(node) {
            self.work += 1;
            if self.work > self.cap {
                return Err(ProbeError::BudgetExceeded { kind: BudgetKind::Strong, limit: self.cap });
            }
        }
        Ok(())
    }

    fn child_id(&self, parent: u64, idx: u32) -> u64 {
        mix64(parent ^ (idx as u64 + 1).wrapping_mul(GAMMA))
    }

    fn deficit_root_id(&self, v: Vertex, slot: u32) -> u64 {
        mix64(
            SALT_DEFICIT
                ^ self.view.params.seed
                ^ mix64(v as u64)
                ^ (slot as u64 + 1).wrapping_mul(GAMMA),
        )
    }

    fn reroute_id(&self, via_key: u64, v: Vertex) -> u64 {
        mix64(SALT_REROUTE ^ self.view.params.seed ^ via_key ^ mix64(v as u64))
    }

    /// Children edges of the imaginary vertex `x` (degree d': one parent
    /// edge plus d'-1 children).
    fn imag_children(&mut self, x: u64) -> Vec<EdgeRef> {
        (0..self.d_prime - 1)
            .map(|i| {
                let c = self.child_id(x, i);
                let e = EdgeRef { a: GNode::Imag(x), b: GNode::Imag(c), key: c };
                self.parent_edge.insert(c, e);
                e
            })
            .collect()
    }

    /// Adjacent edges of `via` at endpoint `node`, excluding `via` itself.
    fn expand(&mut self, node: GNode, via: EdgeRef) -> Result<Vec<EdgeRef>, ProbeError> {
        self.charge(node)?;
        match node {
            GNode::Real(v) => {
                let row = self.session.strong_probe_cached(v)?;
                let surviving = self.view.surviving_from_row(v, &row);
                if surviving.len() > self.d_prime as usize {
                    // Over-degree vertex entered mid-walk: the entering edge
                    // leads into a fresh subtree instead.
                    let z = self.reroute_id(via.key, v);
                    let other = if via.a == node { via.b } else { via.a };
                    self.parent_edge.insert(z, EdgeRef { a: other, b: GNode::Imag(z), key: via.key });
                    return Ok(self.imag_children(z));
                }
                let mut edges = Vec::with_capacity(self.d_prime as usize);
                for w in surviving.iter().copied() {
                    let key = self.view.graph.edge_id(v, w);
                    if key == via.key {
                        continue;
                    }
                    edges.push(EdgeRef { a: GNode::Real(v), b: GNode::Real(w), key });
                }
                let deficit = self.d_prime as usize - surviving.len();
                for j in 0..deficit as u32 {
                    let r = self.deficit_root_id(v, j);
                    let e = EdgeRef { a: GNode::Real(v), b: GNode::Imag(r), key: r };
                    self.parent_edge.insert(r, e);
                    if e.key != via.key {
                        edges.push(e);
                    }
                }
                Ok(edges)
            }
            GNode::Imag(x) => {
                let parent = *self.parent_edge.get(&x).expect("imaginary vertex reached without parent");
                let mut edges = self.imag_children(x);
                if parent.key != via.key {
                    edges.push(parent);
                }
                edges.retain(|e| e.key != via.key);
                Ok(edges)
            }
        }
    }

    /// Greedy resolution over the completed graph: matched iff every
    /// adjacent lower-ranked edge is unmatched.
    fn resolve(&mut self, e: EdgeRef) -> Result<bool, ProbeError> {
        if let Some(&m) = self.memo.get(&e.key) {
            return Ok(m);
        }
        let my_key = self.rs.key_of_id(e.key);
        let mut adjacent = self.expand(e.a, e)?;
        adjacent.extend(self.expand(e.b, e)?);
        let mut lower: Vec<((u64, u64), EdgeRef)> = adjacent
            .into_iter()
            .map(|f| (self.rs.key_of_id(f.key), f))
            .filter(|&(k, _)| k < my_key)
            .collect();
        lower.sort_unstable_by_key(|&(k, _)| k);
        lower.dedup_by_key(|&mut (k, _)| k);
        for (_, f) in lower {
            if self.resolve(f)? {
                self.memo.insert(e.key, false);
                return Ok(false);
            }
        }
        self.memo.insert(e.key, true);
        Ok(true)
    }
}

/// Bounded greedy matching query on the sparsified-and-completed graph,
/// with explicit sparsification parameters. Probes to imaginary vertices
/// are virtual: they count toward the work cap but not toward the strong
/// probes reported against the base graph.
pub fn high_girth_with_params(
    graph: &Graph,
    e: (Vertex, Vertex),
    params: SparsifyParams,
    rs: &RankSeed,
    cap: u64,
) -> Result<MatchDecision, MatchError> {
    let view = SparsifiedView::new(graph, params);
    let mut session = ProbeSession::new(graph);
    let row = session.strong_probe_cached(e.0)?;
    if !row.contains(&e.1) {
        return Err(MatchError::EdgeNotPresent(e.0, e.1));
    }
    // Queries address edges of the sparsified graph; everything else is
    // unmatched by definition.
    if !view.survives(e.0, e.1) {
        return Ok(MatchDecision { edge: e, verdict: MatchVerdict::Unmatched, stats: session.stats() });
    }
    let d_prime = params.d_prime();
    for end in [e.0, e.1] {
        let r = session.strong_probe_cached(end)?;
        if view.surviving_from_row(end, &r).len() > d_prime as usize {
            return Ok(MatchDecision {
                edge: e,
                verdict: MatchVerdict::Unmatched,
                stats: session.stats(),
            });
        }
    }
    let mut ctx = ImagCtx {
        session: &mut session,
        view: &view,
        rs,
        d_prime,
        parent_edge: HashMap::new(),
        expanded: std::collections::HashSet::new(),
        work: 0,
        cap,
        memo: HashMap::new(),
    };
    let root = EdgeRef { a: GNode::Real(e.0), b: GNode::Real(e.1), key: graph.edge_id(e.0, e.1) };
    let outcome = ctx.resolve(root);
    drop(ctx);
    let stats = session.stats();
    match outcome {
        Ok(true) => Ok(MatchDecision { edge: e, verdict: MatchVerdict::Matched, stats }),
        Ok(false) => Ok(MatchDecision { edge: e, verdict: MatchVerdict::Unmatched, stats }),
        Err(ProbeError::BudgetExceeded { .. }) => {
            Ok(MatchDecision { edge: e, verdict: MatchVerdict::UnmatchedByBudget, stats })
        }
        Err(err) => Err(err.into()),
    }
}

/// The high-girth pipeline. Low-degree inputs bypass sparsification and run
/// the capped greedy directly (cap d^2/eps); higher degrees sparsify with
/// t = min(ceil(1/eps^3), girth/10) and run on the imaginary completion
/// with cap d'^(7/3).
pub fn high_girth_matching_lca(
    graph: &Graph,
    e: (Vertex, Vertex),
    eps: f64,
    girth: u32,
    rs: &RankSeed,
    sparsify_seed: u64,
    strict: bool,
) -> Result<MatchDecision, MatchError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(MatchError::EpsOutOfRange(eps));
    }
    let d = graph.max_degree();
    if (d as f64) <= 1.0 / (eps * eps * eps) {
        let cap = ((d as f64) * (d as f64) / eps).ceil() as u64;
        return bounded_rg_lca_query(graph, e, rs, cap.max(1));
    }
    let t_girth = girth / 10;
    if t_girth < 1 && strict {
        return Err(MatchError::GirthTooSmall { girth });
    }
    let t = ((1.0 / (eps * eps * eps)).ceil() as u32).min(t_girth.max(1));
    let params = SparsifyParams::high_girth(t, d, sparsify_seed);
    let cap = ((params.d_prime() as f64).powf(7.0 / 3.0)).ceil() as u64;
    high_girth_with_params(graph, e, params, rs, cap)
}
