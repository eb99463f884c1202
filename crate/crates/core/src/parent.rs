//! Parent-selection schemes and the directed structure they induce.
//!
//! Each scheme gives every non-isolated vertex one outgoing "parent" edge;
//! the resulting functional digraph decomposes into components that each
//! carry exactly one cycle. The coloring LCAs walk these chains, and the
//! bench harness measures how long the chains get under each scheme.

use crate::graph::{CellContent, Graph, Vertex};
use crate::mix::mix64;
use crate::probe::{ProbeError, ProbeSession};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Deterministic: the neighbor at port 1. One weak probe.
    Arbitrary,
    /// Neighbor of smallest ID.
    LowestNeighbor,
    /// Smallest ID in the closed neighborhood; may pick the vertex itself.
    LowestId,
    /// Uniformly random neighbor (seed-derived port).
    Random,
    /// Lowest neighbor under seed-derived 64-bit ranks.
    RandomLowestNeighbor,
    /// Lowest closed-neighborhood vertex under ranks.
    RandomLowestId,
}

impl Scheme {
    pub fn parse(s: &str) -> Option<Scheme> {
        Some(match s {
            "arbitrary" => Scheme::Arbitrary,
            "lowest-neighbor" => Scheme::LowestNeighbor,
            "lowest-id" => Scheme::LowestId,
            "random" => Scheme::Random,
            "random-lowest-neighbor" => Scheme::RandomLowestNeighbor,
            "random-lowest-id" => Scheme::RandomLowestId,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Arbitrary => "arbitrary",
            Scheme::LowestNeighbor => "lowest-neighbor",
            Scheme::LowestId => "lowest-id",
            Scheme::Random => "random",
            Scheme::RandomLowestNeighbor => "random-lowest-neighbor",
            Scheme::RandomLowestId => "random-lowest-id",
        }
    }

    pub fn needs_ranks(&self) -> bool {
        matches!(self, Scheme::Random | Scheme::RandomLowestNeighbor | Scheme::RandomLowestId)
    }
}

/// Deterministic per-vertex 64-bit ranks standing in for random IDs.
/// Collisions (astronomically unlikely) break toward the original ID.
#[derive(Clone, Copy, Debug)]
pub struct RankAssignment {
    pub seed: u64,
}

impl RankAssignment {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    #[inline]
    pub fn rank(&self, v: Vertex) -> u64 {
        mix64(self.seed ^ v as u64)
    }

    #[inline]
    pub fn key(&self, v: Vertex) -> (u64, Vertex) {
        (self.rank(v), v)
    }
}

/// Parent map materialized for global verification. LCAs never build this;
/// they walk lazily through probe sessions.
#[derive(Clone, Debug)]
pub struct ParentAssignment {
    pub scheme: Scheme,
    /// parent[v-1]; equal to v itself only under the LowestId schemes.
    pub parent: Vec<Vertex>,
}

impl ParentAssignment {
    pub fn parent_of(&self, v: Vertex) -> Vertex {
        self.parent[v as usize - 1]
    }
}

fn pick_parent(row: &[Vertex], v: Vertex, scheme: Scheme, ranks: Option<&RankAssignment>) -> Vertex {
    match scheme {
        Scheme::Arbitrary => row[0],
        Scheme::LowestNeighbor => *row.iter().min().unwrap(),
        Scheme::LowestId => (*row.iter().min().unwrap()).min(v),
        Scheme::Random => {
            let r = ranks.expect("Random scheme needs ranks");
            let port = mix64(r.seed ^ mix64(v as u64)) % row.len() as u64;
            row[port as usize]
        }
        Scheme::RandomLowestNeighbor => {
            let r = ranks.expect("RandomLowestNeighbor needs ranks");
            *row.iter().min_by_key(|&&w| r.key(w)).unwrap()
        }
        Scheme::RandomLowestId => {
            let r = ranks.expect("RandomLowestId needs ranks");
            let best = *row.iter().min_by_key(|&&w| r.key(w)).unwrap();
            if r.key(v) < r.key(best) {
                v
            } else {
                best
            }
        }
    }
}

/// Select `v`'s parent through a probe session.
///
/// Probe costs: Arbitrary is one weak probe (port 1). Random is two weak
/// probes (degree cell, then a seed-derived port). The lowest-* schemes need
/// the whole row: one strong probe in strong mode, `d_v + 1` weak probes in
/// weak mode.
pub fn select_parent(
    session: &mut ProbeSession<'_>,
    v: Vertex,
    scheme: Scheme,
    ranks: Option<&RankAssignment>,
    strong_mode: bool,
) -> Result<Vertex, ProbeError> {
    match scheme {
        Scheme::Arbitrary => match session.weak_probe(v, 1)? {
            CellContent::Neighbor(w) => Ok(w),
            _ => Err(ProbeError::IsolatedVertex(v)),
        },
        Scheme::Random => {
            let d = match session.weak_probe(v, 0)? {
                CellContent::Degree(0) => return Err(ProbeError::IsolatedVertex(v)),
                CellContent::Degree(d) => d,
                _ => unreachable!(),
            };
            let r = ranks.expect("Random scheme needs ranks");
            let port = 1 + (mix64(r.seed ^ mix64(v as u64)) % d as u64) as u32;
            match session.weak_probe(v, port)? {
                CellContent::Neighbor(w) => Ok(w),
                _ => unreachable!("port within degree"),
            }
        }
        _ => {
            let row = if strong_mode {
                session.strong_probe_cached(v)?
            } else {
                crate::probe::strong_via_weak(session, v)?
            };
            if row.is_empty() {
                return Err(ProbeError::IsolatedVertex(v));
            }
            Ok(pick_parent(&row, v, scheme, ranks))
        }
    }
}

/// Materialize the whole parent map without probe accounting.
pub fn assign_parents(
    g: &Graph,
    scheme: Scheme,
    ranks: Option<&RankAssignment>,
) -> Result<ParentAssignment, ProbeError> {
    let mut parent = Vec::with_capacity(g.n() as usize);
    for v in g.vertices() {
        let row = g.row(v);
        if row.is_empty() {
            return Err(ProbeError::IsolatedVertex(v));
        }
        parent.push(pick_parent(row, v, scheme, ranks));
    }
    Ok(ParentAssignment { scheme, parent })
}

/// Result of following the parent chain from one vertex until it closes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainWalk {
    /// `v, p(v), p(p(v)), ...` without repetition.
    pub path: Vec<Vertex>,
    /// Index in `path` where the terminal cycle begins.
    pub cycle_entry: usize,
}

impl ChainWalk {
    pub fn cycle_len(&self) -> usize {
        self.path.len() - self.cycle_entry
    }
}

/// Follow the directed path from `v` until a vertex repeats, probing per the
/// scheme's cost model.
pub fn follow_to_cycle(
    session: &mut ProbeSession<'_>,
    v: Vertex,
    scheme: Scheme,
    ranks: Option<&RankAssignment>,
    strong_mode: bool,
) -> Result<ChainWalk, ProbeError> {
    let mut path = vec![v];
    let mut index = std::collections::HashMap::new();
    index.insert(v, 0usize);
    let mut u = v;
    loop {
        let p = select_parent(session, u, scheme, ranks, strong_mode)?;
        if let Some(&at) = index.get(&p) {
            return Ok(ChainWalk { path, cycle_entry: at });
        }
        index.insert(p, path.len());
        path.push(p);
        u = p;
    }
}

/// Walk the materialized parent map from `v`; no probe accounting.
pub fn walk_parents(pa: &ParentAssignment, v: Vertex) -> ChainWalk {
    let mut path = vec![v];
    let mut index = std::collections::HashMap::new();
    index.insert(v, 0usize);
    let mut u = v;
    loop {
        let p = pa.parent_of(u);
        if let Some(&at) = index.get(&p) {
            return ChainWalk { path, cycle_entry: at };
        }
        index.insert(p, path.len());
        path.push(p);
        u = p;
    }
}

/// Longest directed path length (in parent steps until a repeat) over all
/// starting vertices.
pub fn max_directed_path_len(g: &Graph, pa: &ParentAssignment) -> usize {
    g.vertices().map(|v| walk_parents(pa, v).path.len() - 1).max().unwrap_or(0)
}

/// Unicyclic decomposition check: in every weakly-connected component of the
/// parent digraph, #edges == #vertices (self-loops counted).
pub fn check_unicyclic(g: &Graph, pa: &ParentAssignment) -> bool {
    let n = g.n() as usize;
    // Union-find over the undirected support of the parent edges.
    let mut dsu: Vec<u32> = (0..=n as u32).collect();
    fn find(dsu: &mut [u32], mut x: u32) -> u32 {
        while dsu[x as usize] != x {
            dsu[x as usize] = dsu[dsu[x as usize] as usize];
            x = dsu[x as usize];
        }
        x
    }
    for v in g.vertices() {
        let p = pa.parent_of(v);
        let (a, b) = (find(&mut dsu, v), find(&mut dsu, p));
        if a != b {
            dsu[a as usize] = b;
        }
    }
    let mut vertices = std::collections::HashMap::new();
    let mut edges = std::collections::HashMap::new();
    for v in g.vertices() {
        let root = find(&mut dsu, v);
        *vertices.entry(root).or_insert(0usize) += 1;
        *edges.entry(find(&mut dsu, pa.parent_of(v))).or_insert(0usize) += 1;
    }
    vertices.iter().all(|(root, &cnt)| edges.get(root) == Some(&cnt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PortOrder;
    use crate::instances::{generate, ring_edges, InstanceSpec};

    fn path_graph() -> Graph {
        // Path 3 - 1 - 2 by IDs.
        Graph::build(3, &[(3, 1), (1, 2)], PortOrder::Insertion).unwrap()
    }

    #[test]
    fn lowest_neighbor_and_lowest_id() {
        let g = path_graph();
        let mut s = ProbeSession::new(&g);
        assert_eq!(select_parent(&mut s, 1, Scheme::LowestNeighbor, None, true).unwrap(), 2);
        assert_eq!(select_parent(&mut s, 1, Scheme::LowestId, None, true).unwrap(), 1);
    }

    #[test]
    fn arbitrary_is_port_one() {
        let g = path_graph();
        let mut s = ProbeSession::new(&g);
        assert_eq!(select_parent(&mut s, 1, Scheme::Arbitrary, None, false).unwrap(), 3);
        assert_eq!(s.stats().weak, 1);
    }

    #[test]
    fn random_scheme_is_near_uniform() {
        // Degree-8 vertex; across 10^5 seeds each neighbor should be chosen
        // with frequency 1/8 within 3 sigma of the binomial count.
        let edges: Vec<_> = (2..=9u32).map(|w| (1, w)).collect();
        let g = Graph::build(9, &edges, PortOrder::Insertion).unwrap();
        let trials = 100_000u64;
        let mut counts = [0u64; 8];
        for seed in 0..trials {
            let ranks = RankAssignment::new(seed);
            let pa = assign_parents(&g, Scheme::Random, Some(&ranks)).unwrap();
            counts[pa.parent_of(1) as usize - 2] += 1;
        }
        let expect = trials as f64 / 8.0;
        let sigma = (trials as f64 * (1.0 / 8.0) * (7.0 / 8.0)).sqrt();
        for c in counts {
            assert!(
                (c as f64 - expect).abs() <= 3.0 * sigma,
                "count {c} vs expected {expect} +- {}",
                3.0 * sigma
            );
        }
    }

    #[test]
    fn path_with_hub_lowest_id_walk() {
        let n = 64;
        let inst = generate(&InstanceSpec::path_with_hub(n)).unwrap();
        let g = inst.graph;
        // Start at the vertex with ID n-1 (an endpoint of the buried path).
        let mut s = ProbeSession::new(&g);
        let walk = follow_to_cycle(&mut s, (n - 1) as Vertex, Scheme::LowestId, None, true).unwrap();
        // Descends n-1, n-2, ..., 1 then self-loops: n-2 steps of progress.
        assert_eq!(walk.path.len() - 1, n as usize - 2);
        assert_eq!(walk.cycle_entry, walk.path.len() - 1);
        assert_eq!(walk.cycle_len(), 1);
    }

    #[test]
    fn terminal_cycle_lengths() {
        for seed in 0..5u64 {
            let inst = generate(&InstanceSpec::random_regular(64, 4, seed)).unwrap();
            let g = inst.graph;
            for v in [1u32, 7, 33] {
                let mut s = ProbeSession::new(&g);
                let w = follow_to_cycle(&mut s, v, Scheme::LowestNeighbor, None, true).unwrap();
                assert_eq!(w.cycle_len(), 2, "lowest-neighbor terminal cycle");
                let mut s = ProbeSession::new(&g);
                let w = follow_to_cycle(&mut s, v, Scheme::LowestId, None, true).unwrap();
                assert_eq!(w.cycle_len(), 1, "lowest-id self-loop");
            }
        }
    }

    #[test]
    fn unicyclic_everywhere() {
        let ring = Graph::build(9, &ring_edges(9), PortOrder::Insertion).unwrap();
        let reg = generate(&InstanceSpec::random_regular(48, 4, 3)).unwrap().graph;
        let ranks = RankAssignment::new(11);
        for g in [&ring, &reg] {
            for scheme in [
                Scheme::Arbitrary,
                Scheme::LowestNeighbor,
                Scheme::LowestId,
                Scheme::Random,
                Scheme::RandomLowestNeighbor,
                Scheme::RandomLowestId,
            ] {
                let pa = assign_parents(g, scheme, Some(&ranks)).unwrap();
                assert!(check_unicyclic(g, &pa), "scheme {scheme:?}");
            }
        }
    }

    #[test]
    fn lowest_id_ids_non_increasing() {
        let g = generate(&InstanceSpec::random_regular(60, 5, 9)).unwrap().graph;
        let pa = assign_parents(&g, Scheme::LowestId, None).unwrap();
        for v in g.vertices() {
            let w = walk_parents(&pa, v);
            for pair in w.path.windows(2) {
                // Strictly decreasing: the walk stops before the self-loop repeats.
                assert!(pair[1] < pair[0]);
            }
        }
    }

    #[test]
    fn lowest_neighbor_alternating_non_increasing() {
        let g = generate(&InstanceSpec::random_regular(60, 5, 10)).unwrap().graph;
        let pa = assign_parents(&g, Scheme::LowestNeighbor, None).unwrap();
        for v in g.vertices() {
            let w = walk_parents(&pa, v);
            for (i, pair) in w.path.windows(3).enumerate() {
                let _ = i;
                assert!(pair[2] <= pair[0], "even/odd subsequence non-increasing");
            }
        }
    }

    #[test]
    fn isolated_vertex_rejected() {
        let g = Graph::build(3, &[(1, 2)], PortOrder::Insertion).unwrap();
        let mut s = ProbeSession::new(&g);
        assert!(matches!(
            select_parent(&mut s, 3, Scheme::Arbitrary, None, false),
            Err(ProbeError::IsolatedVertex(3))
        ));
    }
}
