//! Immutable port-numbered graphs.
//!
//! A graph is stored exactly the way the probe model presents it: one row per
//! vertex, position `j` of the row is the neighbor behind port `j` (ports are
//! 1-based; port 0 is the degree cell). Vertices are named `1..=n`. Port
//! order is a property of construction and carries no information across
//! rows: `u` sitting at port `j` of `v` says nothing about which port of `u`
//! holds `v`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use crate::mix::SplitMix64;

pub type Vertex = u32;

/// Content of one weak-probe cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellContent {
    /// Port 0: the degree of the row's vertex.
    Degree(u32),
    /// Ports `1..=d_v`: the neighbor behind that port.
    Neighbor(Vertex),
    /// Ports `d_v+1..=max_degree`: the zero sentinel.
    Zero,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("vertex {0} out of range 1..={1}")]
    VertexOutOfRange(Vertex, u32),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
}

/// How ports are assigned at construction time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PortOrder {
    /// Ports follow edge insertion order. Adversarial generators rely on this.
    Insertion,
    /// Each row independently shuffled by a seed.
    Shuffled(u64),
    /// Rows sorted by neighbor ID.
    SortedAscending,
}

#[derive(Clone)]
pub struct Graph {
    n: u32,
    rows: Vec<Vec<Vertex>>,
    max_degree: u32,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={}, d={})", self.n, self.edge_count(), self.max_degree)
    }
}

impl Graph {
    /// Build from an edge list. Endpoints must lie in `1..=n`; no self-loops
    /// or duplicate edges.
    pub fn build(n: u32, edges: &[(Vertex, Vertex)], order: PortOrder) -> Result<Graph, GraphError> {
        let mut rows: Vec<Vec<Vertex>> = vec![Vec::new(); n as usize];
        let mut seen: HashSet<(Vertex, Vertex)> = HashSet::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            for w in [u, v] {
                if w == 0 || w > n {
                    return Err(GraphError::VertexOutOfRange(w, n));
                }
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
            rows[u as usize - 1].push(v);
            rows[v as usize - 1].push(u);
        }
        match order {
            PortOrder::Insertion => {}
            PortOrder::Shuffled(seed) => {
                for (i, row) in rows.iter_mut().enumerate() {
                    let mut rng = SplitMix64::new(seed ^ crate::mix::mix64(i as u64 + 1));
                    rng.shuffle(row);
                }
            }
            PortOrder::SortedAscending => {
                for row in rows.iter_mut() {
                    row.sort_unstable();
                }
            }
        }
        let max_degree = rows.iter().map(|r| r.len() as u32).max().unwrap_or(0);
        Ok(Graph { n, rows, max_degree })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn degree(&self, v: Vertex) -> u32 {
        self.rows[v as usize - 1].len() as u32
    }

    /// Full row of `v` (the strong-probe reply).
    pub fn row(&self, v: Vertex) -> &[Vertex] {
        &self.rows[v as usize - 1]
    }

    /// Cell `(v, j)` of the probe array. `j` must be `<= max_degree`.
    pub fn cell(&self, v: Vertex, j: u32) -> CellContent {
        let row = self.row(v);
        if j == 0 {
            CellContent::Degree(row.len() as u32)
        } else if (j as usize) <= row.len() {
            CellContent::Neighbor(row[j as usize - 1])
        } else {
            CellContent::Zero
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        1..=self.n
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum::<usize>() / 2
    }

    /// Every edge once, as `(min, max)` pairs in sorted order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for v in self.vertices() {
            for &w in self.row(v) {
                if v < w {
                    out.push((v, w));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.row(a).contains(&b)
    }

    /// Canonical 64-bit edge identifier: `min * n + max` over the endpoints.
    pub fn edge_id(&self, u: Vertex, v: Vertex) -> u64 {
        let (a, b) = (u.min(v) as u64, u.max(v) as u64);
        a * self.n as u64 + b
    }

    /// Adjacency-symmetry and shape check; generators assert this.
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        for v in self.vertices() {
            let mut seen = HashSet::new();
            for &w in self.row(v) {
                if w == v {
                    return Err(GraphError::SelfLoop(v));
                }
                if w == 0 || w > self.n {
                    return Err(GraphError::VertexOutOfRange(w, self.n));
                }
                if !seen.insert(w) {
                    return Err(GraphError::DuplicateEdge(v.min(w), v.max(w)));
                }
                if !self.row(w).contains(&v) {
                    return Err(GraphError::Parse {
                        line: 0,
                        msg: format!("asymmetric adjacency: {v} lists {w} but not vice versa"),
                    });
                }
            }
        }
        let d = self.rows.iter().map(|r| r.len() as u32).max().unwrap_or(0);
        if d != self.max_degree {
            return Err(GraphError::Parse { line: 0, msg: "stale max_degree".into() });
        }
        Ok(())
    }

    /// Length of the shortest cycle, or `None` for forests.
    ///
    /// Per-vertex BFS; when an edge joins two already-reached vertices the
    /// cycle through the BFS root has length `dist(a) + dist(b) + 1`.
    pub fn girth(&self) -> Option<u32> {
        let mut best: Option<u32> = None;
        let mut dist = vec![u32::MAX; self.n as usize + 1];
        let mut parent = vec![0u32; self.n as usize + 1];
        for root in self.vertices() {
            for d in dist.iter_mut() {
                *d = u32::MAX;
            }
            dist[root as usize] = 0;
            parent[root as usize] = 0;
            let mut queue = VecDeque::new();
            queue.push_back(root);
            while let Some(v) = queue.pop_front() {
                if let Some(b) = best {
                    // Cycles through deeper layers cannot beat the best found.
                    if 2 * dist[v as usize] >= b {
                        break;
                    }
                }
                for &w in self.row(v) {
                    if w == parent[v as usize] {
                        // Skip one multiplicity of the tree edge.
                        continue;
                    }
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = dist[v as usize] + 1;
                        parent[w as usize] = v;
                        queue.push_back(w);
                    } else {
                        let len = dist[v as usize] + dist[w as usize] + 1;
                        if best.is_none_or(|b| len < b) {
                            best = Some(len);
                        }
                    }
                }
            }
        }
        best
    }

    pub fn is_bipartite(&self) -> Option<Vec<u8>> {
        let mut side = vec![u8::MAX; self.n as usize + 1];
        for root in self.vertices() {
            if side[root as usize] != u8::MAX {
                continue;
            }
            side[root as usize] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &w in self.row(v) {
                    if side[w as usize] == u8::MAX {
                        side[w as usize] = 1 - side[v as usize];
                        queue.push_back(w);
                    } else if side[w as usize] == side[v as usize] {
                        return None;
                    }
                }
            }
        }
        Some(side)
    }

    /// Serialize in the edge-list text format: `n m` header then one `u v`
    /// line per edge.
    pub fn to_edge_list(&self) -> String {
        let edges = self.edges();
        let mut s = String::new();
        s.push_str(&format!("{} {}\n", self.n, edges.len()));
        for (u, v) in edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// Parse the edge-list text format. `#` starts a comment line.
    pub fn from_edge_list(text: &str, order: PortOrder) -> Result<Graph, GraphError> {
        let mut header: Option<(u32, usize)> = None;
        let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>, line: usize| -> Result<u64, GraphError> {
                tok.ok_or(GraphError::Parse { line, msg: "missing field".into() })?
                    .parse::<u64>()
                    .map_err(|e| GraphError::Parse { line, msg: e.to_string() })
            };
            if header.is_none() {
                let n = parse(it.next(), line_no)?;
                let m = parse(it.next(), line_no)?;
                if it.next().is_some() {
                    return Err(GraphError::Parse { line: line_no, msg: "trailing tokens in header".into() });
                }
                header = Some((n as u32, m as usize));
            } else {
                let u = parse(it.next(), line_no)?;
                let v = parse(it.next(), line_no)?;
                if it.next().is_some() {
                    return Err(GraphError::Parse { line: line_no, msg: "trailing tokens in edge line".into() });
                }
                edges.push((u as Vertex, v as Vertex));
            }
        }
        let (n, m) = header.ok_or(GraphError::Parse { line: 0, msg: "empty input".into() })?;
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: 0,
                msg: format!("header promises {m} edges, found {}", edges.len()),
            });
        }
        let g = Graph::build(n, &edges, order)?;
        g.check_invariants()?;
        Ok(g)
    }

    pub fn load(path: &Path, order: PortOrder) -> Result<Graph, GraphError> {
        let text = std::fs::read_to_string(path).map_err(|e| GraphError::Io(e.to_string()))?;
        Graph::from_edge_list(&text, order)
    }

    pub fn save(&self, path: &Path) -> Result<(), GraphError> {
        std::fs::write(path, self.to_edge_list()).map_err(|e| GraphError::Io(e.to_string()))
    }
}

/// Exhaustive shortest-cycle search by DFS enumeration of simple cycles.
/// Only sane for small graphs; the test oracle for `Graph::girth`.
pub fn brute_force_girth(g: &Graph) -> Option<u32> {
    let mut best: Option<u32> = None;
    let mut path: Vec<Vertex> = Vec::new();
    let mut pos: HashMap<Vertex, usize> = HashMap::new();
    fn dfs(
        g: &Graph,
        start: Vertex,
        v: Vertex,
        path: &mut Vec<Vertex>,
        pos: &mut HashMap<Vertex, usize>,
        best: &mut Option<u32>,
    ) {
        // A cycle closed from here has length > path.len(); prune.
        if let Some(b) = *best {
            if path.len() as u32 >= b {
                return;
            }
        }
        for &w in g.row(v) {
            if w == start && path.len() >= 3 {
                let len = path.len() as u32;
                if best.is_none_or(|b| len < b) {
                    *best = Some(len);
                }
            }
            // Only extend with vertices above start to canonicalize cycles.
            if w > start && !pos.contains_key(&w) {
                pos.insert(w, path.len());
                path.push(w);
                dfs(g, start, w, path, pos, best);
                path.pop();
                pos.remove(&w);
            }
        }
    }
    for start in g.vertices() {
        path.clear();
        pos.clear();
        pos.insert(start, 0);
        path.push(start);
        dfs(g, start, start, &mut path, &mut pos, &mut best);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::ring_edges;
    use proptest::prelude::*;

    #[test]
    fn single_edge_rows() {
        let g = Graph::build(2, &[(1, 2)], PortOrder::Insertion).unwrap();
        assert_eq!(g.row(1), &[2]);
        assert_eq!(g.row(2), &[1]);
        assert_eq!(g.degree(1), 1);
        assert_eq!(g.degree(2), 1);
    }

    #[test]
    fn four_cycle_degrees() {
        let g = Graph::build(4, &[(1, 2), (2, 3), (3, 4), (4, 1)], PortOrder::Insertion).unwrap();
        for v in g.vertices() {
            assert_eq!(g.degree(v), 2);
        }
        g.check_invariants().unwrap();
    }

    #[test]
    fn affine_plane_p3_structure() {
        // Oracle: enumerate all degree-1 polynomials a0 + a1 x over Z(3) and
        // count incidences with points (b0, b1) where b1 = a0 + a1*b0.
        let p = 3u32;
        let mut expected_incidences = 0;
        for a0 in 0..p {
            for a1 in 0..p {
                for b0 in 0..p {
                    let b1 = (a0 + a1 * b0) % p;
                    let _ = b1;
                    expected_incidences += 1;
                }
            }
        }
        assert_eq!(expected_incidences, 27);
        let g = crate::instances::generate(
            &crate::instances::InstanceSpec::affine_plane(p),
        )
        .unwrap()
        .graph;
        assert_eq!(g.n(), 2 * p * p); // 9 lines + 9 points
        assert_eq!(g.edge_count(), 27);
        for v in g.vertices() {
            assert_eq!(g.degree(v), 3);
        }
        assert!(g.is_bipartite().is_some());
    }

    #[test]
    fn build_rejects_bad_input() {
        assert_eq!(
            Graph::build(3, &[(1, 1)], PortOrder::Insertion).unwrap_err(),
            GraphError::SelfLoop(1)
        );
        assert_eq!(
            Graph::build(3, &[(1, 2), (2, 1)], PortOrder::Insertion).unwrap_err(),
            GraphError::DuplicateEdge(1, 2)
        );
        assert_eq!(
            Graph::build(3, &[(1, 4)], PortOrder::Insertion).unwrap_err(),
            GraphError::VertexOutOfRange(4, 3)
        );
    }

    #[test]
    fn girth_known_values() {
        let ring5 = Graph::build(5, &ring_edges(5), PortOrder::Insertion).unwrap();
        assert_eq!(ring5.girth(), Some(5));

        let mut k33 = Vec::new();
        for u in 1..=3u32 {
            for w in 4..=6u32 {
                k33.push((u, w));
            }
        }
        let k33 = Graph::build(6, &k33, PortOrder::Insertion).unwrap();
        assert_eq!(k33.girth(), Some(4));

        let g = crate::instances::generate(&crate::instances::InstanceSpec::affine_plane(3))
            .unwrap()
            .graph;
        assert_eq!(g.girth(), Some(6));
        assert_eq!(brute_force_girth(&g), Some(6));

        let path = Graph::build(4, &[(1, 2), (2, 3), (3, 4)], PortOrder::Insertion).unwrap();
        assert_eq!(path.girth(), None);
    }

    #[test]
    fn edge_list_round_trip_and_errors() {
        let g = Graph::build(4, &[(1, 2), (2, 3), (3, 4), (4, 1)], PortOrder::Insertion).unwrap();
        let text = g.to_edge_list();
        let g2 = Graph::from_edge_list(&text, PortOrder::Insertion).unwrap();
        assert_eq!(g.edges(), g2.edges());

        let bad = "2 1\n1 x\n";
        match Graph::from_edge_list(bad, PortOrder::Insertion) {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let bad2 = "# comment\n2 2\n1 2\n";
        assert!(matches!(
            Graph::from_edge_list(bad2, PortOrder::Insertion),
            Err(GraphError::Parse { .. })
        ));
    }

    proptest! {
        #[test]
        fn shuffled_ports_same_edge_set(n in 2u32..40, extra in 0usize..60, s1 in any::<u64>(), s2 in any::<u64>()) {
            // A connected-ish random edge set built from a deterministic stream.
            let mut edges = Vec::new();
            let mut seen = std::collections::HashSet::new();
            let mut rng = SplitMix64::new(extra as u64 + 1);
            for v in 2..=n {
                let u = 1 + (rng.next_below((v - 1) as u64)) as u32;
                if seen.insert((u.min(v), u.max(v))) {
                    edges.push((u, v));
                }
            }
            for _ in 0..extra {
                let u = 1 + rng.next_below(n as u64) as u32;
                let v = 1 + rng.next_below(n as u64) as u32;
                if u != v && seen.insert((u.min(v), u.max(v))) {
                    edges.push((u, v));
                }
            }
            let a = Graph::build(n, &edges, PortOrder::Shuffled(s1)).unwrap();
            let b = Graph::build(n, &edges, PortOrder::Shuffled(s2)).unwrap();
            prop_assert_eq!(a.edges(), b.edges());
            a.check_invariants().unwrap();
            b.check_invariants().unwrap();
        }

        #[test]
        fn girth_matches_brute_force(n in 3u32..=12, density in 0.0f64..1.0, seed in any::<u64>()) {
            let mut edges = Vec::new();
            let mut rng = SplitMix64::new(seed);
            for u in 1..=n {
                for v in u + 1..=n {
                    if rng.next_f64() < density {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::build(n, &edges, PortOrder::Insertion).unwrap();
            prop_assert_eq!(g.girth(), brute_force_girth(&g));
        }
    }
}
