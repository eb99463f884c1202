//! Global consistency checks: weak-coloring legality, matching validity and
//! maximality, exact maximum-matching oracles, and the derived vertex cover.

use std::collections::{HashMap, VecDeque};

use crate::graph::{Graph, Vertex};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("color {color} of vertex {vertex} exceeds palette {palette}")]
    PaletteViolation { vertex: Vertex, color: u8, palette: u8 },
    #[error("decisions do not form a valid matching (witness {0:?})")]
    InvalidMatchingInput((Vertex, Vertex)),
    #[error("exact matching unsupported: {0}")]
    UnsupportedInstance(String),
}

/// Outcome of a global check: pass/fail, the violating vertices or edges,
/// and problem-specific metrics.
#[derive(Debug, Clone, Default)]
pub struct Verdict {
    pub passed: bool,
    pub witnesses: Vec<(Vertex, Vertex)>,
    pub metrics: HashMap<String, f64>,
}

impl Verdict {
    pub fn metrics_text(&self) -> String {
        let mut keys: Vec<_> = self.metrics.keys().collect();
        keys.sort();
        let mut s = format!("passed={}\n", self.passed);
        for k in keys {
            s.push_str(&format!("{k}={}\n", self.metrics[k]));
        }
        s
    }
}

/// Every non-isolated vertex must have at least one neighbor with a
/// different color. Witnesses are the violating vertices.
pub fn verify_weak_coloring(g: &Graph, colors: &[u8], palette: u8) -> Result<Verdict, VerifyError> {
    assert_eq!(colors.len(), g.n() as usize, "one color per vertex");
    for v in g.vertices() {
        let c = colors[v as usize - 1];
        if c >= palette {
            return Err(VerifyError::PaletteViolation { vertex: v, color: c, palette });
        }
    }
    let mut witnesses = Vec::new();
    for v in g.vertices() {
        let row = g.row(v);
        if row.is_empty() {
            continue;
        }
        let c = colors[v as usize - 1];
        if row.iter().all(|&w| colors[w as usize - 1] == c) {
            witnesses.push((v, v));
        }
    }
    let mut metrics = HashMap::new();
    metrics.insert("violations".into(), witnesses.len() as f64);
    Ok(Verdict { passed: witnesses.is_empty(), witnesses, metrics })
}

/// Per-edge matching verdicts from a full sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeVerdict {
    Matched,
    Unmatched,
    UnmatchedByBudget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchCheck {
    Validity,
    Maximality,
    Ratio,
}

/// Check a full-sweep matching decision map.
///
/// Validity: matched edges are pairwise vertex-disjoint. Maximality: no
/// edge has both endpoints unmatched. Ratio: |matched| / optimum, with the
/// optimum from [`exact_max_matching`].
pub fn verify_matching(
    g: &Graph,
    decisions: &HashMap<(Vertex, Vertex), EdgeVerdict>,
    mode: MatchCheck,
) -> Result<Verdict, VerifyError> {
    let mut used: HashMap<Vertex, (Vertex, Vertex)> = HashMap::new();
    let mut witnesses = Vec::new();
    let mut matched_count = 0usize;
    for (&(u, v), &verdict) in decisions.iter() {
        if verdict == EdgeVerdict::Matched {
            matched_count += 1;
            for end in [u, v] {
                if let Some(&other) = used.get(&end) {
                    if other != (u, v) {
                        witnesses.push((u, v));
                        witnesses.push(other);
                    }
                } else {
                    used.insert(end, (u, v));
                }
            }
        }
    }
    let mut metrics = HashMap::new();
    metrics.insert("matched".into(), matched_count as f64);
    let valid = witnesses.is_empty();
    match mode {
        MatchCheck::Validity => Ok(Verdict { passed: valid, witnesses, metrics }),
        MatchCheck::Maximality => {
            if !valid {
                return Ok(Verdict { passed: false, witnesses, metrics });
            }
            for (u, v) in g.edges() {
                if !used.contains_key(&u) && !used.contains_key(&v) {
                    witnesses.push((u, v));
                }
            }
            Ok(Verdict { passed: witnesses.is_empty(), witnesses, metrics })
        }
        MatchCheck::Ratio => {
            let opt = exact_max_matching(g)?;
            let ratio = if opt.size == 0 { 1.0 } else { matched_count as f64 / opt.size as f64 };
            metrics.insert("optimum".into(), opt.size as f64);
            metrics.insert("ratio".into(), ratio);
            Ok(Verdict { passed: valid, witnesses, metrics })
        }
    }
}

/// Exact maximum matching: size plus one witness matching.
#[derive(Debug, Clone)]
pub struct ExactMatching {
    pub size: usize,
    pub witness: Vec<(Vertex, Vertex)>,
}

/// Exact maximum matching oracle. Bipartite graphs of any size go through
/// layered augmenting-path search; general graphs up to 24 vertices go
/// through exhaustive branch and bound.
pub fn exact_max_matching(g: &Graph) -> Result<ExactMatching, VerifyError> {
    if let Some(side) = g.is_bipartite() {
        let result = hopcroft_karp(g, &side);
        debug_assert_eq!(result.witness.len(), result.size);
        // Regular bipartite graphs have a perfect matching; the oracle must
        // actually find it.
        let degrees: Vec<u32> = g.vertices().map(|v| g.degree(v)).collect();
        if !degrees.is_empty() && degrees.iter().all(|&d| d == degrees[0] && d > 0) {
            assert_eq!(
                result.size,
                g.n() as usize / 2,
                "d-regular bipartite graphs match perfectly"
            );
        }
        return Ok(result);
    }
    if g.n() > 24 {
        return Err(VerifyError::UnsupportedInstance(format!(
            "general graph with {} > 24 vertices",
            g.n()
        )));
    }
    Ok(exhaustive_matching(g))
}

/// Layered BFS/DFS augmenting search on a 2-colored graph.
fn hopcroft_karp(g: &Graph, side: &[u8]) -> ExactMatching {
    let n = g.n() as usize;
    let left: Vec<Vertex> = g.vertices().filter(|&v| side[v as usize] == 0).collect();
    let mut matched: Vec<Vertex> = vec![0; n + 1]; // 0 = free
    loop {
        let mut dist: Vec<u32> = vec![u32::MAX; n + 1];
        let mut queue = VecDeque::new();
        for &v in &left {
            if matched[v as usize] == 0 {
                dist[v as usize] = 0;
                queue.push_back(v);
            }
        }
        let mut found_free_right = false;
        while let Some(v) = queue.pop_front() {
            for &w in g.row(v) {
                let m = matched[w as usize];
                if m == 0 {
                    found_free_right = true;
                } else if dist[m as usize] == u32::MAX {
                    dist[m as usize] = dist[v as usize] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found_free_right {
            break;
        }
        fn try_augment(g: &Graph, v: Vertex, matched: &mut Vec<Vertex>, dist: &mut Vec<u32>) -> bool {
            let d = std::mem::replace(&mut dist[v as usize], u32::MAX);
            for &w in g.row(v) {
                let m = matched[w as usize];
                if m == 0 || (dist[m as usize] == d + 1 && try_augment(g, m, matched, dist)) {
                    matched[w as usize] = v;
                    matched[v as usize] = w;
                    return true;
                }
            }
            false
        }
        let mut progress = false;
        for &v in &left {
            if matched[v as usize] == 0 && dist[v as usize] == 0 {
                progress |= try_augment(g, v, &mut matched, &mut dist);
            }
        }
        if !progress {
            break;
        }
    }
    let witness: Vec<(Vertex, Vertex)> = left
        .iter()
        .filter(|&&v| matched[v as usize] != 0)
        .map(|&v| (v.min(matched[v as usize]), v.max(matched[v as usize])))
        .collect();
    ExactMatching { size: witness.len(), witness }
}

/// One extra layered search; true iff an augmenting path exists for the
/// given matching. Used to cross-check oracle outputs.
pub fn has_augmenting_path(g: &Graph, matching: &[(Vertex, Vertex)]) -> bool {
    let Some(side) = g.is_bipartite() else {
        return false;
    };
    let n = g.n() as usize;
    let mut matched: Vec<Vertex> = vec![0; n + 1];
    for &(u, v) in matching {
        matched[u as usize] = v;
        matched[v as usize] = u;
    }
    let mut dist: Vec<u32> = vec![u32::MAX; n + 1];
    let mut queue = VecDeque::new();
    for v in g.vertices() {
        if side[v as usize] == 0 && matched[v as usize] == 0 {
            dist[v as usize] = 0;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in g.row(v) {
            let m = matched[w as usize];
            if m == 0 && w != matched[v as usize] {
                return true;
            }
            if m != 0 && dist[m as usize] == u32::MAX {
                dist[m as usize] = dist[v as usize] + 1;
                queue.push_back(m);
            }
        }
    }
    false
}

/// Branch and bound over the edge list; exact on small general graphs.
fn exhaustive_matching(g: &Graph) -> ExactMatching {
    let edges = g.edges();
    let mut best: Vec<(Vertex, Vertex)> = Vec::new();
    let mut current: Vec<(Vertex, Vertex)> = Vec::new();
    let mut used = vec![false; g.n() as usize + 1];
    fn recurse(
        edges: &[(Vertex, Vertex)],
        idx: usize,
        used: &mut Vec<bool>,
        current: &mut Vec<(Vertex, Vertex)>,
        best: &mut Vec<(Vertex, Vertex)>,
    ) {
        if current.len() + (edges.len() - idx) <= best.len() {
            return;
        }
        if idx == edges.len() {
            if current.len() > best.len() {
                *best = current.clone();
            }
            return;
        }
        let (u, v) = edges[idx];
        if !used[u as usize] && !used[v as usize] {
            used[u as usize] = true;
            used[v as usize] = true;
            current.push((u, v));
            recurse(edges, idx + 1, used, current, best);
            current.pop();
            used[u as usize] = false;
            used[v as usize] = false;
        }
        recurse(edges, idx + 1, used, current, best);
    }
    recurse(&edges, 0, &mut used, &mut current, &mut best);
    ExactMatching { size: best.len(), witness: best }
}

/// Vertex cover derived from a maximal matching: both endpoints of every
/// matched edge. Input must already be a valid matching; pass requires the
/// cover to touch every edge.
pub fn derived_vertex_cover(
    g: &Graph,
    decisions: &HashMap<(Vertex, Vertex), EdgeVerdict>,
) -> Result<Verdict, VerifyError> {
    let validity = verify_matching(g, decisions, MatchCheck::Validity)?;
    if !validity.passed {
        return Err(VerifyError::InvalidMatchingInput(validity.witnesses[0]));
    }
    let mut cover = std::collections::HashSet::new();
    for (&(u, v), &verdict) in decisions.iter() {
        if verdict == EdgeVerdict::Matched {
            cover.insert(u);
            cover.insert(v);
        }
    }
    let mut witnesses = Vec::new();
    for (u, v) in g.edges() {
        if !cover.contains(&u) && !cover.contains(&v) {
            witnesses.push((u, v));
        }
    }
    let mut metrics = HashMap::new();
    metrics.insert("cover_size".into(), cover.len() as f64);
    Ok(Verdict { passed: witnesses.is_empty(), witnesses, metrics })
}

/// Decision map helper: mark `matched` edges Matched, everything else
/// Unmatched.
pub fn decisions_from_matching(
    g: &Graph,
    matched: &[(Vertex, Vertex)],
) -> HashMap<(Vertex, Vertex), EdgeVerdict> {
    let mut map: HashMap<(Vertex, Vertex), EdgeVerdict> =
        g.edges().into_iter().map(|e| (e, EdgeVerdict::Unmatched)).collect();
    for &(u, v) in matched {
        map.insert((u.min(v), u.max(v)), EdgeVerdict::Matched);
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PortOrder;
    use crate::instances::{generate, ring_edges, InstanceSpec};

    #[test]
    fn weak_coloring_verdicts() {
        let k2 = Graph::build(2, &[(1, 2)], PortOrder::Insertion).unwrap();
        assert!(verify_weak_coloring(&k2, &[0, 1], 2).unwrap().passed);

        let tri = Graph::build(3, &[(1, 2), (2, 3), (1, 3)], PortOrder::Insertion).unwrap();
        let v = verify_weak_coloring(&tri, &[0, 0, 0], 2).unwrap();
        assert!(!v.passed);
        assert_eq!(v.witnesses.len(), 3);

        let ring5 = Graph::build(5, &ring_edges(5), PortOrder::Insertion).unwrap();
        assert!(verify_weak_coloring(&ring5, &[0, 1, 0, 1, 0], 2).unwrap().passed);

        assert!(matches!(
            verify_weak_coloring(&k2, &[0, 2], 2),
            Err(VerifyError::PaletteViolation { .. })
        ));
    }

    #[test]
    fn matching_validity_and_ratio() {
        let path = Graph::build(3, &[(1, 2), (2, 3)], PortOrder::Insertion).unwrap();
        let mut decisions = HashMap::new();
        decisions.insert((1, 2), EdgeVerdict::Matched);
        decisions.insert((2, 3), EdgeVerdict::Matched);
        let v = verify_matching(&path, &decisions, MatchCheck::Validity).unwrap();
        assert!(!v.passed, "adjacent matched edges");

        let ring6 = Graph::build(6, &ring_edges(6), PortOrder::Insertion).unwrap();
        let perfect = decisions_from_matching(&ring6, &[(1, 2), (3, 4), (5, 6)]);
        let v = verify_matching(&ring6, &perfect, MatchCheck::Ratio).unwrap();
        assert!(v.passed);
        assert_eq!(v.metrics["optimum"], 3.0);
        assert_eq!(v.metrics["ratio"], 1.0);
    }

    #[test]
    fn exact_matching_known_values() {
        let k2 = Graph::build(2, &[(1, 2)], PortOrder::Insertion).unwrap();
        assert_eq!(exact_max_matching(&k2).unwrap().size, 1);

        let ring6 = Graph::build(6, &ring_edges(6), PortOrder::Insertion).unwrap();
        assert_eq!(exact_max_matching(&ring6).unwrap().size, 3);

        // Odd ring is not bipartite: exhaustive path.
        let ring7 = Graph::build(7, &ring_edges(7), PortOrder::Insertion).unwrap();
        assert_eq!(exact_max_matching(&ring7).unwrap().size, 3);
    }

    #[test]
    fn oracle_self_consistency() {
        let inst = generate(&InstanceSpec::poly_bipartite(5, 2)).unwrap();
        let m = exact_max_matching(&inst.graph).unwrap();
        assert_eq!(m.size, 25, "5-regular bipartite on 50 vertices matches perfectly");
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &m.witness {
            assert!(seen.insert(u) && seen.insert(v), "witness is a matching");
        }
        assert!(!has_augmenting_path(&inst.graph, &m.witness), "no augmenting path remains");
    }

    #[test]
    fn exhaustive_agrees_with_layered_on_small_bipartite() {
        let mut checked = 0;
        for seed in 0..60u64 {
            let n = 8 + (seed % 5) as u32 * 4;
            let Ok(inst) = generate(&InstanceSpec::random_regular(n, 3, seed)) else {
                continue;
            };
            let g = inst.graph;
            if g.n() > 24 || g.is_bipartite().is_none() {
                continue;
            }
            let hk = exact_max_matching(&g).unwrap();
            let ex = exhaustive_matching(&g);
            assert_eq!(hk.size, ex.size, "seed {seed}");
            checked += 1;
        }
        // Bipartite random 3-regular graphs are rare; rings guarantee coverage.
        for n in [4u32, 8, 12, 16, 20, 24] {
            let g = Graph::build(n, &ring_edges(n), PortOrder::Insertion).unwrap();
            assert_eq!(exact_max_matching(&g).unwrap().size, exhaustive_matching(&g).size);
            checked += 1;
        }
        assert!(checked >= 6);
    }

    #[test]
    fn vertex_cover_from_matching() {
        let single = Graph::build(2, &[(1, 2)], PortOrder::Insertion).unwrap();
        let d = decisions_from_matching(&single, &[(1, 2)]);
        let v = derived_vertex_cover(&single, &d).unwrap();
        assert!(v.passed);
        assert_eq!(v.metrics["cover_size"], 2.0);

        let star = Graph::build(5, &[(1, 2), (1, 3), (1, 4), (1, 5)], PortOrder::Insertion).unwrap();
        let d = decisions_from_matching(&star, &[(1, 2)]);
        let v = derived_vertex_cover(&star, &d).unwrap();
        assert!(v.passed, "center covers all star edges");

        let path = Graph::build(3, &[(1, 2), (2, 3)], PortOrder::Insertion).unwrap();
        let mut bad = HashMap::new();
        bad.insert((1, 2), EdgeVerdict::Matched);
        bad.insert((2, 3), EdgeVerdict::Matched);
        assert!(matches!(derived_vertex_cover(&path, &bad), Err(VerifyError::InvalidMatchingInput(_))));
    }
}
