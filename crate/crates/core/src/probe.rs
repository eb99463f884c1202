//! Probe accounting. Every LCA in this crate reads the graph exclusively
//! through a [`ProbeSession`], which charges strong/weak probes, enforces an
//! optional budget, and records the revealed view. The view is what makes
//! replay testing possible: an LCA decision re-run against only the recorded
//! cells must reproduce the same output.

use std::collections::HashMap;

use crate::graph::{CellContent, Graph, Vertex};

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum ProbeError {
    #[error("probe budget exceeded: {kind:?} limit {limit}")]
    BudgetExceeded { kind: BudgetKind, limit: u64 },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(Vertex),
    #[error("port {port} beyond max degree {max_degree}")]
    PortOutOfRange { port: u32, max_degree: u32 },
    #[error("probe of ({0}, {1}) falls outside the recorded view")]
    OutsideRecordedView(Vertex, u32),
    #[error("vertex {0} is isolated")]
    IsolatedVertex(Vertex),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetKind {
    Weak,
    Strong,
}

/// Anything a session can probe: the real graph, or a recorded view replay.
pub trait ProbeSource {
    fn n(&self) -> u32;
    fn max_degree(&self) -> u32;
    fn source_row(&self, v: Vertex) -> Result<Vec<Vertex>, ProbeError>;
    fn source_cell(&self, v: Vertex, j: u32) -> Result<CellContent, ProbeError>;
}

impl ProbeSource for Graph {
    fn n(&self) -> u32 {
        Graph::n(self)
    }
    fn max_degree(&self) -> u32 {
        Graph::max_degree(self)
    }
    fn source_row(&self, v: Vertex) -> Result<Vec<Vertex>, ProbeError> {
        Ok(self.row(v).to_vec())
    }
    fn source_cell(&self, v: Vertex, j: u32) -> Result<CellContent, ProbeError> {
        Ok(self.cell(v, j))
    }
}

/// Per-vertex record of what a session has learned.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VertexView {
    pub degree: Option<u32>,
    /// port -> neighbor (only ports `1..=d_v` that returned a neighbor)
    pub cells: HashMap<u32, Vertex>,
    /// ports that returned the zero sentinel
    pub zeros: Vec<u32>,
}

/// The revealed portion of the graph, canonicalized so that a full row
/// revealed cell-by-cell compares equal to one revealed by a strong probe.
#[derive(Debug, Clone, Default)]
pub struct View {
    pub per_vertex: HashMap<Vertex, VertexView>,
}

/// One vertex's canonicalized view entry: (vertex, degree, known cells).
pub type VertexCells = (Vertex, Option<u32>, Vec<(u32, Vertex)>);

impl View {
    fn vertex_mut(&mut self, v: Vertex) -> &mut VertexView {
        self.per_vertex.entry(v).or_default()
    }

    pub fn full_row(&self, v: Vertex) -> Option<Vec<Vertex>> {
        let vv = self.per_vertex.get(&v)?;
        let d = vv.degree?;
        let mut row = Vec::with_capacity(d as usize);
        for j in 1..=d {
            row.push(*vv.cells.get(&j)?);
        }
        Some(row)
    }

    /// Canonical comparable form: per vertex, (degree, sorted known cells).
    pub fn canonical(&self) -> Vec<VertexCells> {
        let mut out: Vec<_> = self
            .per_vertex
            .iter()
            .map(|(&v, vv)| {
                let mut cells: Vec<(u32, Vertex)> = vv.cells.iter().map(|(&j, &w)| (j, w)).collect();
                cells.sort_unstable();
                (v, vv.degree, cells)
            })
            .collect();
        out.sort_by_key(|e| e.0);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProbeStats {
    pub weak: u64,
    pub strong: u64,
    pub vertices_touched: u64,
}

impl ProbeStats {
    pub fn csv_row(&self, query_id: &str) -> String {
        format!("{query_id},{},{},{}", self.weak, self.strong, self.vertices_touched)
    }
}

/// One query's probe ledger.
pub struct ProbeSession<'a> {
    source: &'a dyn ProbeSource,
    weak_count: u64,
    strong_count: u64,
    budget: Option<(BudgetKind, u64)>,
    view: View,
}

impl<'a> ProbeSession<'a> {
    pub fn new(source: &'a dyn ProbeSource) -> Self {
        Self { source, weak_count: 0, strong_count: 0, budget: None, view: View::default() }
    }

    pub fn with_budget(source: &'a dyn ProbeSource, kind: BudgetKind, limit: u64) -> Self {
        let mut s = Self::new(source);
        s.budget = Some((kind, limit));
        s
    }

    /// Install or replace the budget mid-session; probes already spent count
    /// against it.
    pub fn set_budget(&mut self, kind: BudgetKind, limit: u64) {
        self.budget = Some((kind, limit));
    }

    pub fn n(&self) -> u32 {
        self.source.n()
    }

    pub fn max_degree(&self) -> u32 {
        self.source.max_degree()
    }

    fn charge(&mut self, kind: BudgetKind) -> Result<(), ProbeError> {
        if let Some((bk, limit)) = self.budget {
            if bk == kind {
                let used = match kind {
                    BudgetKind::Weak => self.weak_count,
                    BudgetKind::Strong => self.strong_count,
                };
                if used >= limit {
                    return Err(ProbeError::BudgetExceeded { kind, limit });
                }
            }
        }
        match kind {
            BudgetKind::Weak => self.weak_count += 1,
            BudgetKind::Strong => self.strong_count += 1,
        }
        Ok(())
    }

    /// Strong probe: the entire row of `v`, for one strong-probe unit.
    pub fn strong_probe(&mut self, v: Vertex) -> Result<Vec<Vertex>, ProbeError> {
        if v == 0 || v > self.source.n() {
            return Err(ProbeError::VertexOutOfRange(v));
        }
        self.charge(BudgetKind::Strong)?;
        let row = self.source.source_row(v)?;
        let vv = self.view.vertex_mut(v);
        vv.degree = Some(row.len() as u32);
        for (i, &w) in row.iter().enumerate() {
            vv.cells.insert(i as u32 + 1, w);
        }
        Ok(row)
    }

    /// Weak probe of cell `(v, j)`. Port 0 is the degree cell; ports above
    /// the degree but within the array return the zero sentinel; ports above
    /// the array width are a caller bug.
    pub fn weak_probe(&mut self, v: Vertex, j: u32) -> Result<CellContent, ProbeError> {
        if v == 0 || v > self.source.n() {
            return Err(ProbeError::VertexOutOfRange(v));
        }
        if j > self.source.max_degree() {
            return Err(ProbeError::PortOutOfRange { port: j, max_degree: self.source.max_degree() });
        }
        self.charge(BudgetKind::Weak)?;
        let content = self.source.source_cell(v, j)?;
        let vv = self.view.vertex_mut(v);
        match content {
            CellContent::Degree(d) => vv.degree = Some(d),
            CellContent::Neighbor(w) => {
                vv.cells.insert(j, w);
            }
            CellContent::Zero => vv.zeros.push(j),
        }
        Ok(content)
    }

    /// Row of `v` if this session has already fully revealed it; no charge.
    pub fn cached_row(&self, v: Vertex) -> Option<Vec<Vertex>> {
        self.view.full_row(v)
    }

    /// Strong probe that consults the view first, so a vertex is never
    /// charged twice within a session.
    pub fn strong_probe_cached(&mut self, v: Vertex) -> Result<Vec<Vertex>, ProbeError> {
        if let Some(row) = self.cached_row(v) {
            return Ok(row);
        }
        self.strong_probe(v)
    }

    pub fn stats(&self) -> ProbeStats {
        ProbeStats {
            weak: self.weak_count,
            strong: self.strong_count,
            vertices_touched: self.view.per_vertex.len() as u64,
        }
    }

    pub fn view(&self) -> &View {
        &self.view
    }

    pub fn into_view(self) -> View {
        self.view
    }
}

/// Generic adapter: a strong probe implemented as `d_v + 1` weak probes
/// (degree cell, then every port). Produces the same full-row view.
pub fn strong_via_weak(session: &mut ProbeSession<'_>, v: Vertex) -> Result<Vec<Vertex>, ProbeError> {
    let d = match session.weak_probe(v, 0)? {
        CellContent::Degree(d) => d,
        _ => unreachable!("port 0 is the degree cell"),
    };
    let mut row = Vec::with_capacity(d as usize);
    for j in 1..=d {
        match session.weak_probe(v, j)? {
            CellContent::Neighbor(w) => row.push(w),
            other => panic!("port {j} of vertex {v} within degree returned {other:?}"),
        }
    }
    Ok(row)
}

/// A probe source backed by a recorded view. Replaying an LCA against this
/// source proves its decision used nothing outside the view.
pub struct ViewReplay {
    n: u32,
    max_degree: u32,
    view: View,
}

impl ViewReplay {
    pub fn new(n: u32, max_degree: u32, view: View) -> Self {
        Self { n, max_degree, view }
    }
}

impl ProbeSource for ViewReplay {
    fn n(&self) -> u32 {
        self.n
    }
    fn max_degree(&self) -> u32 {
        self.max_degree
    }
    fn source_row(&self, v: Vertex) -> Result<Vec<Vertex>, ProbeError> {
        self.view.full_row(v).ok_or(ProbeError::OutsideRecordedView(v, 0))
    }
    fn source_cell(&self, v: Vertex, j: u32) -> Result<CellContent, ProbeError> {
        let vv = self.view.per_vertex.get(&v).ok_or(ProbeError::OutsideRecordedView(v, j))?;
        if j == 0 {
            return vv.degree.map(CellContent::Degree).ok_or(ProbeError::OutsideRecordedView(v, 0));
        }
        if let Some(&w) = vv.cells.get(&j) {
            return Ok(CellContent::Neighbor(w));
        }
        if vv.zeros.contains(&j) {
            return Ok(CellContent::Zero);
        }
        // A port known to exceed a known degree is derivable from the view.
        if let Some(d) = vv.degree {
            if j > d {
                return Ok(CellContent::Zero);
            }
        }
        Err(ProbeError::OutsideRecordedView(v, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PortOrder;
    use crate::instances::ring_edges;

    fn ring(n: u32) -> Graph {
        Graph::build(n, &ring_edges(n), PortOrder::Insertion).unwrap()
    }

    #[test]
    fn strong_probe_reveals_row_and_counts() {
        let g = ring(4);
        let mut s = ProbeSession::new(&g);
        let row = s.strong_probe(1).unwrap();
        assert_eq!(row.len(), 2);
        assert!(row.contains(&2) && row.contains(&4));
        s.strong_probe(2).unwrap();
        s.strong_probe(3).unwrap();
        assert_eq!(s.stats().strong, 3);
        assert_eq!(s.stats().weak, 0);
    }

    #[test]
    fn strong_budget_blocks_third_probe() {
        let g = ring(4);
        let mut s = ProbeSession::with_budget(&g, BudgetKind::Strong, 2);
        s.strong_probe(1).unwrap();
        s.strong_probe(2).unwrap();
        let err = s.strong_probe(3).unwrap_err();
        assert!(matches!(err, ProbeError::BudgetExceeded { .. }));
        assert_eq!(s.stats().strong, 2);
    }

    #[test]
    fn weak_probe_cells() {
        // Star: center 1, leaves 2..=5.
        let g = Graph::build(5, &[(1, 2), (1, 3), (1, 4), (1, 5)], PortOrder::Insertion).unwrap();
        let mut s = ProbeSession::new(&g);
        assert_eq!(s.weak_probe(1, 0).unwrap(), CellContent::Degree(4));
        assert_eq!(s.weak_probe(2, 3).unwrap(), CellContent::Zero);
        assert_eq!(s.weak_probe(2, 1).unwrap(), CellContent::Neighbor(1));
        let err = s.weak_probe(2, 5).unwrap_err();
        assert!(matches!(err, ProbeError::PortOutOfRange { .. }));
        assert_eq!(s.stats().weak, 3);
    }

    #[test]
    fn partial_view_after_single_weak_probe() {
        let g = ring(4);
        let mut s = ProbeSession::new(&g);
        s.weak_probe(1, 1).unwrap();
        let vv = &s.view().per_vertex[&1];
        assert_eq!(vv.cells.len(), 1);
        assert!(s.cached_row(1).is_none());
    }

    #[test]
    fn fresh_session_stats() {
        let g = ring(4);
        let s = ProbeSession::new(&g);
        assert_eq!(s.stats(), ProbeStats::default());
    }

    #[test]
    fn weak_simulates_strong_same_view() {
        let g = ring(6);
        let mut a = ProbeSession::new(&g);
        a.strong_probe(3).unwrap();
        let mut b = ProbeSession::new(&g);
        strong_via_weak(&mut b, 3).unwrap();
        assert_eq!(a.view().canonical(), b.view().canonical());
        assert_eq!(b.stats().weak, g.degree(3) as u64 + 1);
    }

    #[test]
    fn replay_rejects_unseen_cells() {
        let g = ring(6);
        let mut s = ProbeSession::new(&g);
        s.strong_probe(1).unwrap();
        let replay = ViewReplay::new(g.n(), g.max_degree(), s.into_view());
        let mut r = ProbeSession::new(&replay);
        assert!(r.strong_probe(1).is_ok());
        assert!(matches!(r.strong_probe(2), Err(ProbeError::OutsideRecordedView(2, 0))));
    }
}
