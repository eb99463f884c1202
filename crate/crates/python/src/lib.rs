//! Python bindings: the probe-model graph, instance generators, the
//! coloring and matching LCAs with probe counts, and the verifiers.

use std::collections::HashMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use lca_core::coloring::{
    mgps_color_forest, weak2_det_lca, weak2_rand_lca, weak3_lca, ColorSeed, MgpsSchedule,
    ProbeModel,
};
use lca_core::graph::{Graph, PortOrder};
use lca_core::instances::{generate, InstanceFamily, InstanceSpec};
use lca_core::matching::{
    bounded_rg_lca_query, global_greedy_matching, high_girth_matching_lca, phase_matching_lca,
    regular_matching_lca, regular_matching_sweep, rg_lca_query, PhaseParams,
    RankSeed,
};
use lca_core::parent::{assign_parents, RankAssignment, Scheme};
use lca_core::probe::ProbeSession;
use lca_core::verify::{
    decisions_from_matching, exact_max_matching, verify_matching, verify_weak_coloring,
    EdgeVerdict, MatchCheck,
};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Immutable port-numbered graph.
#[pyclass(name = "Graph", frozen)]
struct PyGraph {
    inner: Graph,
}

#[pymethods]
impl PyGraph {
    /// Build from an edge list of 1-based vertex pairs.
    #[new]
    #[pyo3(signature = (n, edges, shuffle_seed=None))]
    fn new(n: u32, edges: Vec<(u32, u32)>, shuffle_seed: Option<u64>) -> PyResult<Self> {
        let order = match shuffle_seed {
            Some(s) => PortOrder::Shuffled(s),
            None => PortOrder::Insertion,
        };
        let g = Graph::build(n, &edges, order).map_err(err)?;
        g.check_invariants().map_err(err)?;
        Ok(Self { inner: g })
    }

    /// Parse the `n m` / `u v` edge-list text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: Graph::from_edge_list(text, PortOrder::Insertion).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn max_degree(&self) -> u32 {
        self.inner.max_degree()
    }

    fn degree(&self, v: u32) -> u32 {
        self.inner.degree(v)
    }

    /// Neighbor list of `v` in port order.
    fn row(&self, v: u32) -> Vec<u32> {
        self.inner.row(v).to_vec()
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.inner.edges()
    }

    fn girth(&self) -> Option<u32> {
        self.inner.girth()
    }

    fn is_bipartite(&self) -> bool {
        self.inner.is_bipartite().is_some()
    }

    fn to_edge_list(&self) -> String {
        self.inner.to_edge_list()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.n(), self.inner.edge_count())
    }
}

/// Generate a named instance family; returns (graph, metadata dict).
#[pyfunction]
#[pyo3(signature = (family, params=None, seed=0))]
fn generate_instance(
    py: Python<'_>,
    family: &str,
    params: Option<HashMap<String, f64>>,
    seed: u64,
) -> PyResult<(PyGraph, Py<PyDict>)> {
    let fam = InstanceFamily::parse(family)
        .ok_or_else(|| PyValueError::new_err(format!("unknown family '{family}'")))?;
    let spec = InstanceSpec {
        family: fam,
        params: params.unwrap_or_default().into_iter().collect(),
        seed,
    };
    let inst = generate(&spec).map_err(err)?;
    let meta = PyDict::new(py);
    for (k, v) in &inst.meta {
        meta.set_item(k, v)?;
    }
    Ok((PyGraph { inner: inst.graph }, meta.into()))
}

/// Round budget T_n for an n-vertex ID space.
#[pyfunction]
fn t_n(n: u32) -> u32 {
    MgpsSchedule::for_n(n).t_n
}

/// Weak 3-coloring query: (color, weak_probes, strong_probes).
#[pyfunction]
fn weak3(g: &PyGraph, v: u32) -> PyResult<(u8, u64, u64)> {
    let mut s = ProbeSession::new(&g.inner);
    let c = weak3_lca(&mut s, v).map_err(err)?;
    let st = s.stats();
    Ok((c, st.weak, st.strong))
}

/// Deterministic weak 2-coloring query: (color, weak_probes, strong_probes).
#[pyfunction]
fn weak2_det(g: &PyGraph, v: u32) -> PyResult<(u8, u64, u64)> {
    let mut s = ProbeSession::new(&g.inner);
    let c = weak2_det_lca(&mut s, v).map_err(err)?;
    let st = s.stats();
    Ok((c, st.weak, st.strong))
}

/// Randomized weak 2-coloring query.
#[pyfunction]
#[pyo3(signature = (g, v, seed, scheme="arbitrary", probe_model="strong"))]
fn weak2_rand(g: &PyGraph, v: u32, seed: u64, scheme: &str, probe_model: &str) -> PyResult<(u8, u64, u64)> {
    let scheme = Scheme::parse(scheme).ok_or_else(|| PyValueError::new_err("bad scheme"))?;
    let model =
        ProbeModel::parse(probe_model).ok_or_else(|| PyValueError::new_err("bad probe model"))?;
    let cs = ColorSeed::true_random(seed);
    let ranks = RankAssignment::new(seed ^ 0x7a7c5);
    let mut s = ProbeSession::new(&g.inner);
    let c = weak2_rand_lca(&mut s, v, &cs, scheme, model, Some(&ranks)).map_err(err)?;
    let st = s.stats();
    Ok((c, st.weak, st.strong))
}

/// Global reference 3-coloring of the port-1 parent forest.
#[pyfunction]
fn forest_coloring(g: &PyGraph) -> PyResult<Vec<u32>> {
    let pa = assign_parents(&g.inner, Scheme::Arbitrary, None).map_err(err)?;
    Ok(mgps_color_forest(g.inner.n(), &pa).map_err(err)?.into_iter().map(u32::from).collect())
}

/// Greedy-matching query: (verdict, weak_probes, strong_probes).
#[pyfunction]
#[pyo3(signature = (g, u, v, seed, cap=None))]
fn rg_match(g: &PyGraph, u: u32, v: u32, seed: u64, cap: Option<u64>) -> PyResult<(String, u64, u64)> {
    let rs = RankSeed::new(seed);
    let d = match cap {
        Some(c) => bounded_rg_lca_query(&g.inner, (u, v), &rs, c).map_err(err)?,
        None => {
            let mut s = ProbeSession::new(&g.inner);
            rg_lca_query(&mut s, (u, v), &rs).map_err(err)?
        }
    };
    Ok((d.verdict.name().to_string(), d.stats.weak, d.stats.strong))
}

/// Global sequential greedy matching over the rank order.
#[pyfunction]
fn greedy_matching(g: &PyGraph, seed: u64) -> Vec<(u32, u32)> {
    global_greedy_matching(&g.inner, &RankSeed::new(seed))
}

/// Phase-hierarchy matching query.
#[pyfunction]
#[pyo3(signature = (g, u, v, seed, eps=0.34, cap=None))]
fn phase_match(g: &PyGraph, u: u32, v: u32, seed: u64, eps: f64, cap: Option<u64>) -> PyResult<String> {
    let params = PhaseParams::new(eps, g.inner.max_degree(), cap);
    let mut s = ProbeSession::new(&g.inner);
    let d = phase_matching_lca(&mut s, (u, v), &params, &RankSeed::new(seed), None).map_err(err)?;
    Ok(d.verdict.name().to_string())
}

/// Regular-graph pipeline query (sparsify + phase hierarchy).
#[pyfunction]
#[pyo3(signature = (g, u, v, seed, eps=0.25))]
fn regular_match(g: &PyGraph, u: u32, v: u32, seed: u64, eps: f64) -> PyResult<String> {
    let d = regular_matching_lca(&g.inner, (u, v), eps, &RankSeed::new(seed), seed ^ 0x5a, None, None)
        .map_err(err)?;
    Ok(d.verdict.name().to_string())
}

/// Full-sweep verdicts of the regular pipeline, one per edge of `edges`.
#[pyfunction]
#[pyo3(signature = (g, seed, eps=0.25))]
fn regular_match_sweep(g: &PyGraph, seed: u64, eps: f64) -> PyResult<Vec<String>> {
    let edges = g.inner.edges();
    let verdicts = regular_matching_sweep(&g.inner, &edges, eps, &RankSeed::new(seed), seed ^ 0x5a, None)
        .map_err(err)?;
    Ok(verdicts.into_iter().map(|v| v.name().to_string()).collect())
}

/// High-girth pipeline query.
#[pyfunction]
#[pyo3(signature = (g, u, v, seed, eps=0.4, girth=None))]
fn high_girth_match(g: &PyGraph, u: u32, v: u32, seed: u64, eps: f64, girth: Option<u32>) -> PyResult<String> {
    let girth = girth.or_else(|| g.inner.girth()).unwrap_or(u32::MAX);
    let d = high_girth_matching_lca(&g.inner, (u, v), eps, girth, &RankSeed::new(seed), seed, false)
        .map_err(err)?;
    Ok(d.verdict.name().to_string())
}

/// Weak-coloring legality: (passed, violating vertices).
#[pyfunction]
fn check_weak_coloring(g: &PyGraph, colors: Vec<u8>, palette: u8) -> PyResult<(bool, Vec<u32>)> {
    let verdict = verify_weak_coloring(&g.inner, &colors, palette).map_err(err)?;
    Ok((verdict.passed, verdict.witnesses.into_iter().map(|(v, _)| v).collect()))
}

/// Matching checks from per-edge verdict strings aligned with g.edges().
#[pyfunction]
fn check_matching(g: &PyGraph, verdicts: Vec<String>, mode: &str) -> PyResult<(bool, HashMap<String, f64>)> {
    let edges = g.inner.edges();
    if verdicts.len() != edges.len() {
        return Err(PyValueError::new_err("one verdict per edge required"));
    }
    let mut decisions = HashMap::new();
    for (e, v) in edges.into_iter().zip(verdicts) {
        let verdict = match v.as_str() {
            "matched" => EdgeVerdict::Matched,
            "unmatched" => EdgeVerdict::Unmatched,
            "unmatched-by-budget" => EdgeVerdict::UnmatchedByBudget,
            other => return Err(PyValueError::new_err(format!("bad verdict '{other}'"))),
        };
        decisions.insert(e, verdict);
    }
    let mode = match mode {
        "validity" => MatchCheck::Validity,
        "maximality" => MatchCheck::Maximality,
        "ratio" => MatchCheck::Ratio,
        other => return Err(PyValueError::new_err(format!("bad mode '{other}'"))),
    };
    let verdict = verify_matching(&g.inner, &decisions, mode).map_err(err)?;
    Ok((verdict.passed, verdict.metrics))
}

/// Exact maximum matching size (bipartite any size; general up to 24 vertices).
#[pyfunction]
fn max_matching_size(g: &PyGraph) -> PyResult<usize> {
    Ok(exact_max_matching(&g.inner).map_err(err)?.size)
}

/// Size of the greedy matching's derived vertex cover, with validity check.
#[pyfunction]
fn derived_cover_size(g: &PyGraph, seed: u64) -> PyResult<usize> {
    let matched = global_greedy_matching(&g.inner, &RankSeed::new(seed));
    let decisions = decisions_from_matching(&g.inner, &matched);
    let verdict = lca_core::verify::derived_vertex_cover(&g.inner, &decisions).map_err(err)?;
    if !verdict.passed {
        return Err(PyValueError::new_err("derived cover misses an edge"));
    }
    Ok(verdict.metrics["cover_size"] as usize)
}

#[pymodule]
fn lcaprobe(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(generate_instance, m)?)?;
    m.add_function(wrap_pyfunction!(t_n, m)?)?;
    m.add_function(wrap_pyfunction!(weak3, m)?)?;
    m.add_function(wrap_pyfunction!(weak2_det, m)?)?;
    m.add_function(wrap_pyfunction!(weak2_rand, m)?)?;
    m.add_function(wrap_pyfunction!(forest_coloring, m)?)?;
    m.add_function(wrap_pyfunction!(rg_match, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_matching, m)?)?;
    m.add_function(wrap_pyfunction!(phase_match, m)?)?;
    m.add_function(wrap_pyfunction!(regular_match, m)?)?;
    m.add_function(wrap_pyfunction!(regular_match_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(high_girth_match, m)?)?;
    m.add_function(wrap_pyfunction!(check_weak_coloring, m)?)?;
    m.add_function(wrap_pyfunction!(check_matching, m)?)?;
    m.add_function(wrap_pyfunction!(max_matching_size, m)?)?;
    m.add_function(wrap_pyfunction!(derived_cover_size, m)?)?;
    Ok(())
}
