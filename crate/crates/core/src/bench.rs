//! Experiment harness: probe-complexity scalings and approximation quality
//! at desk scale, emitted as CSV. Everything is a pure function of the
//! config and master seed; rows are sorted before emission so the output is
//! byte-stable regardless of parallelism.

use rayon::prelude::*;

use crate::coloring::{
    mono_walk_len, weak2_det_lca, weak2_rand_lca, weak3_lca, ColorSeed, MgpsSchedule, ProbeModel,
};
use crate::graph::{Graph, Vertex};
use crate::instances::{generate, GenError, InstanceSpec, PolyBipartiteDouble};
use crate::matching::{
    global_greedy_matching, regular_matching_sweep, rg_lca_query, MatchVerdict, RankSeed,
    SparsifiedView, SparsifyParams,
};
use crate::mix::{mix64, SplitMix64};
use crate::parent::{assign_parents, walk_parents, RankAssignment, Scheme};
use crate::probe::{ProbeSession, ProbeStats};
use crate::verify::{decisions_from_matching, verify_matching, MatchCheck};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("unknown experiment '{0}'")]
    UnknownExperiment(String),
    #[error("io failure: {0}")]
    IoFailure(String),
    #[error(transparent)]
    Gen(#[from] GenError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentId {
    Weak3Scaling,
    Weak2DetScaling,
    Weak2RandVariants,
    MonoPathLengths,
    DirectedPathLengths,
    CliqueChainBlowup,
    MatchingRatio,
    SparsifyMarginals,
    VcFamilyStructure,
}

impl ExperimentId {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "weak3-scaling" => Self::Weak3Scaling,
            "weak2det-scaling" => Self::Weak2DetScaling,
            "weak2rand-variants" => Self::Weak2RandVariants,
            "mono-path-lengths" => Self::MonoPathLengths,
            "directed-path-lengths" => Self::DirectedPathLengths,
            "clique-chain-blowup" => Self::CliqueChainBlowup,
            "matching-ratio" => Self::MatchingRatio,
            "sparsify-marginals" => Self::SparsifyMarginals,
            "vc-family-structure" => Self::VcFamilyStructure,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Weak3Scaling => "weak3-scaling",
            Self::Weak2DetScaling => "weak2det-scaling",
            Self::Weak2RandVariants => "weak2rand-variants",
            Self::MonoPathLengths => "mono-path-lengths",
            Self::DirectedPathLengths => "directed-path-lengths",
            Self::CliqueChainBlowup => "clique-chain-blowup",
            Self::MatchingRatio => "matching-ratio",
            Self::SparsifyMarginals => "sparsify-marginals",
            Self::VcFamilyStructure => "vc-family-structure",
        }
    }

    pub fn all() -> &'static [ExperimentId] {
        &[
            Self::Weak3Scaling,
            Self::Weak2DetScaling,
            Self::Weak2RandVariants,
            Self::MonoPathLengths,
            Self::DirectedPathLengths,
            Self::CliqueChainBlowup,
            Self::MatchingRatio,
            Self::SparsifyMarginals,
            Self::VcFamilyStructure,
        ]
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    /// Instance sizes, strictly increasing. For vc-family-structure the
    /// entries are primes p.
    pub grid: Vec<u32>,
    pub seeds: u32,
    pub master_seed: u64,
    /// Per-instance cap on queried vertices/edges; full sweep below it.
    pub query_cap: u32,
    pub degree: u32,
    pub eps: f64,
    pub q: Option<u32>,
    pub clique_c: f64,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentId, grid: Vec<u32>, seeds: u32, master_seed: u64) -> Self {
        assert!(grid.windows(2).all(|w| w[0] < w[1]), "grid must be strictly increasing");
        assert!(seeds >= 1);
        Self {
            experiment,
            grid,
            seeds,
            master_seed,
            query_cap: 4096,
            degree: 8,
            eps: 0.25,
            q: None,
            clique_c: 0.5,
            threads: None,
        }
    }
}

/// One output row per (grid point, seed, variant).
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeStatsRow {
    pub experiment: String,
    pub n: u32,
    pub family: String,
    pub variant: String,
    pub seed: u32,
    pub queries: u64,
    pub weak_max: u64,
    pub weak_mean: f64,
    pub weak_p99: u64,
    pub strong_max: u64,
    pub strong_mean: f64,
    pub strong_p99: u64,
    /// Legality / validity flag from the verify layer.
    pub ok: bool,
    /// Flat key=value pairs, `;`-separated: verdict metrics, matching sizes,
    /// bound references.
    pub notes: String,
}

fn aggregate(stats: &[ProbeStats]) -> (u64, f64, u64, u64, f64, u64) {
    if stats.is_empty() {
        return (0, 0.0, 0, 0, 0.0, 0);
    }
    let mut weak: Vec<u64> = stats.iter().map(|s| s.weak).collect();
    let mut strong: Vec<u64> = stats.iter().map(|s| s.strong).collect();
    weak.sort_unstable();
    strong.sort_unstable();
    let p99 = |v: &[u64]| v[((v.len() - 1) as f64 * 0.99) as usize];
    let mean = |v: &[u64]| v.iter().sum::<u64>() as f64 / v.len() as f64;
    (
        *weak.last().unwrap(),
        mean(&weak),
        p99(&weak),
        *strong.last().unwrap(),
        mean(&strong),
        p99(&strong),
    )
}

fn sample_indices(count: usize, cap: usize, seed: u64) -> Vec<usize> {
    if count <= cap {
        return (0..count).collect();
    }
    let mut idx: Vec<usize> = (0..count).collect();
    SplitMix64::new(seed).shuffle(&mut idx);
    idx.truncate(cap);
    idx.sort_unstable();
    idx
}

fn notes_from(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn point_seed(master: u64, n: u32, seed_idx: u32, salt: u64) -> u64 {
    mix64(master ^ mix64(n as u64) ^ mix64(seed_idx as u64 + 1) ^ salt)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ProbeStatsRow>, BenchError> {
    let points: Vec<(u32, u32)> =
        cfg.grid.iter().flat_map(|&n| (0..cfg.seeds).map(move |s| (n, s))).collect();
    let threads = cfg
        .threads
        .or_else(|| std::env::var("LCA_THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| BenchError::IoFailure(e.to_string()))?;
    let results: Vec<Result<Vec<ProbeStatsRow>, BenchError>> =
        pool.install(|| points.par_iter().map(|&(n, seed)| run_point(cfg, n, seed)).collect());
    let mut rows = Vec::new();
    for r in results {
        match r {
            Ok(mut rs) => rows.append(&mut rs),
            // A failed point becomes a failed row; the run continues.
            Err(e) => {
                let mut row = blank_row(cfg, 0, "error", "error", 0);
                row.notes = notes_from(&[("error", e.to_string())]);
                rows.push(row);
            }
        }
    }
    rows.sort_by(|a, b| {
        (a.n, &a.family, &a.variant, a.seed).cmp(&(b.n, &b.family, &b.variant, b.seed))
    });
    Ok(rows)
}

fn run_point(cfg: &ExperimentConfig, n: u32, seed_idx: u32) -> Result<Vec<ProbeStatsRow>, BenchError> {
    match cfg.experiment {
        ExperimentId::Weak3Scaling => weak3_point(cfg, n, seed_idx),
        ExperimentId::Weak2DetScaling => weak2det_point(cfg, n, seed_idx),
        ExperimentId::Weak2RandVariants => weak2rand_point(cfg, n, seed_idx),
        ExperimentId::MonoPathLengths => mono_point(cfg, n, seed_idx),
        ExperimentId::DirectedPathLengths => directed_point(cfg, n, seed_idx),
        ExperimentId::CliqueChainBlowup => clique_point(cfg, n, seed_idx),
        ExperimentId::MatchingRatio => matching_ratio_point(cfg, n, seed_idx),
        ExperimentId::SparsifyMarginals => sparsify_point(cfg, n, seed_idx),
        ExperimentId::VcFamilyStructure => vc_point(cfg, n, seed_idx),
    }
}

fn blank_row(cfg: &ExperimentConfig, n: u32, family: &str, variant: &str, seed: u32) -> ProbeStatsRow {
    ProbeStatsRow {
        experiment: cfg.experiment.name().into(),
        n,
        family: family.into(),
        variant: variant.into(),
        seed,
        queries: 0,
        weak_max: 0,
        weak_mean: 0.0,
        weak_p99: 0,
        strong_max: 0,
        strong_mean: 0.0,
        strong_p99: 0,
        ok: false,
        notes: String::new(),
    }
}

/// Sweep a per-vertex coloring LCA: probe stats over the sampled queries,
/// plus a legality verdict (full sweep up to 2^13 vertices, neighborhood
/// checks around the sample above that).
fn color_sweep_row(
    cfg: &ExperimentConfig,
    g: &Graph,
    mut row: ProbeStatsRow,
    seed: u64,
    query: &mut dyn FnMut(&Graph, Vertex) -> (u8, ProbeStats),
    extra_notes: &[(&str, String)],
) -> ProbeStatsRow {
    let idx = sample_indices(g.n() as usize, cfg.query_cap as usize, seed ^ 0x5a17);
    let sample: Vec<Vertex> = idx.iter().map(|&i| i as u32 + 1).collect();
    let mut stats = Vec::with_capacity(sample.len());
    for &v in &sample {
        let (_, s) = query(g, v);
        stats.push(s);
    }
    let legal = if (g.n() as usize) <= (1 << 13) {
        let colors: Vec<u8> = g.vertices().map(|v| query(g, v).0).collect();
        g.vertices().all(|v| {
            g.row(v).is_empty()
                || g.row(v).iter().any(|&w| colors[w as usize - 1] != colors[v as usize - 1])
        })
    } else {
        sample.iter().all(|&v| {
            g.row(v).is_empty() || {
                let c = query(g, v).0;
                g.row(v).iter().any(|&w| query(g, w).0 != c)
            }
        })
    };
    let (wm, wme, wp, sm, sme, sp) = aggregate(&stats);
    row.queries = sample.len() as u64;
    row.weak_max = wm;
    row.weak_mean = wme;
    row.weak_p99 = wp;
    row.strong_max = sm;
    row.strong_mean = sme;
    row.strong_p99 = sp;
    row.ok = legal;
    row.notes = notes_from(extra_notes);
    row
}

fn weak3_point(cfg: &ExperimentConfig, n: u32, seed_idx: u32) -> Result<Vec<ProbeStatsRow>, BenchError> {
    let ps = point_seed(cfg.master_seed, n, seed_idx, 0x33);
    let t_n = MgpsSchedule::for_n(n).t_n;
    let notes = [("t_n", t_n.to_string()), ("bound", (t_n + 1).to_string())];
    let mut rows = Vec::new();
    for (family, spec) in [
        ("ring", InstanceSpec::ring(n).with_seed(ps)),
        ("random-regular", InstanceSpec::random_regular(n, cfg.degree, ps)),
    ] {
        let g = generate(&spec)?.graph;
        let row = blank_row(cfg, n, family, "weak3", seed_idx);
        rows.push(color_sweep_row(
            cfg,
            &g,
            row,
            ps,
            &mut |g, v| {
                let mut s = ProbeSession::new(g);
                let c = weak3_lca(&mut s, v).expect("non-isolated");
                (c, s.stats())
            },
            &notes,
        ));
    }
    Ok(rows)
}

fn weak2det_point(cfg: &ExperimentConfig, n: u32, seed_idx: u32) -> Result<Vec<ProbeStatsRow>, BenchError> {
    let ps = point_seed(cfg.master_seed, n, seed_idx, 0x2de7);
    let t_n = MgpsSchedule::for_n(n).t_n;
    let d = cfg.degree;
    let g = generate(&InstanceSpec::random_regular(n, d, ps))?.graph;
    let notes =
        [("t_n", t_n.to_string()), ("bound", (t_n as u64 + 1 + 2 * d as u64).to_string())];
    let row = blank_row(cfg, n, "random-regular", "weak2det", seed_idx);
    Ok(vec![color_sweep_row(
        cfg,
        &g,
        row,
        ps,
        &mut |g, v| {
            let mut s = ProbeSession::new(g);
            let c = weak2_det_lca(&mut s, v).expect("non-isolated");
            (c, s.stats())
        },
        &notes,
    )])
}

fn weak2rand_point(cfg: &ExperimentConfig, n: u32, seed_idx: u32) -> Result<Vec<ProbeStatsRow>, BenchError> {
    let ps = point_seed(cfg.master_seed, n, seed_idx, 0x24a2d);
    let g = generate(&InstanceSpec::random_regular(n, cfg.degree, ps))?.graph;
    let cs = ColorSeed::true_random(ps ^ 0xc7);
    let ranks = RankAssignment::new(ps ^ 0x4a);
    let mut rows = Vec::new();
    for (scheme, model, variant) in [
        (Scheme::Arbitrary, ProbeModel::Strong, "arbitrary-strong"),
        (Scheme::Arbitrary, ProbeModel::Weak, "arbitrary-weak"),
        (Scheme::RandomLowestNeighbor, ProbeModel::Strong, "rln-strong"),
        (Scheme::RandomLowestNeighbor, ProbeModel::Weak, "rln-weak"),
    ] {
        let bound = 4 * (32 - n.leading_zeros()) as u64 + 2;
        let notes = [("strong_bound", bound.to_string())];
        let row = blank_row(cfg, n, "random-regular", variant, seed_idx);
        rows.push(color_sweep_row(
            cfg,
            &g,
            row,
            ps,
            &mut |g, v| {
                let mut s = ProbeSession::new(g);
                let c = weak2_rand_lca(&mut s, v, &cs, scheme, model, Some(&ranks))
                    .expect("non-isolated");
                (c, s.stats())
            },
            &notes,
        ));
    }
    Ok(rows)
}

fn mono_point(cfg: &ExperimentConfig, n: u32, seed_idx: u32) -> Result<Vec<ProbeStatsRow>, BenchError> {
    let ps = point_seed(cfg.master_seed, n, seed_idx, 0x0030);
    let g = generate(&InstanceSpec::random_regular(n, cfg.degree, ps))?.graph;
    let cs = ColorSeed::true_random(ps ^ 0x1111);
    let ranks = RankAssignment::new(ps ^ 0x2222);
    let mut rows = Vec::new();
    for (scheme, variant) in
        [(Scheme::Arbitrary, "arbitrary"), (Scheme::RandomLowestNeighbor, "random-lowest-neighbor")]
    {
        let pa = assign_parents(&g, scheme, Some(&ranks))
            .map_err(|e| BenchError::IoFailure(e.to_string()))?;
        let max_walk = g.vertices().map(|v| mono_walk_len(&pa, &cs, v)).max().unwrap_or(0);
        let mut row = blank_row(cfg, n, "random-regular", variant, seed_idx);
        row.queries = g.n() as u64;
        row.ok = true;
        row.notes = notes_from(&[("max_mono_walk", max_walk.to_string())]);
        rows.push(row);
    }
    Ok(rows)
}

fn directed_point(cfg: &ExperimentConfig, n: u32, seed_idx: u32) -> Result<Vec<ProbeStatsRow>, BenchError> {
    let ps = point_seed(cfg.master_seed, n, seed_idx, 0xd12);
    let g = generate(&InstanceSpec::random_regular(n, cfg.degree, ps))?.graph;
    let ranks = RankAssignment::new(ps ^ 0x3333);
    let mut rows = Vec::new();
    for scheme in [
        Scheme::Arbitrary,
        Scheme::LowestNeighbor,
        Scheme::LowestId,
        Scheme::Random,
        Scheme::RandomLowestNeighbor,
        Scheme::RandomLowestId,
    ] {
        let pa = assign_parents(&g, scheme, Some(&ranks))
            .map_err(|e| BenchError::IoFailure(e.to_string()))?;
        let max_path = g.vertices().map(|v| walk_parents(&pa, v).path.len() - 1).max().unwrap_or(0);
        let mut row = blank_row(cfg, n, "random-regular", scheme.name(), seed_idx);
        row.queries = g.n() as u64;
        row.ok = true;
        row.notes = notes_from(&[("max_directed_path", max_path.to_string())]);
        rows.push(row);
    }
    Ok(rows)
}

fn clique_point(cfg: &ExperimentConfig, n: u32, seed_idx: u32) -> Result<Vec<ProbeStatsRow>, BenchError> {
    let ps = point_seed(cfg.master_seed, n, seed_idx, 0xc11e);
    let inst = generate(&InstanceSpec::clique_chain(n, cfg.clique_c))?;
    let g = inst.graph;
    let cs = ColorSeed::true_random(ps ^ 0x7777);
    let notes = [
        ("clique_size", inst.meta["clique_size"].clone()),
        ("cliques", inst.meta["cliques"].clone()),
    ];
    let row = blank_row(cfg, g.n(), "clique-chain", "arbitrary-weak", seed_idx);
    Ok(vec![color_sweep_row(
        cfg,
        &g,
        row,
        ps,
        &mut |g, v| {
            let mut s = ProbeSession::new(g);
            let c = weak2_rand_lca(&mut s, v, &cs, Scheme::Arbitrary, ProbeModel::Weak, None)
                .expect("non-isolated");
            (c, s.stats())
        },
        &notes,
    )])
}

fn matching_ratio_point(cfg: &ExperimentConfig, n: u32, seed_idx: u32) -> Result<Vec<ProbeStatsRow>, BenchError> {
    let ps = point_seed(cfg.master_seed, n, seed_idx, 0x3a7c4);
    let inst = generate(&InstanceSpec::random_regular_bipartite(n, cfg.degree, ps))?;
    let g = inst.graph;
    let rs = RankSeed::new(ps ^ 0x9999);
    let edges = g.edges();
    let mut rows = Vec::new();

    // Plain greedy with per-query probe accounting.
    {
        let idx = sample_indices(edges.len(), cfg.query_cap as usize, ps ^ 0xaa);
        let mut stats = Vec::new();
        let mut matched_sample = 0usize;
        for &i in &idx {
            let mut s = ProbeSession::new(&g);
            let d = rg_lca_query(&mut s, edges[i], &rs)
                .map_err(|e| BenchError::IoFailure(e.to_string()))?;
            if d.verdict == MatchVerdict::Matched {
                matched_sample += 1;
            }
            stats.push(s.stats());
        }
        let greedy = global_greedy_matching(&g, &rs);
        let decisions = decisions_from_matching(&g, &greedy);
        let verdict = verify_matching(&g, &decisions, MatchCheck::Ratio)
            .map_err(|e| BenchError::IoFailure(e.to_string()))?;
        let (wm, wme, wp, sm, sme, sp) = aggregate(&stats);
        let mut row = blank_row(cfg, n, "random-regular-bipartite", "rg", seed_idx);
        row.queries = idx.len() as u64;
        row.weak_max = wm;
        row.weak_mean = wme;
        row.weak_p99 = wp;
        row.strong_max = sm;
        row.strong_mean = sme;
        row.strong_p99 = sp;
        row.ok = verdict.passed;
        row.notes = notes_from(&[
            ("matched", format!("{}", greedy.len())),
            ("optimum", format!("{}", verdict.metrics["optimum"])),
            ("ratio", format!("{:.6}", verdict.metrics["ratio"])),
            ("sample_matched", matched_sample.to_string()),
        ]);
        rows.push(row);
    }

    // Regular pipeline (sparsify + phase hierarchy), shared-context sweep.
    {
        let verdicts = regular_matching_sweep(&g, &edges, cfg.eps, &rs, ps ^ 0xbb, cfg.q)
            .map_err(|e| BenchError::IoFailure(e.to_string()))?;
        let matched: Vec<(Vertex, Vertex)> = edges
            .iter()
            .zip(&verdicts)
            .filter(|(_, v)| **v == MatchVerdict::Matched)
            .map(|(e, _)| *e)
            .collect();
        let decisions = decisions_from_matching(&g, &matched);
        let verdict = verify_matching(&g, &decisions, MatchCheck::Ratio)
            .map_err(|e| BenchError::IoFailure(e.to_string()))?;
        let optimum = verdict.metrics["optimum"];
        let target = (1.0 - cfg.eps) * (n as f64 / 2.0);
        let mut row = blank_row(cfg, n, "random-regular-bipartite", "regular-pipeline", seed_idx);
        row.queries = edges.len() as u64;
        row.ok = verdict.passed && optimum == n as f64 / 2.0;
        row.notes = notes_from(&[
            ("matched", format!("{}", matched.len())),
            ("optimum", format!("{optimum}")),
            ("ratio", format!("{:.6}", verdict.metrics["ratio"])),
            ("target", format!("{target:.1}")),
            ("eps", format!("{}", cfg.eps)),
        ]);
        rows.push(row);
    }
    Ok(rows)
}

/// P(Bin(trials, p) > cap), computed by direct summation.
pub fn binomial_tail_above(trials: u32, p: f64, cap: u32) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for k in (cap + 1)..=trials {
        let mut logp = 0.0;
        for i in 0..k {
            logp += ((trials - i) as f64).ln() - ((i + 1) as f64).ln();
        }
        logp += k as f64 * p.ln() + (trials - k) as f64 * (1.0 - p).ln();
        total += logp.exp();
    }
    total
}

fn sparsify_point(cfg: &ExperimentConfig, n: u32, seed_idx: u32) -> Result<Vec<ProbeStatsRow>, BenchError> {
    let ps = point_seed(cfg.master_seed, n, seed_idx, 0x5a55);
    let d = cfg.degree.max(4);
    let q = cfg.q.unwrap_or((d / 4).max(1));
    let g = generate(&InstanceSpec::random_regular(n, d, ps))?.graph;
    let view = SparsifiedView::new(&g, SparsifyParams::regular(q, d, ps ^ 0xcc));
    let edges = g.edges();
    let kept = edges.iter().filter(|&&(u, v)| view.survives(u, v)).count();
    let dropped = g.vertices().filter(|&v| !view.alive(v)).count();
    let survival = kept as f64 / edges.len() as f64;
    let drop_freq = dropped as f64 / n as f64;
    let expected_drop = binomial_tail_above(d, view.params.survival_p, q);
    let mut stats = Vec::new();
    let idx = sample_indices(n as usize, cfg.query_cap as usize, ps ^ 0xdd);
    for &i in &idx {
        let mut s = ProbeSession::new(&g);
        crate::matching::sparsified_probe(&mut s, i as u32 + 1, &view)
            .map_err(|e| BenchError::IoFailure(e.to_string()))?;
        stats.push(s.stats());
    }
    let (wm, wme, wp, sm, sme, sp) = aggregate(&stats);
    // The +-0.01 band applies at the 1e5-sample scale; smaller points get a
    // five-sigma binomial band instead.
    let p = view.params.survival_p;
    let edge_band = (0.01f64).max(5.0 * (p * (1.0 - p) / edges.len() as f64).sqrt());
    let drop_band =
        (0.01f64).max(5.0 * (expected_drop * (1.0 - expected_drop) / n as f64).sqrt());
    let mut row = blank_row(cfg, n, "random-regular", "regular-sparsify", seed_idx);
    row.queries = idx.len() as u64;
    row.weak_max = wm;
    row.weak_mean = wme;
    row.weak_p99 = wp;
    row.strong_max = sm;
    row.strong_mean = sme;
    row.strong_p99 = sp;
    row.ok = (survival - p).abs() <= edge_band
        && (drop_freq - expected_drop).abs() <= drop_band
        && sm <= q as u64 + 1;
    row.notes = notes_from(&[
        ("survival", format!("{survival:.5}")),
        ("survival_p", format!("{p:.5}")),
        ("edge_band", format!("{edge_band:.5}")),
        ("drop_freq", format!("{drop_freq:.5}")),
        ("drop_expected", format!("{expected_drop:.5}")),
        ("drop_band", format!("{drop_band:.5}")),
        ("q", q.to_string()),
    ]);
    Ok(vec![row])
}

fn vc_point(cfg: &ExperimentConfig, p: u32, seed_idx: u32) -> Result<Vec<ProbeStatsRow>, BenchError> {
    let ps = point_seed(cfg.master_seed, p, seed_idx, 0x7c);
    let double = PolyBipartiteDouble::build(p, 3, ps)?;
    let mut rng = SplitMix64::new(ps ^ 0xee);
    let e1 = double_random_edge(&double, 0, &mut rng);
    let e2 = double_random_edge(&double, 1, &mut rng);
    let fused = double.fuse(e1, e2).map_err(|e| BenchError::IoFailure(e.to_string()))?;
    // Maximal matching endpoints 2-approximate the cover; compare against
    // the designed cover size 2p^2 + 1.
    let rs = RankSeed::new(ps ^ 0xff);
    let greedy = global_greedy_matching(&fused, &rs);
    let decisions = decisions_from_matching(&fused, &greedy);
    let cover = crate::verify::derived_vertex_cover(&fused, &decisions)
        .map_err(|e| BenchError::IoFailure(e.to_string()))?;
    let bound = 2 * p * p + 1;
    let mut row = blank_row(cfg, fused.n(), "fused-vc", "derived-cover", seed_idx);
    row.queries = fused.edge_count() as u64;
    row.ok = cover.passed;
    row.notes = notes_from(&[
        ("p", p.to_string()),
        ("cover_size", format!("{}", cover.metrics["cover_size"])),
        ("designed_bound", bound.to_string()),
        ("ratio_vs_bound", format!("{:.4}", cover.metrics["cover_size"] / bound as f64)),
    ]);
    Ok(vec![row])
}

fn double_random_edge(
    double: &PolyBipartiteDouble,
    copy: u32,
    rng: &mut SplitMix64,
) -> (Vertex, Vertex) {
    let base = copy * double.copy_size;
    loop {
        let u = base + 1 + rng.next_below(double.u_count as u64) as u32;
        let row = double.graph.row(u);
        let w = row[rng.next_below(row.len() as u64) as usize];
        if !double.is_u_side(w) {
            return (u, w);
        }
    }
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

const CSV_HEADER: &str = "experiment,n,family,variant,seed,queries,weak_max,weak_mean,weak_p99,strong_max,strong_mean,strong_p99,ok,notes";

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

impl ProbeStatsRow {
    pub fn csv_line(&self) -> String {
        [
            csv_quote(&self.experiment),
            self.n.to_string(),
            csv_quote(&self.family),
            csv_quote(&self.variant),
            self.seed.to_string(),
            self.queries.to_string(),
            self.weak_max.to_string(),
            format!("{:.4}", self.weak_mean),
            self.weak_p99.to_string(),
            self.strong_max.to_string(),
            format!("{:.4}", self.strong_mean),
            self.strong_p99.to_string(),
            self.ok.to_string(),
            csv_quote(&self.notes),
        ]
        .join(",")
    }
}

pub fn csv_text(rows: &[ProbeStatsRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}

pub fn emit_csv(rows: &[ProbeStatsRow], path: &std::path::Path) -> Result<(), BenchError> {
    assert!(!rows.is_empty(), "refusing to emit an empty experiment");
    std::fs::write(path, csv_text(rows)).map_err(|e| BenchError::IoFailure(e.to_string()))
}
