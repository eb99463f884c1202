//! Graph families used as benchmarks and stress instances: rings, hubbed
//! paths, layered-doubling stacks, clique chains with adversarial port
//! wiring, the inductive regular family, polynomial bipartite graphs and
//! their fused variants, random regular graphs, and affine-plane incidence
//! graphs.

use std::collections::BTreeMap;

use crate::graph::{Graph, GraphError, PortOrder, Vertex};
use crate::mix::{is_prime, mix64, SplitMix64};

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parameter p={0} must be prime")]
    PrimalityRequired(u64),
    #[error("configuration model failed for n={n}, d={d} after {attempts} attempts")]
    RegularityUnsatisfiable { n: u32, d: u32, attempts: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Fuse(#[from] FuseError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceFamily {
    Ring,
    PathWithHub,
    LayeredDoubling,
    CliqueChain,
    PathCliqueGadget,
    BipartiteMinusMatching,
    InductiveFamily,
    PolyBipartite,
    FusedVc,
    RandomRegular,
    AffinePlaneIncidence,
}

impl InstanceFamily {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ring" => Self::Ring,
            "path-with-hub" => Self::PathWithHub,
            "layered-doubling" => Self::LayeredDoubling,
            "clique-chain" => Self::CliqueChain,
            "path-clique-gadget" => Self::PathCliqueGadget,
            "bipartite-minus-matching" => Self::BipartiteMinusMatching,
            "inductive-family" => Self::InductiveFamily,
            "poly-bipartite" => Self::PolyBipartite,
            "fused-vc" => Self::FusedVc,
            "random-regular" => Self::RandomRegular,
            "affine-plane" => Self::AffinePlaneIncidence,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ring => "ring",
            Self::PathWithHub => "path-with-hub",
            Self::LayeredDoubling => "layered-doubling",
            Self::CliqueChain => "clique-chain",
            Self::PathCliqueGadget => "path-clique-gadget",
            Self::BipartiteMinusMatching => "bipartite-minus-matching",
            Self::InductiveFamily => "inductive-family",
            Self::PolyBipartite => "poly-bipartite",
            Self::FusedVc => "fused-vc",
            Self::RandomRegular => "random-regular",
            Self::AffinePlaneIncidence => "affine-plane",
        }
    }
}

#[derive(Clone, Debug)]
pub struct InstanceSpec {
    pub family: InstanceFamily,
    pub params: BTreeMap<String, f64>,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(family: InstanceFamily, seed: u64) -> Self {
        Self { family, params: BTreeMap::new(), seed }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn ring(n: u32) -> Self {
        Self::new(InstanceFamily::Ring, 0).with("n", n as f64)
    }

    pub fn path_with_hub(n: u32) -> Self {
        Self::new(InstanceFamily::PathWithHub, 0).with("n", n as f64)
    }

    pub fn layered_doubling(layers: u32, copies: u32) -> Self {
        Self::new(InstanceFamily::LayeredDoubling, 0)
            .with("layers", layers as f64)
            .with("copies", copies as f64)
    }

    pub fn clique_chain(n: u32, c: f64) -> Self {
        Self::new(InstanceFamily::CliqueChain, 0).with("n", n as f64).with("c", c)
    }

    pub fn path_clique_gadget(n: u32, c1: f64, c2: f64) -> Self {
        Self::new(InstanceFamily::PathCliqueGadget, 0)
            .with("n", n as f64)
            .with("c1", c1)
            .with("c2", c2)
    }

    pub fn bipartite_minus_matching(d: u32) -> Self {
        Self::new(InstanceFamily::BipartiteMinusMatching, 0).with("d", d as f64)
    }

    pub fn inductive_family(d: u32, i: u32, seed: u64) -> Self {
        Self::new(InstanceFamily::InductiveFamily, seed).with("d", d as f64).with("i", i as f64)
    }

    pub fn poly_bipartite(p: u32, k: u32) -> Self {
        Self::new(InstanceFamily::PolyBipartite, 0).with("p", p as f64).with("k", k as f64)
    }

    pub fn fused_vc(p: u32, k: u32, seed: u64) -> Self {
        Self::new(InstanceFamily::FusedVc, seed).with("p", p as f64).with("k", k as f64)
    }

    pub fn random_regular(n: u32, d: u32, seed: u64) -> Self {
        Self::new(InstanceFamily::RandomRegular, seed).with("n", n as f64).with("d", d as f64)
    }

    pub fn random_regular_bipartite(n: u32, d: u32, seed: u64) -> Self {
        Self::random_regular(n, d, seed).with("bipartite", 1.0)
    }

    pub fn affine_plane(p: u32) -> Self {
        Self::new(InstanceFamily::AffinePlaneIncidence, 0).with("p", p as f64)
    }

    fn get(&self, key: &str) -> Result<f64, GenError> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| GenError::InvalidParams(format!("missing parameter '{key}'")))
    }

    fn get_u32(&self, key: &str) -> Result<u32, GenError> {
        let v = self.get(key)?;
        if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
            return Err(GenError::InvalidParams(format!("parameter '{key}'={v} must be a small integer")));
        }
        Ok(v as u32)
    }

    fn get_or(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }
}

/// Generated instance: the graph plus family metadata (designated vertices,
/// actual parameters) in a flat key=value map.
#[derive(Clone, Debug)]
pub struct Generated {
    pub graph: Graph,
    pub meta: BTreeMap<String, String>,
}

impl Generated {
    pub fn meta_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            s.push_str(&format!("{k}={v}\n"));
        }
        s
    }
}

pub fn ring_edges(n: u32) -> Vec<(Vertex, Vertex)> {
    let mut edges: Vec<(Vertex, Vertex)> = (1..n).map(|i| (i, i + 1)).collect();
    edges.push((n, 1));
    edges
}

pub fn generate(spec: &InstanceSpec) -> Result<Generated, GenError> {
    let mut meta = BTreeMap::new();
    meta.insert("family".into(), spec.family.name().to_string());
    meta.insert("seed".into(), spec.seed.to_string());
    let graph = match spec.family {
        InstanceFamily::Ring => {
            let n = spec.get_u32("n")?;
            if n < 3 {
                return Err(GenError::InvalidParams("ring needs n >= 3".into()));
            }
            let g = Graph::build(n, &ring_edges(n), PortOrder::Shuffled(spec.seed))?;
            for v in g.vertices() {
                assert_eq!(g.degree(v), 2, "ring must be 2-regular");
            }
            g
        }
        InstanceFamily::PathWithHub => {
            let n = spec.get_u32("n")?;
            if n < 4 {
                return Err(GenError::InvalidParams("path-with-hub needs n >= 4".into()));
            }
            // Path over IDs n-1, n-2, ..., 1 plus a hub named n adjacent to all.
            let mut edges: Vec<(Vertex, Vertex)> = (1..n - 1).map(|i| (i, i + 1)).collect();
            for v in 1..n {
                edges.push((n, v));
            }
            meta.insert("hub".into(), n.to_string());
            meta.insert("path_high_end".into(), (n - 1).to_string());
            let g = Graph::build(n, &edges, PortOrder::Shuffled(spec.seed))?;
            assert_eq!(g.degree(n), n - 1, "hub reaches everything (diameter 2)");
            g
        }
        InstanceFamily::LayeredDoubling => {
            let layers = spec.get_u32("layers")?;
            let copies = spec.get_u32("copies")?.max(1);
            if layers < 1 {
                return Err(GenError::InvalidParams("layered-doubling needs layers >= 1".into()));
            }
            let per_copy: u32 = (0..=layers).map(|i| 1u32 << i).sum();
            let n = per_copy * copies;
            let mut edges = Vec::new();
            for c in 0..copies {
                let base = c * per_copy;
                let mut layer_start = base + 1;
                for i in 0..layers {
                    let a_size = 1u32 << i;
                    let b_start = layer_start + a_size;
                    let b_size = 1u32 << (i + 1);
                    for a in layer_start..layer_start + a_size {
                        for b in b_start..b_start + b_size {
                            edges.push((a, b));
                        }
                    }
                    layer_start = b_start;
                }
            }
            meta.insert("layers".into(), layers.to_string());
            meta.insert("copies".into(), copies.to_string());
            meta.insert("per_copy".into(), per_copy.to_string());
            let g = Graph::build(n, &edges, PortOrder::Shuffled(spec.seed))?;
            // Layer sizes are exactly 2^0..2^layers per copy by construction;
            // spot-check the boundary degrees.
            assert_eq!(g.degree(1), 2, "layer-0 vertex sees exactly layer 1");
            g
        }
        InstanceFamily::CliqueChain => {
            let n_target = spec.get_u32("n")?;
            let c = spec.get_or("c", 0.5);
            if n_target < 8 || c <= 0.0 {
                return Err(GenError::InvalidParams("clique-chain needs n >= 8, c > 0".into()));
            }
            let k = ((c * (n_target as f64).log2()).ceil() as u32).max(3);
            let t = (n_target / k).max(2);
            let n = t * k;
            // Port-1 entries are adversarial: within each clique the spine
            // v_1 -> v_2 -> ... -> v_k (and v_k -> v_{k-1}) occupies port 1,
            // so an all-one-color clique forces the parent walk through every
            // vertex. Spine edges are inserted high-to-low to pin both
            // endpoints' first ports, bridges are appended last.
            let mut edges = Vec::new();
            for q in 0..t {
                let base = q * k;
                for i in (1..k).rev() {
                    edges.push((base + i, base + i + 1));
                }
                for i in 1..=k {
                    for j in i + 2..=k {
                        edges.push((base + i, base + j));
                    }
                }
            }
            for q in 0..t - 1 {
                // Single bridge between consecutive cliques at their spine ends.
                edges.push((q * k + k, (q + 1) * k + k));
            }
            meta.insert("cliques".into(), t.to_string());
            meta.insert("clique_size".into(), k.to_string());
            let g = Graph::build(n, &edges, PortOrder::Insertion)?;
            for q in 0..t {
                let base = q * k;
                for i in 1..k {
                    assert_eq!(g.row(base + i)[0], base + i + 1, "spine port 1");
                }
                assert_eq!(g.row(base + k)[0], base + k - 1, "spine tail port 1");
            }
            g
        }
        InstanceFamily::PathCliqueGadget => {
            let n_target = spec.get_u32("n")?;
            let c1 = spec.get_or("c1", 0.5);
            let c2 = spec.get_or("c2", 0.5);
            if n_target < 16 || c1 <= 0.0 || c2 <= 0.0 {
                return Err(GenError::InvalidParams("path-clique-gadget needs n >= 16, c1,c2 > 0".into()));
            }
            let logn = (n_target as f64).log2();
            let r = ((c1 * logn / logn.log2()).ceil() as u32).max(2);
            let k = ((c2 * logn).ceil() as u32).max(2);
            let per = r + k;
            let copies = (n_target / per).max(1);
            let n = copies * per;
            let mut edges = Vec::new();
            for q in 0..copies {
                let base = q * per;
                // Path spine, inserted high-to-low so port 1 walks it.
                for i in (1..r).rev() {
                    edges.push((base + i, base + i + 1));
                }
                // Clique behind the path.
                for i in 1..=k {
                    for j in i + 1..=k {
                        edges.push((base + r + i, base + r + j));
                    }
                }
                // Every path vertex joined to every clique vertex.
                for i in 1..=r {
                    for j in 1..=k {
                        edges.push((base + i, base + r + j));
                    }
                }
            }
            meta.insert("copies".into(), copies.to_string());
            meta.insert("path_len".into(), r.to_string());
            meta.insert("clique_size".into(), k.to_string());
            Graph::build(n, &edges, PortOrder::Insertion)?
        }
        InstanceFamily::BipartiteMinusMatching => {
            let d = spec.get_u32("d")?;
            if d < 2 {
                return Err(GenError::InvalidParams("bipartite-minus-matching needs d >= 2".into()));
            }
            let g = bipartite_minus_matching(d, 0)?;
            for v in g.vertices() {
                assert_eq!(g.degree(v), d);
            }
            g
        }
        InstanceFamily::InductiveFamily => {
            let d = spec.get_u32("d")?;
            let i = spec.get_u32("i")?;
            if d < 3 || i < 1 {
                return Err(GenError::InvalidParams("inductive-family needs d >= 3, i >= 1".into()));
            }
            if 2 * i as u64 >= d as u64 + 3 {
                meta.insert(
                    "note".into(),
                    format!("i={i} is outside the probe lower-bound window 2i < d+3"),
                );
            }
            let mut rng = SplitMix64::new(spec.seed);
            let (n, edges) = inductive_member(d, i, &mut rng);
            let g = Graph::build(n, &edges, PortOrder::Shuffled(spec.seed))?;
            for v in g.vertices() {
                assert_eq!(g.degree(v), d, "inductive member stays d-regular");
            }
            let bound = 2 * (d as u64 + 1).pow(i);
            assert!(n as u64 <= bound, "n_i <= 2(d+1)^i");
            meta.insert("level".into(), i.to_string());
            meta.insert("n_bound".into(), bound.to_string());
            g
        }
        InstanceFamily::PolyBipartite => {
            let p = spec.get_u32("p")?;
            let k = spec.get_u32("k")?;
            let pb = PolyBipartite::build(p, k, spec.seed)?;
            meta.insert("p".into(), p.to_string());
            meta.insert("k".into(), k.to_string());
            meta.insert("u_count".into(), pb.u_count.to_string());
            meta.insert("w_count".into(), (p * p).to_string());
            pb.graph
        }
        InstanceFamily::FusedVc => {
            let p = spec.get_u32("p")?;
            let k = spec.get_u32("k")?;
            let double = PolyBipartiteDouble::build(p, k, spec.seed)?;
            let mut rng = SplitMix64::new(spec.seed ^ 0xf05e);
            let e1 = double.random_cross_edge(0, &mut rng);
            let e2 = double.random_cross_edge(1, &mut rng);
            let fused = double.fuse(e1, e2)?;
            meta.insert("p".into(), p.to_string());
            meta.insert("k".into(), k.to_string());
            meta.insert("fusion_u1".into(), e1.0.to_string());
            meta.insert("fusion_w1".into(), e1.1.to_string());
            meta.insert("fusion_u2".into(), e2.0.to_string());
            meta.insert("fusion_w2".into(), e2.1.to_string());
            meta.insert("cover_bound".into(), (2 * p * p + 1).to_string());
            fused
        }
        InstanceFamily::RandomRegular => {
            let n = spec.get_u32("n")?;
            let d = spec.get_u32("d")?;
            let bipartite = spec.get_or("bipartite", 0.0) != 0.0;
            let g = if bipartite {
                random_regular_bipartite(n, d, spec.seed)?
            } else {
                random_regular(n, d, spec.seed)?
            };
            for v in g.vertices() {
                assert_eq!(g.degree(v), d, "configuration model must deliver d-regular");
            }
            if bipartite {
                assert!(g.is_bipartite().is_some());
                meta.insert("bipartite".into(), "1".into());
            }
            meta.insert("d".into(), d.to_string());
            g
        }
        InstanceFamily::AffinePlaneIncidence => {
            let p = spec.get_u32("p")?;
            let pb = PolyBipartite::build(p, 2, spec.seed)?;
            meta.insert("p".into(), p.to_string());
            let g = pb.graph;
            if p >= 3 && g.n() <= 10_000 {
                assert_eq!(g.girth(), Some(6), "affine-plane incidence girth");
            }
            g
        }
    };
    graph.check_invariants()?;
    meta.insert("n".into(), graph.n().to_string());
    meta.insert("m".into(), graph.edge_count().to_string());
    Ok(Generated { graph, meta })
}

fn bipartite_minus_matching(d: u32, base: u32) -> Result<Graph, GenError> {
    // Vertices base+1..=base+2d+2; sides of size d+1; i-th left vertex skips
    // the i-th right vertex.
    let side = d + 1;
    let mut edges = Vec::new();
    for i in 1..=side {
        for j in 1..=side {
            if i != j {
                edges.push((base + i, base + side + j));
            }
        }
    }
    Ok(Graph::build(base + 2 * side, &edges, PortOrder::Insertion)?)
}

/// Edge list of one uniformly random member of the inductive family at the
/// given level, on vertices `1..=n`.
fn inductive_member(d: u32, level: u32, rng: &mut SplitMix64) -> (u32, Vec<(Vertex, Vertex)>) {
    if level == 1 {
        let side = d + 1;
        let mut edges = Vec::new();
        for i in 1..=side {
            for j in 1..=side {
                if i != j {
                    edges.push((i, side + j));
                }
            }
        }
        return (2 * side, edges);
    }
    let mut all_edges = Vec::new();
    let mut offset = 0u32;
    let mut attach = Vec::new();
    for _ in 0..d {
        let (n_sub, sub_edges) = inductive_member(d, level - 1, rng);
        let mut shifted: Vec<(Vertex, Vertex)> =
            sub_edges.iter().map(|&(u, v)| (u + offset, v + offset)).collect();
        let cut = rng.next_below(shifted.len() as u64) as usize;
        let (x, y) = shifted.swap_remove(cut);
        // The removed edge's endpoints split between the two special
        // vertices; which one goes where is a coin flip.
        if rng.next_u64() & 1 == 0 {
            attach.push((x, y));
        } else {
            attach.push((y, x));
        }
        all_edges.extend(shifted);
        offset += n_sub;
    }
    let a = offset + 1;
    let b = offset + 2;
    for (x, y) in attach {
        all_edges.push((a, x));
        all_edges.push((b, y));
    }
    (offset + 2, all_edges)
}

/// The polynomial bipartite construction: one side indexes all degree
/// `< k` polynomials over Z(p), the other all points of the plane; a point
/// connects to every polynomial whose curve passes through it.
pub struct PolyBipartite {
    pub graph: Graph,
    pub p: u32,
    pub k: u32,
    pub u_count: u32,
}

impl PolyBipartite {
    pub fn build(p: u32, k: u32, seed: u64) -> Result<Self, GenError> {
        if !is_prime(p as u64) {
            return Err(GenError::PrimalityRequired(p as u64));
        }
        if k < 2 {
            return Err(GenError::InvalidParams("poly-bipartite needs k >= 2".into()));
        }
        let u_count = (p as u64).checked_pow(k).filter(|&x| x <= 2_000_000)
            .ok_or_else(|| GenError::InvalidParams(format!("p^k too large: {p}^{k}")))? as u32;
        let w_count = p * p;
        let n = u_count + w_count;
        let mut edges = Vec::new();
        for u in 0..u_count {
            // Coefficient tuple = digits of u base p: a_0 + a_1 x + ...
            for b0 in 0..p {
                let mut acc = 0u64;
                let mut pow = 1u64;
                let mut rest = u as u64;
                for _ in 0..k {
                    let coef = rest % p as u64;
                    rest /= p as u64;
                    acc = (acc + coef * pow) % p as u64;
                    pow = (pow * b0 as u64) % p as u64;
                }
                let b1 = acc as u32;
                let w = u_count + b0 * p + b1 + 1;
                edges.push((u + 1, w));
            }
        }
        let graph = Graph::build(n, &edges, PortOrder::Shuffled(seed))?;
        // Structural predicate: the shared-neighborhood bound. Exhaustive on
        // small sides, sampled above.
        let exhaustive = u_count <= 3000;
        let pairs: Vec<(u32, u32)> = if exhaustive {
            (1..=u_count).flat_map(|a| (a + 1..=u_count).map(move |b| (a, b))).collect()
        } else {
            let mut rng = SplitMix64::new(seed ^ 0x5eed);
            (0..2000)
                .map(|_| {
                    let a = 1 + rng.next_below(u_count as u64) as u32;
                    let mut b = 1 + rng.next_below(u_count as u64) as u32;
                    while b == a {
                        b = 1 + rng.next_below(u_count as u64) as u32;
                    }
                    (a.min(b), a.max(b))
                })
                .collect()
        };
        for (a, b) in pairs {
            let sa: std::collections::HashSet<_> = graph.row(a).iter().collect();
            let shared = graph.row(b).iter().filter(|w| sa.contains(w)).count();
            assert!(shared < k as usize, "shared neighbors {shared} > k-1 for ({a},{b})");
        }
        Ok(Self { graph, p, k, u_count })
    }

    pub fn is_u_side(&self, v: Vertex) -> bool {
        v >= 1 && v <= self.u_count
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FuseError {
    #[error("edge ({0}, {1}) not present")]
    EdgeNotPresent(Vertex, Vertex),
    #[error("edge ({0}, {1}) endpoints are on the wrong sides or wrong copy")]
    WrongSide(Vertex, Vertex),
}

/// Two disjoint copies of the polynomial bipartite graph, the input shape of
/// the fuse operation.
pub struct PolyBipartiteDouble {
    pub graph: Graph,
    pub p: u32,
    pub k: u32,
    pub u_count: u32,
    pub copy_size: u32,
}

impl PolyBipartiteDouble {
    pub fn build(p: u32, k: u32, seed: u64) -> Result<Self, GenError> {
        let single = PolyBipartite::build(p, k, seed)?;
        let copy_size = single.graph.n();
        let n = copy_size * 2;
        let mut edges = single.graph.edges();
        let shifted: Vec<_> = edges.iter().map(|&(u, v)| (u + copy_size, v + copy_size)).collect();
        edges.extend(shifted);
        let graph = Graph::build(n, &edges, PortOrder::Shuffled(seed ^ 1))?;
        Ok(Self { graph, p, k, u_count: single.u_count, copy_size })
    }

    /// Which copy a vertex lives in (0 or 1).
    pub fn copy_of(&self, v: Vertex) -> u32 {
        if v <= self.copy_size {
            0
        } else {
            1
        }
    }

    pub fn is_u_side(&self, v: Vertex) -> bool {
        let local = if v <= self.copy_size { v } else { v - self.copy_size };
        local >= 1 && local <= self.u_count
    }

    fn random_cross_edge(&self, copy: u32, rng: &mut SplitMix64) -> (Vertex, Vertex) {
        let base = copy * self.copy_size;
        loop {
            let u = base + 1 + rng.next_below(self.u_count as u64) as u32;
            let row = self.graph.row(u);
            let w = row[rng.next_below(row.len() as u64) as usize];
            if !self.is_u_side(w) {
                return (u, w);
            }
        }
    }

    /// Remove one (U', W') edge from each copy, join the two U-endpoints,
    /// and join the two freed W-endpoints. A two-edge swap, so every degree
    /// is preserved; the fusion vertices are the U-endpoints.
    pub fn fuse(&self, e1: (Vertex, Vertex), e2: (Vertex, Vertex)) -> Result<Graph, FuseError> {
        for (idx, &(u, w)) in [&e1, &e2].into_iter().enumerate() {
            if !self.graph.has_edge(u, w) {
                return Err(FuseError::EdgeNotPresent(u, w));
            }
            if !self.is_u_side(u) || self.is_u_side(w) || self.copy_of(u) != idx as u32
                || self.copy_of(w) != idx as u32
            {
                return Err(FuseError::WrongSide(u, w));
            }
        }
        let mut edges = self.graph.edges();
        let norm = |(a, b): (Vertex, Vertex)| (a.min(b), a.max(b));
        let (r1, r2) = (norm(e1), norm(e2));
        edges.retain(|&e| e != r1 && e != r2);
        edges.push(norm((e1.0, e2.0)));
        edges.push(norm((e1.1, e2.1)));
        Ok(Graph::build(self.graph.n(), &edges, PortOrder::SortedAscending).expect("fuse keeps validity"))
    }
}

pub fn random_regular(n: u32, d: u32, seed: u64) -> Result<Graph, GenError> {
    if d == 0 || n <= d {
        return Err(GenError::InvalidParams(format!("random-regular needs 0 < d < n, got n={n}, d={d}")));
    }
    if !(n as u64 * d as u64).is_multiple_of(2) {
        return Err(GenError::InvalidParams("random-regular needs n*d even".into()));
    }
    let attempts = 50;
    let mut rng = SplitMix64::new(mix64(seed ^ 0xd0));
    'attempt: for _ in 0..attempts {
        let mut stubs: Vec<Vertex> = Vec::with_capacity((n * d) as usize);
        for v in 1..=n {
            for _ in 0..d {
                stubs.push(v);
            }
        }
        rng.shuffle(&mut stubs);
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        let mut seen = std::collections::HashSet::with_capacity(stubs.len() / 2);
        // Pair stubs left to right; when the next stub collides, swap in a
        // random later stub instead of restarting the whole pairing.
        let mut i = 0;
        while i < stubs.len() {
            let u = stubs[i];
            let valid = |v: Vertex, seen: &std::collections::HashSet<(Vertex, Vertex)>| {
                v != u && !seen.contains(&(u.min(v), u.max(v)))
            };
            if !valid(stubs[i + 1], &seen) {
                let mut fixed = false;
                for _ in 0..64 {
                    let span = stubs.len() - i - 1;
                    let j = i + 1 + rng.next_below(span as u64) as usize;
                    if valid(stubs[j], &seen) {
                        stubs.swap(i + 1, j);
                        fixed = true;
                        break;
                    }
                }
                if !fixed {
                    // Deterministic sweep as a last resort for the tail.
                    match (i + 1..stubs.len()).find(|&j| valid(stubs[j], &seen)) {
                        Some(j) => stubs.swap(i + 1, j),
                        None => continue 'attempt,
                    }
                }
            }
            let v = stubs[i + 1];
            seen.insert((u.min(v), u.max(v)));
            edges.push((u, v));
            i += 2;
        }
        return Ok(Graph::build(n, &edges, PortOrder::Shuffled(mix64(seed)))?);
    }
    Err(GenError::RegularityUnsatisfiable { n, d, attempts })
}

/// Two-sided configuration model: a d-regular bipartite graph on sides of
/// size n/2 each.
pub fn random_regular_bipartite(n: u32, d: u32, seed: u64) -> Result<Graph, GenError> {
    if !n.is_multiple_of(2) {
        return Err(GenError::InvalidParams("bipartite regular needs even n".into()));
    }
    let half = n / 2;
    if d == 0 || half < d {
        return Err(GenError::InvalidParams(format!("needs 0 < d <= n/2, got n={n}, d={d}")));
    }
    let attempts = 50;
    let mut rng = SplitMix64::new(mix64(seed ^ 0xb1b1));
    'attempt: for _ in 0..attempts {
        // Left stubs in fixed order; right stubs shuffled, then pair by index
        // with local repairs against duplicate edges.
        let mut right: Vec<Vertex> = Vec::with_capacity((half * d) as usize);
        for v in half + 1..=n {
            for _ in 0..d {
                right.push(v);
            }
        }
        rng.shuffle(&mut right);
        let mut edges = Vec::with_capacity(right.len());
        let mut seen = std::collections::HashSet::with_capacity(right.len());
        for slot in 0..right.len() {
            let u = (slot as u32 / d) + 1;
            if !seen.contains(&(u, right[slot])) {
                seen.insert((u, right[slot]));
                edges.push((u, right[slot]));
                continue;
            }
            let mut fixed = false;
            for _ in 0..64 {
                let span = right.len() - slot;
                let j = slot + rng.next_below(span as u64) as usize;
                if !seen.contains(&(u, right[j])) {
                    right.swap(slot, j);
                    fixed = true;
                    break;
                }
            }
            if !fixed {
                match (slot..right.len()).find(|&j| !seen.contains(&(u, right[j]))) {
                    Some(j) => right.swap(slot, j),
                    None => continue 'attempt,
                }
            }
            seen.insert((u, right[slot]));
            edges.push((u, right[slot]));
        }
        return Ok(Graph::build(n, &edges, PortOrder::Shuffled(mix64(seed)))?);
    }
    Err(GenError::RegularityUnsatisfiable { n, d, attempts })
}

/// Parse `k=v,k=v` CLI parameter strings.
pub fn parse_params(text: &str) -> Result<BTreeMap<String, f64>, GenError> {
    let mut out = BTreeMap::new();
    if text.trim().is_empty() {
        return Ok(out);
    }
    for part in text.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| GenError::InvalidParams(format!("expected k=v, got '{part}'")))?;
        let val: f64 = v
            .trim()
            .parse()
            .map_err(|e| GenError::InvalidParams(format!("bad value in '{part}': {e}")))?;
        out.insert(k.trim().to_string(), val);
    }
    Ok(out)
}
