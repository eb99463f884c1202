//! Weak-coloring LCAs.
//!
//! Three algorithms: a deterministic weak 3-coloring whose probe count is
//! tied to the iterated-log round schedule of the forest-coloring routine, a
//! deterministic weak 2-coloring extension that pays ~2 d_v extra weak
//! probes at the queried vertex, and a randomized weak 2-coloring whose walk
//! stops at the first vertex with a differing temporary color.
//!
//! The forest 3-coloring runs a fixed number of rounds: bit-contraction
//! rounds of the Cole-Vishkin kind down to 8 possible colors, followed by
//! three palette-descent rounds (8 -> 5 -> 4 proper pair recolorings, then a
//! shift + repick round that lands in {0,1,2}). Every round keeps each
//! vertex's color distinct from its parent's. Each descent round is a
//! bounded-radius function of the parent chain, which is what lets the
//! per-query simulation run inside the probe budget.

use std::collections::HashMap;

use crate::graph::{CellContent, Graph, Vertex};
use crate::mix::{mix64, next_prime_above, GAMMA};
use crate::parent::{ParentAssignment, RankAssignment, Scheme};
use crate::probe::{ProbeError, ProbeSession};

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
pub enum ColoringError {
    #[error("vertex {0} is isolated")]
    IsolatedVertex(Vertex),
    #[error("parent assignment has a self-loop at {0}")]
    SelfLoopPresent(Vertex),
    #[error(transparent)]
    Probe(#[from] ProbeError),
}

// ---------------------------------------------------------------------------
// Round schedule
// ---------------------------------------------------------------------------

/// The fixed round budget for an ID space of size `n`: the bit-length
/// contraction sequence b0 > b1 > ... > 3 (3 is the fixed point of
/// b -> ceil(log2 b) + 1), plus three palette-descent rounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MgpsSchedule {
    pub initial_bits: u32,
    /// The bit-length sequence, starting at `initial_bits`, ending at <= 3.
    pub rounds: Vec<u32>,
    pub contraction_rounds: u32,
    /// Total round count: contraction rounds plus 3 descent rounds.
    pub t_n: u32,
}

fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    if x == 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

impl MgpsSchedule {
    pub fn for_n(n: u32) -> Self {
        let initial_bits = ceil_log2(n as u64 + 1).max(1);
        let mut rounds = vec![initial_bits];
        let mut b = initial_bits;
        while b > 3 {
            b = ceil_log2(b as u64) + 1;
            rounds.push(b);
        }
        let contraction_rounds = rounds.len() as u32 - 1;
        MgpsSchedule { initial_bits, rounds, contraction_rounds, t_n: contraction_rounds + 3 }
    }
}

// ---------------------------------------------------------------------------
// Round functions
// ---------------------------------------------------------------------------

/// One bit-contraction round: the index of the lowest differing bit against
/// the parent, paired with the own bit at that index.
#[inline]
fn contract(own: u64, parent: u64) -> u64 {
    debug_assert_ne!(own, parent);
    let a = (own ^ parent).trailing_zeros() as u64;
    2 * a + ((own >> a) & 1)
}

// Palette-descent tables. Symbols map to pairwise-incomparable 2-subsets;
// recoloring an edge state (own, parent) to the smallest element of
// set(parent) \ set(own) keeps adjacent recolorings distinct, because the
// new color lands inside set(parent) while the parent's lands outside it.
const SQUASH8: [u8; 8] = [
    0b00011, 0b00101, 0b01001, 0b10001, 0b00110, 0b01010, 0b10010, 0b01100,
]; // 2-subsets of {0..4}
const SQUASH5: [u8; 5] = [0b0011, 0b0101, 0b1001, 0b0110, 0b1010]; // of {0..3}

#[inline]
fn squash8(own: u64, parent: u64) -> u64 {
    debug_assert!(own < 8 && parent < 8 && own != parent);
    let diff = SQUASH8[parent as usize] & !SQUASH8[own as usize];
    diff.trailing_zeros() as u64
}

#[inline]
fn squash5(own: u64, parent: u64) -> u64 {
    debug_assert!(own < 5 && parent < 5 && own != parent);
    let diff = SQUASH5[parent as usize] & !SQUASH5[own as usize];
    diff.trailing_zeros() as u64
}

/// Final descent: every vertex takes its parent's color; a vertex that now
/// holds color 3 repicks the smallest of {0,1,2} avoiding its parent's
/// shifted color (the grandparent's previous color) and its children's
/// shifted color (its own previous color).
#[inline]
fn shift_repick(own: u64, parent: u64, grandparent: u64) -> u64 {
    debug_assert!(own < 4 && parent < 4 && own != parent);
    if parent != 3 {
        return parent;
    }
    let mut banned = 0u8;
    if grandparent < 3 {
        banned |= 1 << grandparent;
    }
    if own < 3 {
        banned |= 1 << own;
    }
    (!banned & 0b111).trailing_zeros() as u64
}

// ---------------------------------------------------------------------------
// Global reference coloring
// ---------------------------------------------------------------------------

/// Proper 3-coloring of the unicyclic forest given by a parent assignment
/// without self-loops: the global (non-LCA) reference run. Vertex IDs seed
/// the colors, then the full round schedule executes in parallel rounds.
/// Every round keeps each vertex's color distinct from its parent's, which
/// is asserted round by round.
pub fn mgps_color_forest(n: u32, parents: &ParentAssignment) -> Result<Vec<u8>, ColoringError> {
    for v in 1..=n {
        if parents.parent_of(v) == v {
            return Err(ColoringError::SelfLoopPresent(v));
        }
    }
    let schedule = MgpsSchedule::for_n(n);
    let mut colors: Vec<u64> = (1..=n as u64).collect();
    let par = |v: usize| parents.parent_of(v as Vertex + 1) as usize - 1;

    let apply = |colors: &mut Vec<u64>, f: &dyn Fn(u64, u64, u64) -> u64| {
        let snapshot = colors.clone();
        for v in 0..n as usize {
            let p = par(v);
            colors[v] = f(snapshot[v], snapshot[p], snapshot[par(p)]);
        }
        for v in 0..n as usize {
            assert_ne!(colors[v], colors[par(v)], "round must keep parent edges bichromatic");
        }
    };

    for _ in 0..schedule.contraction_rounds {
        apply(&mut colors, &|own, parent, _| contract(own, parent));
    }
    apply(&mut colors, &|own, parent, _| squash8(own, parent));
    apply(&mut colors, &|own, parent, _| squash5(own, parent));
    apply(&mut colors, &|own, parent, grand| shift_repick(own, parent, grand));
    Ok(colors.into_iter().map(|c| c as u8).collect())
}

// ---------------------------------------------------------------------------
// Chain simulation shared by the weak 3- and 2-coloring LCAs
// ---------------------------------------------------------------------------

/// Parent chain discovered by port-1 probes: either an open path of the
/// requested depth, or closed early because a vertex repeated.
struct Chain {
    ids: Vec<Vertex>,
    /// `Some(j)`: the last element's parent is `ids[j]` (the chain closed).
    closes_at: Option<usize>,
}

/// Probe the port-1 parent chain starting at `v`, spending at most
/// `max_probes` weak probes (one per step), stopping early on a repeat.
fn discover_chain(
    session: &mut ProbeSession<'_>,
    v: Vertex,
    max_probes: u32,
) -> Result<Chain, ColoringError> {
    let mut ids = vec![v];
    let mut index = HashMap::new();
    index.insert(v, 0usize);
    for _ in 0..max_probes {
        let u = *ids.last().unwrap();
        let p = match session.weak_probe(u, 1)? {
            CellContent::Neighbor(w) => w,
            _ => return Err(ColoringError::IsolatedVertex(u)),
        };
        if let Some(&j) = index.get(&p) {
            return Ok(Chain { ids, closes_at: Some(j) });
        }
        index.insert(p, ids.len());
        ids.push(p);
    }
    Ok(Chain { ids, closes_at: None })
}

/// Run the full round schedule on a discovered chain and return the final
/// colors of the first `want` positions. On an open chain each round's
/// output is computable one level less deep than its input (two levels for
/// the final shift+repick); a closed chain simulates exactly everywhere.
fn simulate_chain(n: u32, chain: &Chain, want: usize) -> Vec<u8> {
    let schedule = MgpsSchedule::for_n(n);
    let len = chain.ids.len();
    let mut colors: Vec<u64> = chain.ids.iter().map(|&v| v as u64).collect();

    if let Some(close) = chain.closes_at {
        let par = |i: usize| if i + 1 < len { i + 1 } else { close };
        let apply = |colors: &mut Vec<u64>, f: &dyn Fn(u64, u64, u64) -> u64| {
            let snap = colors.clone();
            for i in 0..len {
                colors[i] = f(snap[i], snap[par(i)], snap[par(par(i))]);
            }
        };
        for _ in 0..schedule.contraction_rounds {
            apply(&mut colors, &|o, p, _| contract(o, p));
        }
        apply(&mut colors, &|o, p, _| squash8(o, p));
        apply(&mut colors, &|o, p, _| squash5(o, p));
        apply(&mut colors, &|o, p, g| shift_repick(o, p, g));
        colors.into_iter().take(want).map(|c| c as u8).collect()
    } else {
        let mut known = len;
        let mut step = |colors: &mut Vec<u64>, radius: usize, f: &dyn Fn(u64, u64, u64) -> u64| {
            let snap = colors.clone();
            for i in 0..known.saturating_sub(radius) {
                let p = snap[i + 1];
                let g = if i + 2 < known { snap[i + 2] } else { 0 };
                colors[i] = f(snap[i], p, g);
            }
            known = known.saturating_sub(radius);
        };
        for _ in 0..schedule.contraction_rounds {
            step(&mut colors, 1, &|o, p, _| contract(o, p));
        }
        step(&mut colors, 1, &|o, p, _| squash8(o, p));
        step(&mut colors, 1, &|o, p, _| squash5(o, p));
        step(&mut colors, 2, &|o, p, g| shift_repick(o, p, g));
        assert!(known >= want, "chain probed too shallow: known {known}, want {want}");
        colors.into_iter().take(want).map(|c| c as u8).collect()
    }
}

// ---------------------------------------------------------------------------
// Weak 3-coloring LCA
// ---------------------------------------------------------------------------

/// Weak 3-coloring by local simulation of the forest coloring over the
/// port-1 parent chain. Uses at most `T_n + 1` weak probes and agrees with
/// [`mgps_color_forest`] on the port-1 parent assignment vertex for vertex.
pub fn weak3_lca(session: &mut ProbeSession<'_>, v: Vertex) -> Result<u8, ColoringError> {
    let n = session.n();
    let schedule = MgpsSchedule::for_n(n);
    let chain = discover_chain(session, v, schedule.t_n + 1)?;
    Ok(simulate_chain(n, &chain, 1)[0])
}

// ---------------------------------------------------------------------------
// Deterministic weak 2-coloring LCA
// ---------------------------------------------------------------------------

/// Post-hoc 2-color of a vertex from final 3-colors: a vertex colored 2
/// flips to the complement of its parent's color, which cannot itself be 2.
fn two_color(own3: u8, parent3: u8) -> u8 {
    if own3 != 2 {
        own3
    } else if parent3 == 1 {
        0
    } else {
        1
    }
}

/// Deterministic weak 2-coloring: the 3-coloring chain simulation, a
/// recolor of color-2 vertices against their parent, and a leaf check that
/// scans the queried vertex's ports and each neighbor's port 1. Leaves flip
/// to the complement of their parent's final color.
pub fn weak2_det_lca(session: &mut ProbeSession<'_>, v: Vertex) -> Result<u8, ColoringError> {
    let n = session.n();
    let schedule = MgpsSchedule::for_n(n);
    // Deep enough for the final colors of v and parent(v).
    let mut chain = discover_chain(session, v, schedule.t_n + 2)?;
    let finals = simulate_chain(n, &chain, 2);
    let (own3, parent3) = (finals[0], finals[1]);
    let own2 = two_color(own3, parent3);

    let parent = chain.ids[1];

    // The parent's port 1 is already on the chain; a mutual-parent pair is
    // never a leaf.
    let parent_port1 = if chain.ids.len() >= 3 { chain.ids[2] } else { chain.ids[chain.closes_at.unwrap()] };
    let mut is_leaf = parent_port1 != v;

    // Discover the remaining neighbors through ports 2.. and ask each
    // non-parent neighbor's port 1 whether it designates v.
    let mut others = Vec::new();
    let mut port = 2u32;
    while port <= session.max_degree() {
        match session.weak_probe(v, port)? {
            CellContent::Neighbor(w) => others.push(w),
            CellContent::Zero => break,
            CellContent::Degree(_) => unreachable!(),
        }
        port += 1;
    }
    if is_leaf {
        for w in others {
            if w == parent {
                continue;
            }
            if let CellContent::Neighbor(x) = session.weak_probe(w, 1)? {
                if x == v {
                    is_leaf = false;
                    break;
                }
            }
        }
    }
    if !is_leaf {
        return Ok(own2);
    }

    // The parent's 2-color needs the grandparent's 3-color only when the
    // parent's 3-color is 2; extend the chain by one probe in that case.
    let parent2 = if parent3 != 2 {
        parent3
    } else {
        if chain.closes_at.is_none() {
            let u = *chain.ids.last().unwrap();
            match session.weak_probe(u, 1)? {
                CellContent::Neighbor(w) => {
                    if let Some(j) = chain.ids.iter().position(|&x| x == w) {
                        chain.closes_at = Some(j);
                    } else {
                        chain.ids.push(w);
                    }
                }
                _ => return Err(ColoringError::IsolatedVertex(u)),
            }
        }
        let finals = simulate_chain(n, &chain, 3);
        two_color(finals[1], finals[2])
    };
    Ok(1 - parent2)
}

// ---------------------------------------------------------------------------
// Temporary color sources
// ---------------------------------------------------------------------------

/// Deterministic source of temporary colors for the randomized 2-coloring.
#[derive(Clone, Debug)]
pub enum ColorSeed {
    /// Full-width mixed bits; stands in for an unbounded random string.
    TrueRandom { seed: u64 },
    /// Degree-(k-1) polynomial over a prime field evaluated at the vertex;
    /// any k evaluations at distinct points are exactly uniform over the
    /// field. The color is the evaluation's low bit.
    KWisePoly { modulus: u64, coeffs: Vec<u64> },
}

impl ColorSeed {
    pub fn true_random(seed: u64) -> Self {
        ColorSeed::TrueRandom { seed }
    }

    /// k-wise polynomial source with coefficients derived from `seed`.
    pub fn k_wise(seed: u64, k: u32, modulus: u64) -> Self {
        assert!(crate::mix::is_prime(modulus), "modulus must be prime");
        let coeffs = (0..k)
            .map(|i| mix64(seed.wrapping_add((i as u64 + 1).wrapping_mul(GAMMA))) % modulus)
            .collect();
        ColorSeed::KWisePoly { modulus, coeffs }
    }

    /// From explicit coefficients (lowest degree first), for enumeration tests.
    pub fn from_coeffs(modulus: u64, coeffs: Vec<u64>) -> Self {
        ColorSeed::KWisePoly { modulus, coeffs }
    }

    /// Default parameters for an `n`-vertex graph: independence
    /// `4 * ceil(log2 n)`, prime modulus just above `n`.
    pub fn k_wise_default(seed: u64, n: u32) -> Self {
        let k = 4 * ceil_log2(n as u64).max(1);
        Self::k_wise(seed, k, next_prime_above(n as u64))
    }

    /// Field evaluation (the raw word in the true-random mode).
    pub fn eval(&self, v: Vertex) -> u64 {
        match self {
            ColorSeed::TrueRandom { seed } => mix64(seed ^ 0xc010 ^ ((v as u64) << 17)),
            ColorSeed::KWisePoly { modulus, coeffs } => {
                let x = v as u64 % modulus;
                let mut acc = 0u64;
                for &c in coeffs.iter().rev() {
                    acc = (crate::mix::mul_mod(acc, x, *modulus) + c) % *modulus;
                }
                acc
            }
        }
    }

    /// The temporary color of `v`.
    pub fn c_temp(&self, v: Vertex) -> u8 {
        (self.eval(v) & 1) as u8
    }
}

// ---------------------------------------------------------------------------
// Randomized weak 2-coloring LCA
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeModel {
    Strong,
    Weak,
}

impl ProbeModel {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "strong" => Some(Self::Strong),
            "weak" => Some(Self::Weak),
            _ => None,
        }
    }
}

/// Randomized weak 2-coloring: walk to the parent while every neighbor of
/// the current vertex shares its temporary color; stop at the first "good"
/// vertex (which keeps its temporary color and roots the walk) or when the
/// walk closes a cycle (the minimum-ID cycle vertex roots it with color 0).
/// The answer is `(root color + steps to root) mod 2`.
pub fn weak2_rand_lca(
    session: &mut ProbeSession<'_>,
    v: Vertex,
    cs: &ColorSeed,
    scheme: Scheme,
    probe_model: ProbeModel,
    ranks: Option<&RankAssignment>,
) -> Result<u8, ColoringError> {
    assert!(
        matches!(scheme, Scheme::Arbitrary | Scheme::RandomLowestNeighbor),
        "randomized 2-coloring supports arbitrary or random-lowest-neighbor parents"
    );
    let mut walk: Vec<Vertex> = vec![v];
    let mut index = HashMap::new();
    index.insert(v, 0usize);
    loop {
        let u = *walk.last().unwrap();
        let cu = cs.c_temp(u);
        // Good-vertex test. In the weak model, scan ports in ascending order
        // and exit at the first differing neighbor.
        let row: Vec<Vertex>;
        let good: bool;
        match probe_model {
            ProbeModel::Strong => {
                row = session.strong_probe_cached(u)?;
                if row.is_empty() {
                    return Err(ColoringError::IsolatedVertex(u));
                }
                good = row.iter().any(|&w| cs.c_temp(w) != cu);
            }
            ProbeModel::Weak => {
                let d = match session.weak_probe(u, 0)? {
                    CellContent::Degree(0) => return Err(ColoringError::IsolatedVertex(u)),
                    CellContent::Degree(d) => d,
                    _ => unreachable!(),
                };
                let mut found = false;
                let mut partial = Vec::with_capacity(d as usize);
                for j in 1..=d {
                    match session.weak_probe(u, j)? {
                        CellContent::Neighbor(w) => {
                            partial.push(w);
                            if cs.c_temp(w) != cu {
                                found = true;
                                break;
                            }
                        }
                        _ => unreachable!("port within degree"),
                    }
                }
                row = partial;
                good = found;
            }
        }
        if good {
            let steps = walk.len() - 1;
            return Ok(((cu as usize + steps) & 1) as u8);
        }
        // Bad vertex: every port of u was revealed above, so choosing the
        // parent costs no further probes.
        let parent = match scheme {
            Scheme::Arbitrary => row[0],
            Scheme::RandomLowestNeighbor => {
                let r = ranks.expect("random-lowest-neighbor needs ranks");
                *row.iter().min_by_key(|&&w| r.key(w)).unwrap()
            }
            _ => unreachable!(),
        };
        if let Some(&at) = index.get(&parent) {
            let root_idx = (at..walk.len()).min_by_key(|&i| walk[i]).unwrap();
            return Ok((root_idx & 1) as u8);
        }
        index.insert(parent, walk.len());
        walk.push(parent);
    }
}

/// Global execution of the randomized 2-coloring: roots determined from the
/// full graph, colors propagated backward from the roots. The oracle for
/// per-query/global equality tests.
pub fn global_weak2_rand(
    g: &Graph,
    cs: &ColorSeed,
    scheme: Scheme,
    ranks: Option<&RankAssignment>,
) -> Result<Vec<u8>, ColoringError> {
    let n = g.n() as usize;
    let mut good = vec![false; n + 1];
    for v in g.vertices() {
        if g.row(v).is_empty() {
            return Err(ColoringError::IsolatedVertex(v));
        }
        let cu = cs.c_temp(v);
        good[v as usize] = g.row(v).iter().any(|&w| cs.c_temp(w) != cu);
    }
    let parent = |v: Vertex| -> Vertex {
        let row = g.row(v);
        match scheme {
            Scheme::Arbitrary => row[0],
            Scheme::RandomLowestNeighbor => {
                let r = ranks.expect("random-lowest-neighbor needs ranks");
                *row.iter().min_by_key(|&&w| r.key(w)).unwrap()
            }
            _ => unreachable!(),
        }
    };
    let mut color: Vec<Option<u8>> = vec![None; n + 1];
    for v in g.vertices() {
        if good[v as usize] {
            color[v as usize] = Some(cs.c_temp(v));
        }
    }
    for v in g.vertices() {
        if color[v as usize].is_some() {
            continue;
        }
        let mut path = vec![v];
        let mut index = HashMap::new();
        index.insert(v, 0usize);
        let (root_idx, root_color) = loop {
            let u = *path.last().unwrap();
            if good[u as usize] {
                break (path.len() - 1, cs.c_temp(u));
            }
            let p = parent(u);
            if let Some(&at) = index.get(&p) {
                let root_idx = (at..path.len()).min_by_key(|&i| path[i]).unwrap();
                break (root_idx, 0);
            }
            index.insert(p, path.len());
            path.push(p);
        };
        // Vertices at or before the root read their parity off this walk.
        // (Vertices past the root sit on the cycle and resolve identically
        // from their own walks.)
        for (i, &u) in path.iter().enumerate().take(root_idx + 1) {
            if color[u as usize].is_none() {
                let parity = ((root_idx - i) & 1) as u8;
                color[u as usize] = Some((root_color + parity) & 1);
            }
        }
    }
    Ok(color.into_iter().skip(1).map(|c| c.expect("walk colors every vertex")).collect())
}

/// Longest monochromatic parent walk from `v`: parent steps while every
/// visited vertex shares `v`'s temporary color, stopping before a revisit.
/// The measured quantity behind the scheme-separation experiments.
pub fn mono_walk_len(pa: &ParentAssignment, cs: &ColorSeed, v: Vertex) -> usize {
    let base = cs.c_temp(v);
    let mut seen = HashMap::new();
    seen.insert(v, ());
    let mut u = v;
    let mut steps = 0usize;
    loop {
        let p = pa.parent_of(u);
        if cs.c_temp(p) != base || seen.contains_key(&p) {
            return steps;
        }
        seen.insert(p, ());
        steps += 1;
        u = p;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PortOrder;
    use crate::instances::{generate, ring_edges, InstanceSpec};
    use crate::parent::assign_parents;
    use crate::verify::verify_weak_coloring;

    fn port1_parents(g: &Graph) -> ParentAssignment {
        assign_parents(g, Scheme::Arbitrary, None).unwrap()
    }

    #[test]
    fn schedule_golden_values() {
        let s = MgpsSchedule::for_n(1 << 16);
        assert_eq!(s.initial_bits, 17);
        assert_eq!(s.rounds, vec![17, 6, 4, 3]);
        assert_eq!(s.contraction_rounds, 3);
        assert_eq!(s.t_n, 6);

        let small = MgpsSchedule::for_n(7);
        assert_eq!(small.initial_bits, 3);
        assert_eq!(small.contraction_rounds, 0);
        assert_eq!(small.t_n, 3);

        let mut last = 0;
        for n in 2..5000u32 {
            let t = MgpsSchedule::for_n(n).t_n;
            assert!(t >= last, "T_n monotone in n");
            last = t;
        }
    }

    #[test]
    fn descent_tables_are_proper_recolorings() {
        // For all chains x != y != z the recolorings of (x,y) and (y,z) differ.
        for x in 0..8u64 {
            for y in 0..8u64 {
                if x == y {
                    continue;
                }
                assert!(squash8(x, y) < 5);
                for z in 0..8u64 {
                    if y != z {
                        assert_ne!(squash8(x, y), squash8(y, z), "squash8 at ({x},{y},{z})");
                    }
                }
            }
        }
        for x in 0..5u64 {
            for y in 0..5u64 {
                if x == y {
                    continue;
                }
                assert!(squash5(x, y) < 4);
                for z in 0..5u64 {
                    if y != z {
                        assert_ne!(squash5(x, y), squash5(y, z), "squash5 at ({x},{y},{z})");
                    }
                }
            }
        }
        // shift_repick: proper on every legal 4-chain own->parent->grand->great.
        for own in 0..4u64 {
            for parent in (0..4u64).filter(|&p| p != own) {
                for grand in (0..4u64).filter(|&g| g != parent) {
                    for great in (0..4u64).filter(|&g| g != grand) {
                        let cv = shift_repick(own, parent, grand);
                        let cp = shift_repick(parent, grand, great);
                        assert!(cv < 3 && cp < 3, "lands in the 3-palette");
                        assert_ne!(cv, cp, "chain ({own},{parent},{grand},{great})");
                    }
                }
            }
        }
    }

    #[test]
    fn forest_coloring_proper_on_two_cycle() {
        let g = Graph::build(2, &[(1, 2)], PortOrder::Insertion).unwrap();
        let pa = port1_parents(&g);
        let colors = mgps_color_forest(g.n(), &pa).unwrap();
        assert_ne!(colors[0], colors[1]);
        assert!(colors.iter().all(|&c| c < 3));
    }

    #[test]
    fn forest_coloring_proper_on_ring6() {
        let g = Graph::build(6, &ring_edges(6), PortOrder::Insertion).unwrap();
        let pa = port1_parents(&g);
        let colors = mgps_color_forest(g.n(), &pa).unwrap();
        for v in g.vertices() {
            let p = pa.parent_of(v);
            assert_ne!(colors[v as usize - 1], colors[p as usize - 1]);
        }
    }

    #[test]
    fn forest_coloring_rejects_self_loops() {
        let g = Graph::build(3, &[(1, 2), (2, 3)], PortOrder::Insertion).unwrap();
        let pa = assign_parents(&g, Scheme::LowestId, None).unwrap();
        assert!(matches!(mgps_color_forest(g.n(), &pa), Err(ColoringError::SelfLoopPresent(1))));
    }

    #[test]
    fn weak3_k2_outputs_differ() {
        let g = Graph::build(2, &[(1, 2)], PortOrder::Insertion).unwrap();
        let mut s1 = ProbeSession::new(&g);
        let c1 = weak3_lca(&mut s1, 1).unwrap();
        let mut s2 = ProbeSession::new(&g);
        let c2 = weak3_lca(&mut s2, 2).unwrap();
        assert_ne!(c1, c2);
    }

    #[test]
    fn weak3_probe_bound_on_rings() {
        for exp in [8u32, 12] {
            let n = 1u32 << exp;
            let g = generate(&InstanceSpec::ring(n).with_seed(exp as u64)).unwrap().graph;
            let t_n = MgpsSchedule::for_n(n).t_n;
            let mut max_probes = 0;
            for v in (1..=n).step_by(37) {
                let mut s = ProbeSession::new(&g);
                weak3_lca(&mut s, v).unwrap();
                max_probes = max_probes.max(s.stats().weak);
            }
            assert!(max_probes <= (t_n + 1) as u64, "{max_probes} > {}", t_n + 1);
        }
    }

    #[test]
    fn weak3_matches_global_forest_coloring() {
        for seed in 0..20u64 {
            let g = generate(&InstanceSpec::random_regular(40 + (seed as u32 % 3) * 20, 4, seed))
                .unwrap()
                .graph;
            let pa = port1_parents(&g);
            let global = mgps_color_forest(g.n(), &pa).unwrap();
            for v in g.vertices() {
                let mut s = ProbeSession::new(&g);
                let c = weak3_lca(&mut s, v).unwrap();
                assert_eq!(c, global[v as usize - 1], "vertex {v} seed {seed}");
            }
            let verdict = verify_weak_coloring(&g, &global, 3).unwrap();
            assert!(verdict.passed, "legal weak 3-coloring");
        }
    }

    #[test]
    fn weak2_det_star_legal() {
        let g =
            Graph::build(6, &[(1, 2), (1, 3), (1, 4), (1, 5), (1, 6)], PortOrder::Insertion).unwrap();
        let mut colors = Vec::new();
        for v in g.vertices() {
            let mut s = ProbeSession::new(&g);
            colors.push(weak2_det_lca(&mut s, v).unwrap());
        }
        let verdict = verify_weak_coloring(&g, &colors, 2).unwrap();
        assert!(verdict.passed, "star weak 2-coloring: {colors:?}");
    }

    #[test]
    fn weak2_det_probe_bound_regular() {
        let n = 1u32 << 10;
        let g = generate(&InstanceSpec::random_regular(n, 8, 5)).unwrap().graph;
        let t_n = MgpsSchedule::for_n(n).t_n as u64;
        let mut colors = Vec::new();
        let mut max_probes = 0;
        for v in g.vertices() {
            let mut s = ProbeSession::new(&g);
            colors.push(weak2_det_lca(&mut s, v).unwrap());
            max_probes = max_probes.max(s.stats().weak);
        }
        assert!(max_probes <= t_n + 1 + 2 * 8, "{max_probes}");
        let verdict = verify_weak_coloring(&g, &colors, 2).unwrap();
        assert!(verdict.passed);
    }

    #[test]
    fn weak2_rand_k2_primary_roots() {
        let g = Graph::build(2, &[(1, 2)], PortOrder::Insertion).unwrap();
        let cs = (0..64)
            .map(ColorSeed::true_random)
            .find(|cs| cs.c_temp(1) != cs.c_temp(2))
            .unwrap();
        for v in [1u32, 2] {
            let mut s = ProbeSession::new(&g);
            let c =
                weak2_rand_lca(&mut s, v, &cs, Scheme::Arbitrary, ProbeModel::Strong, None).unwrap();
            assert_eq!(c, cs.c_temp(v), "primary root keeps its temp color");
            assert_eq!(s.stats().strong, 1, "one strong probe suffices");
        }
    }

    #[test]
    fn weak2_rand_matches_global() {
        for seed in 0..20u64 {
            let n = 20 + (seed as u32 % 4) * 10;
            let g = generate(&InstanceSpec::random_regular(n, 4, seed)).unwrap().graph;
            let ranks = RankAssignment::new(seed ^ 0xabc);
            for (scheme, model) in [
                (Scheme::Arbitrary, ProbeModel::Strong),
                (Scheme::Arbitrary, ProbeModel::Weak),
                (Scheme::RandomLowestNeighbor, ProbeModel::Strong),
                (Scheme::RandomLowestNeighbor, ProbeModel::Weak),
            ] {
                let cs = ColorSeed::true_random(seed.wrapping_mul(0x9e37));
                let global = global_weak2_rand(&g, &cs, scheme, Some(&ranks)).unwrap();
                let mut colors = Vec::new();
                for v in g.vertices() {
                    let mut s = ProbeSession::new(&g);
                    let c = weak2_rand_lca(&mut s, v, &cs, scheme, model, Some(&ranks)).unwrap();
                    colors.push(c);
                    assert_eq!(c, global[v as usize - 1], "v={v} scheme={scheme:?} model={model:?}");
                }
                let verdict = verify_weak_coloring(&g, &colors, 2).unwrap();
                assert!(verdict.passed, "legal weak 2-coloring");
            }
        }
    }

    #[test]
    fn kwise_poly_eval_triples_exactly_uniform() {
        // Full enumeration over all coefficient tuples of a degree-2
        // polynomial over Z(11): for any 3 distinct points the evaluation
        // triples biject with the coefficient space.
        let p = 11u64;
        let points = [1u32, 4, 7];
        let mut counts = HashMap::new();
        for a0 in 0..p {
            for a1 in 0..p {
                for a2 in 0..p {
                    let cs = ColorSeed::from_coeffs(p, vec![a0, a1, a2]);
                    let triple = (cs.eval(points[0]), cs.eval(points[1]), cs.eval(points[2]));
                    *counts.entry(triple).or_insert(0u32) += 1;
                }
            }
        }
        assert_eq!(counts.len(), (p * p * p) as usize);
        assert!(counts.values().all(|&c| c == 1), "each evaluation triple exactly once");
    }

    proptest::proptest! {
        #[test]
        fn weak3_legal_on_random_graphs(n in 4u32..48, density in 0.08f64..0.8, seed in proptest::prelude::any::<u64>()) {
            let mut rng = crate::mix::SplitMix64::new(seed);
            let mut edges = Vec::new();
            // A spanning cycle keeps every vertex non-isolated.
            for v in 1..=n {
                edges.push((v, v % n + 1));
            }
            let mut seen: std::collections::HashSet<(u32, u32)> =
                edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
            for u in 1..=n {
                for v in u + 1..=n {
                    if rng.next_f64() < density && seen.insert((u, v)) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::build(n, &edges, PortOrder::Shuffled(seed)).unwrap();
            let t_n = MgpsSchedule::for_n(n).t_n as u64;
            let mut c3 = Vec::new();
            let mut c2 = Vec::new();
            for v in g.vertices() {
                let mut s = ProbeSession::new(&g);
                c3.push(weak3_lca(&mut s, v).unwrap());
                proptest::prop_assert!(s.stats().weak <= t_n + 1);
                let mut s = ProbeSession::new(&g);
                c2.push(weak2_det_lca(&mut s, v).unwrap());
            }
            proptest::prop_assert!(verify_weak_coloring(&g, &c3, 3).unwrap().passed);
            proptest::prop_assert!(verify_weak_coloring(&g, &c2, 2).unwrap().passed);
        }
    }

    #[test]
    fn mono_walk_measures_monochromatic_prefix() {
        let g = Graph::build(6, &ring_edges(6), PortOrder::Insertion).unwrap();
        let pa = port1_parents(&g);
        let cs = ColorSeed::true_random(1);
        for v in g.vertices() {
            let len = mono_walk_len(&pa, &cs, v);
            let mut u = v;
            for _ in 0..len {
                u = pa.parent_of(u);
                assert_eq!(cs.c_temp(u), cs.c_temp(v));
            }
        }
    }
}
