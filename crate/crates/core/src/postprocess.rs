//! Turning label sequences into an overlapping cover.
//!
//! Each edge gets the probability that independent uniform draws from its
//! endpoints' sequences agree. Edges at or above a strong threshold `tau1`
//! form communities (connected components with at least two vertices);
//! vertices left alone at `tau1` then attach weakly, at `tau2`, to every
//! community of a neighbor they are similar enough to.

use std::collections::BTreeSet;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::labels::LabelState;

/// Scan granularity for `tau1`.
pub const DEFAULT_SCAN_STEP: f64 = 0.001;

/// Entropies closer than this count as ties in the `tau1` scan.
const ENTROPY_TIE: f64 = 1e-12;

/// Collision probability of independent uniform draws from two sequences.
pub fn edge_similarity<L: Ord + Copy>(a: &[L], b: &[L]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("similarity of an empty label sequence".into()));
    }
    let ca = label_counts(a);
    let cb = label_counts(b);
    Ok(collision(&ca, &cb) as f64 / (a.len() as f64 * b.len() as f64))
}

fn label_counts<L: Ord + Copy>(seq: &[L]) -> Vec<(L, u64)> {
    let mut sorted = seq.to_vec();
    sorted.sort_unstable();
    let mut out: Vec<(L, u64)> = Vec::new();
    for l in sorted {
        match out.last_mut() {
            Some((last, c)) if *last == l => *c += 1,
            _ => out.push((l, 1)),
        }
    }
    out
}

fn collision<L: Ord>(a: &[(L, u64)], b: &[(L, u64)]) -> u64 {
    let (mut i, mut j, mut sum) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                sum += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    sum
}

/// Similarity weight for every edge of a graph, by dense endpoint indices.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEdgeSet {
    edges: Vec<(u32, u32, f64)>,
}

impl WeightedEdgeSet {
    pub fn from_parts(edges: Vec<(u32, u32, f64)>) -> Self {
        Self { edges }
    }

    /// `(a, b, w)` with `a < b` dense indices.
    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.2).reduce(f64::max)
    }

    pub fn get(&self, g: &Graph, u: VertexId, v: VertexId) -> Option<f64> {
        let (a, b) = (g.index_of(u)?, g.index_of(v)?);
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.edges.iter().find(|e| e.0 == a && e.1 == b).map(|e| e.2)
    }
}

pub fn compute_weights(g: &Graph, state: &LabelState) -> WeightedEdgeSet {
    let counts: Vec<Vec<(u32, u64)>> =
        (0..state.vertex_count() as u32).map(|ix| label_counts(&state.vertex(ix).labels)).collect();
    let lens: Vec<f64> = (0..state.vertex_count() as u32).map(|ix| state.vertex(ix).len() as f64).collect();
    let edges = g
        .edge_indices()
        .into_iter()
        .map(|(a, b)| {
            let (a_, b_) = (a as usize, b as usize);
            let w = collision(&counts[a_], &counts[b_]) as f64 / (lens[a_] * lens[b_]);
            (a, b, w)
        })
        .collect();
    WeightedEdgeSet { edges }
}

fn max_incident(g: &Graph, w: &WeightedEdgeSet) -> Vec<f64> {
    let mut best = vec![f64::NEG_INFINITY; g.vertex_count()];
    for &(a, b, x) in &w.edges {
        best[a as usize] = best[a as usize].max(x);
        best[b as usize] = best[b as usize].max(x);
    }
    best
}

/// Largest threshold that leaves every non-isolated vertex with at least
/// one incident edge: the minimum over vertices of their best edge weight.
pub fn select_tau2(g: &Graph, w: &WeightedEdgeSet) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::InvalidParameter("no edges to choose a weak threshold from".into()));
    }
    Ok(max_incident(g, w).into_iter().filter(|x| x.is_finite()).fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Components {
    /// Components with at least two vertices, as sorted id lists.
    pub communities: Vec<Vec<VertexId>>,
    /// Non-isolated graph vertices that end up alone.
    pub isolated: Vec<VertexId>,
}

/// Connected components of the subgraph keeping edges with `w >= tau`.
/// Degree-0 vertices of `g` are ignored.
pub fn components_above(g: &Graph, w: &WeightedEdgeSet, tau: f64) -> Components {
    let n = g.vertex_count();
    let mut uf = UnionFind::<u32>::new(n);
    for &(a, b, x) in &w.edges {
        if x >= tau {
            uf.union(a, b);
        }
    }
    let roots = uf.into_labeling();
    let mut groups: std::collections::BTreeMap<u32, Vec<VertexId>> = Default::default();
    for ix in 0..n as u32 {
        if g.degree(ix) > 0 {
            groups.entry(roots[ix as usize]).or_default().push(g.id(ix));
        }
    }
    let mut out = Components::default();
    for (_, mut members) in groups {
        if members.len() >= 2 {
            members.sort_unstable();
            out.communities.push(members);
        } else {
            out.isolated.extend(members);
        }
    }
    out.communities.sort();
    out.isolated.sort_unstable();
    out
}

/// `-sum (|C|/V) ln(|C|/V)` over the given community sizes.
pub fn size_entropy(sizes: &[usize], vertices: usize) -> f64 {
    if vertices == 0 {
        return 0.0;
    }
    let v = vertices as f64;
    sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / v;
            -p * p.ln()
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tau1Scan {
    pub tau1: f64,
    pub entropy: f64,
    /// Every scanned `(tau, entropy)` pair, ascending in `tau`.
    pub table: Vec<(f64, f64)>,
}

/// Scans `tau` over `tau2, tau2 + step, ..., max w` and returns the smallest
/// value maximizing the size entropy of the communities at that threshold.
///
/// The components are built once, adding edges in descending weight order
/// while walking the grid downwards.
pub fn select_tau1(g: &Graph, w: &WeightedEdgeSet, tau2: f64, step: f64) -> Result<Tau1Scan> {
    if step.is_nan() || step <= 0.0 {
        return Err(Error::InvalidParameter(format!("scan step must be positive, got {step}")));
    }
    let Some(max_w) = w.max_weight() else {
        return Ok(Tau1Scan { tau1: tau2, entropy: 0.0, table: vec![(tau2, 0.0)] });
    };
    let mut grid = Vec::new();
    let mut k = 0u64;
    loop {
        let tau = tau2 + k as f64 * step;
        if tau > max_w {
            break;
        }
        grid.push(tau);
        k += 1;
    }
    if grid.last().is_none_or(|&last| last < max_w) {
        grid.push(max_w);
    }

    let v = g.active_count();
    let mut edges: Vec<(u32, u32, f64)> = w.edges.clone();
    edges.sort_by(|x, y| y.2.total_cmp(&x.2));
    let mut uf = UnionFind::<u32>::new(g.vertex_count());
    let mut size = vec![1usize; g.vertex_count()];
    // running sum over components of size >= 2 of s ln s, and of s
    let (mut s_ln_s, mut covered) = (0.0f64, 0usize);
    let term = |s: usize| if s >= 2 { s as f64 * (s as f64).ln() } else { 0.0 };
    let entropy_of = |s_ln_s: f64, covered: usize| {
        if covered == 0 || v == 0 {
            0.0
        } else {
            let vf = v as f64;
            // -sum (s/V) ln(s/V) = (covered ln V - sum s ln s) / V
            (covered as f64 * vf.ln() - s_ln_s) / vf
        }
    };

    let mut next = 0usize;
    let mut table = vec![(0.0, 0.0); grid.len()];
    for (gi, &tau) in grid.iter().enumerate().rev() {
        while next < edges.len() && edges[next].2 >= tau {
            let (a, b, _) = edges[next];
            next += 1;
            let (ra, rb) = (uf.find_mut(a), uf.find_mut(b));
            if ra == rb {
                continue;
            }
            let (sa, sb) = (size[ra as usize], size[rb as usize]);
            s_ln_s += term(sa + sb) - term(sa) - term(sb);
            covered += (sa + sb) - if sa >= 2 { sa } else { 0 } - if sb >= 2 { sb } else { 0 };
            uf.union(ra, rb);
            let r = uf.find_mut(ra);
            size[r as usize] = sa + sb;
        }
        table[gi] = (tau, entropy_of(s_ln_s, covered));
    }

    let best = table.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let &(tau1, entropy) = table.iter().find(|e| e.1 >= best - ENTROPY_TIE).expect("grid is non-empty");
    Ok(Tau1Scan { tau1, entropy, table })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub cover: Cover,
    /// Vertices isolated at `tau1` that share a `tau2`-strong edge only with
    /// other isolated vertices, and so belong to no community.
    pub unassigned: Vec<VertexId>,
}

/// Communities at `tau1`, then weak attachment of isolated vertices at `tau2`.
pub fn extract_cover(g: &Graph, w: &WeightedEdgeSet, tau1: f64, tau2: f64) -> Result<Extraction> {
    if tau2 > tau1 {
        return Err(Error::InvalidParameter(format!("tau2 = {tau2} exceeds tau1 = {tau1}")));
    }
    let comps = components_above(g, w, tau1);
    let mut community_of = vec![usize::MAX; g.vertex_count()];
    for (c, members) in comps.communities.iter().enumerate() {
        for &id in members {
            community_of[g.index_of(id).expect("component of g") as usize] = c;
        }
    }
    let mut extra: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); comps.communities.len()];
    let mut strong_pair = BTreeSet::new();
    for &(a, b, x) in &w.edges {
        if x < tau2 {
            continue;
        }
        let (ca, cb) = (community_of[a as usize], community_of[b as usize]);
        match (ca == usize::MAX, cb == usize::MAX) {
            (true, false) => {
                extra[cb].insert(g.id(a));
            }
            (false, true) => {
                extra[ca].insert(g.id(b));
            }
            (true, true) => {
                strong_pair.insert(g.id(a));
                strong_pair.insert(g.id(b));
            }
            (false, false) => {}
        }
    }
    let attached: BTreeSet<VertexId> = extra.iter().flatten().copied().collect();
    let unassigned = strong_pair.difference(&attached).copied().collect();
    let cover = Cover::new(comps.communities.into_iter().zip(extra).map(|(mut members, more)| {
        members.extend(more);
        members
    }));
    Ok(Extraction { cover, unassigned })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Thresholds {
    Auto { step: f64 },
    Explicit { tau1: f64, tau2: f64 },
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds::Auto { step: DEFAULT_SCAN_STEP }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostprocessReport {
    pub tau1: f64,
    pub tau2: f64,
    pub entropy: f64,
    pub cover: Cover,
    pub unassigned: Vec<VertexId>,
    /// Non-isolated vertices in no community.
    pub uncovered: usize,
}

/// Weights, thresholds and extraction in one go.
pub fn postprocess(g: &Graph, state: &LabelState, thresholds: Thresholds) -> Result<PostprocessReport> {
    let w = compute_weights(g, state);
    let (tau1, tau2) = match thresholds {
        Thresholds::Explicit { tau1, tau2 } => {
            for (name, t) in [("tau1", tau1), ("tau2", tau2)] {
                if !(0.0..=1.0).contains(&t) {
                    return Err(Error::InvalidParameter(format!("{name} = {t} is outside [0, 1]")));
                }
            }
            (tau1, tau2)
        }
        Thresholds::Auto { step } => {
            if w.is_empty() {
                return Ok(PostprocessReport {
                    tau1: 0.0,
                    tau2: 0.0,
                    entropy: 0.0,
                    cover: Cover::default(),
                    unassigned: Vec::new(),
                    uncovered: 0,
                });
            }
            let tau2 = select_tau2(g, &w)?;
            (select_tau1(g, &w, tau2, step)?.tau1, tau2)
        }
    };
    let ex = extract_cover(g, &w, tau1, tau2)?;
    let sizes: Vec<usize> = components_above(g, &w, tau1).communities.iter().map(Vec::len).collect();
    let covered: BTreeSet<VertexId> = ex.cover.vertices().into_iter().collect();
    let uncovered = (0..g.vertex_count() as u32).filter(|&ix| g.degree(ix) > 0 && !covered.contains(&g.id(ix))).count();
    Ok(PostprocessReport {
        tau1,
        tau2,
        entropy: size_entropy(&sizes, g.active_count()),
        cover: ex.cover,
        unassigned: ex.unassigned,
        uncovered,
    })
}
