//! Undirected binary graphs, edit batches and per-vertex change classification.
//!
//! Vertices carry arbitrary non-negative integer ids. Internally each vertex
//! also has a dense index assigned in creation order; indices are never
//! reused or reassigned, so label state keyed by index stays valid across
//! batches. Neighbor lists are kept sorted by id so that "the k-th neighbor"
//! means the same thing regardless of how the graph was built.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cover::Cover;
use crate::error::{Error, Result};

pub type VertexId = u64;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    ids: Vec<VertexId>,
    index: HashMap<VertexId, u32>,
    adj: Vec<Vec<u32>>,
    edge_count: usize,
}

/// What was discarded while building a graph from a raw edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub duplicates: usize,
    pub self_loops: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a simple graph, silently dropping self-loops and repeated edges.
    /// Vertices receive dense indices in ascending id order.
    pub fn from_edges<I>(edges: I) -> (Self, LoadStats)
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut stats = LoadStats::default();
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                stats.self_loops += 1;
            } else if !set.insert(ordered(u, v)) {
                stats.duplicates += 1;
            }
        }
        let mut ids: Vec<VertexId> = set.iter().flat_map(|&(u, v)| [u, v]).collect();
        ids.sort_unstable();
        ids.dedup();
        let mut g = Self::with_vertices(ids);
        for (u, v) in set {
            g.link(u, v);
        }
        g.sort_adjacency();
        (g, stats)
    }

    /// A graph over the given vertices with no edges. Order gives the dense layout.
    pub fn with_vertices(ids: impl IntoIterator<Item = VertexId>) -> Self {
        let mut g = Self::default();
        for id in ids {
            g.ensure_vertex(id);
        }
        g
    }

    /// Rebuilds a graph with an explicit dense layout. Unlike
    /// [`Graph::from_edges`], anything non-simple is an error.
    pub fn from_layout(
        ids: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        let mut g = Self::default();
        for id in ids {
            if g.index.contains_key(&id) {
                return Err(Error::Consistency(format!("vertex {id} listed twice")));
            }
            g.ensure_vertex(id);
        }
        let mut seen = BTreeSet::new();
        for (u, v) in edges {
            if u == v || !seen.insert(ordered(u, v)) {
                return Err(Error::Consistency(format!("edge {u}-{v} is a self-loop or repeated")));
            }
            for x in [u, v] {
                if !g.index.contains_key(&x) {
                    return Err(Error::UnknownVertex(x));
                }
            }
            g.link(u, v);
        }
        g.sort_adjacency();
        Ok(g)
    }

    fn ensure_vertex(&mut self, id: VertexId) -> u32 {
        if let Some(&ix) = self.index.get(&id) {
            return ix;
        }
        let ix = self.ids.len() as u32;
        self.ids.push(id);
        self.index.insert(id, ix);
        self.adj.push(Vec::new());
        ix
    }

    fn link(&mut self, u: VertexId, v: VertexId) {
        let a = self.ensure_vertex(u);
        let b = self.ensure_vertex(v);
        self.adj[a as usize].push(b);
        self.adj[b as usize].push(a);
        self.edge_count += 1;
    }

    fn unlink(&mut self, u: VertexId, v: VertexId) {
        let a = self.index[&u];
        let b = self.index[&v];
        self.adj[a as usize].retain(|&x| x != b);
        self.adj[b as usize].retain(|&x| x != a);
        self.edge_count -= 1;
    }

    fn sort_adjacency(&mut self) {
        let ids = &self.ids;
        for list in &mut self.adj {
            list.sort_unstable_by_key(|&x| ids[x as usize]);
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Vertices with at least one neighbor.
    pub fn active_count(&self) -> usize {
        self.adj.iter().filter(|a| !a.is_empty()).count()
    }

    /// Vertex ids in dense-index order.
    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn id(&self, ix: u32) -> VertexId {
        self.ids[ix as usize]
    }

    pub fn index_of(&self, id: VertexId) -> Option<u32> {
        self.index.get(&id).copied()
    }

    pub fn contains(&self, id: VertexId) -> bool {
        self.index.contains_key(&id)
    }

    /// Dense neighbor indices of `ix`, sorted by neighbor id.
    pub fn neighbors(&self, ix: u32) -> &[u32] {
        &self.adj[ix as usize]
    }

    pub fn neighbor_ids(&self, id: VertexId) -> Vec<VertexId> {
        match self.index_of(id) {
            Some(ix) => self.neighbors(ix).iter().map(|&n| self.id(n)).collect(),
            None => Vec::new(),
        }
    }

    pub fn degree(&self, ix: u32) -> usize {
        self.adj[ix as usize].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        match (self.index_of(u), self.index_of(v)) {
            (Some(a), Some(b)) => {
                let (a, b) = if self.degree(a) <= self.degree(b) { (a, b) } else { (b, a) };
                let target = self.id(b);
                self.neighbors(a).binary_search_by_key(&target, |&x| self.id(x)).is_ok()
            }
            _ => false,
        }
    }

    /// Each edge once as `(smaller id, larger id)`, in ascending order.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (ix, list) in self.adj.iter().enumerate() {
            let u = self.ids[ix];
            out.extend(list.iter().map(|&n| self.ids[n as usize]).filter(|&v| u < v).map(|v| (u, v)));
        }
        out.sort_unstable();
        out
    }

    /// Dense index pairs `(a, b)` with `a < b`, one per edge.
    pub fn edge_indices(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (a, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&b| (a as u32) < b).map(|&b| (a as u32, b)));
        }
        out
    }

    /// Checks symmetry, loop-freedom, duplicate-freedom, ordering and the edge count.
    pub fn check_invariants(&self) -> Result<()> {
        let mut half = 0usize;
        for (a, list) in self.adj.iter().enumerate() {
            for w in list.windows(2) {
                if self.ids[w[0] as usize] >= self.ids[w[1] as usize] {
                    return Err(Error::Consistency(format!("neighbors of {} unsorted or duplicated", self.ids[a])));
                }
            }
            for &b in list {
                if b as usize == a {
                    return Err(Error::Consistency(format!("self-loop at {}", self.ids[a])));
                }
                if !self.adj[b as usize].contains(&(a as u32)) {
                    return Err(Error::Consistency(format!(
                        "edge {}-{} is not symmetric",
                        self.ids[a], self.ids[b as usize]
                    )));
                }
            }
            half += list.len();
        }
        if half != 2 * self.edge_count {
            return Err(Error::Consistency("edge count mismatch".into()));
        }
        Ok(())
    }
}

pub(crate) fn ordered(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// An atomic set of edge insertions and deletions. Pairs are stored as
/// `(smaller, larger)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EditBatch {
    insertions: BTreeSet<(VertexId, VertexId)>,
    deletions: BTreeSet<(VertexId, VertexId)>,
}

impl EditBatch {
    pub fn new(
        insertions: impl IntoIterator<Item = (VertexId, VertexId)>,
        deletions: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        let mut b = Self::default();
        for (u, v) in insertions {
            b.insert(u, v)?;
        }
        for (u, v) in deletions {
            b.delete(u, v)?;
        }
        Ok(b)
    }

    pub fn insert(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        let e = self.check_pair(u, v)?;
        if self.deletions.contains(&e) {
            return Err(Error::BatchValidation(format!("pair {}-{} is both inserted and deleted", e.0, e.1)));
        }
        self.insertions.insert(e);
        Ok(())
    }

    pub fn delete(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        let e = self.check_pair(u, v)?;
        if self.insertions.contains(&e) {
            return Err(Error::BatchValidation(format!("pair {}-{} is both inserted and deleted", e.0, e.1)));
        }
        self.deletions.insert(e);
        Ok(())
    }

    fn check_pair(&self, u: VertexId, v: VertexId) -> Result<(VertexId, VertexId)> {
        if u == v {
            return Err(Error::BatchValidation(format!("self-loop {u}-{v}")));
        }
        Ok(ordered(u, v))
    }

    pub fn insertions(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.insertions
    }

    pub fn deletions(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.deletions
    }

    pub fn is_empty(&self) -> bool {
        self.insertions.is_empty() && self.deletions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.insertions.len() + self.deletions.len()
    }

    /// The batch that undoes this one.
    pub fn inverse(&self) -> Self {
        Self { insertions: self.deletions.clone(), deletions: self.insertions.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Unchanged,
    LostOnly,
    HasNew,
}

/// How one vertex's neighbor set changed. All sets are sorted ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexDelta {
    pub vertex: VertexId,
    pub kept: Vec<VertexId>,
    pub removed: Vec<VertexId>,
    pub added: Vec<VertexId>,
    pub category: Category,
}

impl VertexDelta {
    pub fn new(vertex: VertexId, kept: Vec<VertexId>, removed: Vec<VertexId>, added: Vec<VertexId>) -> Self {
        let category = if !added.is_empty() {
            Category::HasNew
        } else if !removed.is_empty() {
            Category::LostOnly
        } else {
            Category::Unchanged
        };
        Self { vertex, kept, removed, added, category }
    }

    pub fn old_degree(&self) -> usize {
        self.kept.len() + self.removed.len()
    }

    pub fn new_degree(&self) -> usize {
        self.kept.len() + self.added.len()
    }
}

/// Deltas for the vertices whose neighborhoods changed; every other vertex is
/// implicitly [`Category::Unchanged`].
pub type DeltaMap = BTreeMap<VertexId, VertexDelta>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BatchMode {
    #[default]
    Strict,
    /// Invalid edits are skipped and reported instead of failing the batch.
    Lenient,
}

#[derive(Debug, Clone)]
pub struct AppliedBatch {
    pub graph: Graph,
    pub deltas: DeltaMap,
    /// Edits skipped in lenient mode.
    pub skipped: Vec<String>,
}

pub fn apply_batch(g: &Graph, batch: &EditBatch, mode: BatchMode) -> Result<AppliedBatch> {
    let mut problems = Vec::new();
    let mut deletions = Vec::new();
    let mut insertions = Vec::new();
    for &(u, v) in &batch.deletions {
        if g.has_edge(u, v) {
            deletions.push((u, v));
        } else {
            problems.push(format!("delete {u}-{v}: edge does not exist"));
        }
    }
    for &(u, v) in &batch.insertions {
        if g.has_edge(u, v) {
            problems.push(format!("insert {u}-{v}: edge already exists"));
        } else {
            insertions.push((u, v));
        }
    }
    if mode == BatchMode::Strict && !problems.is_empty() {
        return Err(Error::BatchValidation(problems.join("; ")));
    }

    let mut removed: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    let mut added: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &(u, v) in &deletions {
        removed.entry(u).or_default().push(v);
        removed.entry(v).or_default().push(u);
    }
    for &(u, v) in &insertions {
        added.entry(u).or_default().push(v);
        added.entry(v).or_default().push(u);
    }

    let mut graph = g.clone();
    let mut fresh: Vec<VertexId> = added.keys().copied().filter(|id| !g.contains(*id)).collect();
    fresh.sort_unstable();
    for id in fresh {
        graph.ensure_vertex(id);
    }
    for &(u, v) in &deletions {
        graph.unlink(u, v);
    }
    for &(u, v) in &insertions {
        graph.link(u, v);
    }
    graph.sort_adjacency();

    let touched: BTreeSet<VertexId> = removed.keys().chain(added.keys()).copied().collect();
    let mut deltas = DeltaMap::new();
    for id in touched {
        let mut rem = removed.remove(&id).unwrap_or_default();
        let mut add = added.remove(&id).unwrap_or_default();
        rem.sort_unstable();
        add.sort_unstable();
        let kept: Vec<VertexId> = g.neighbor_ids(id).into_iter().filter(|n| rem.binary_search(n).is_err()).collect();
        deltas.insert(id, VertexDelta::new(id, kept, rem, add));
    }
    Ok(AppliedBatch { graph, deltas, skipped: problems })
}

/// Half deletions of uniform existing edges, half insertions of uniform
/// non-edges over the current vertex set. Deterministic in `seed`.
pub fn generate_random_batch(g: &Graph, size: usize, seed: u64) -> Result<EditBatch> {
    let n_del = size / 2;
    let n_ins = size - n_del;
    let n = g.vertex_count() as u128;
    let non_edges = n * n.saturating_sub(1) / 2 - g.edge_count() as u128;
    if n_del > g.edge_count() {
        return Err(Error::InfeasibleBatch(format!(
            "deletion side exhausted: {n_del} deletions requested, graph has {} edges",
            g.edge_count()
        )));
    }
    if n_ins as u128 > non_edges {
        return Err(Error::InfeasibleBatch(format!(
            "insertion side exhausted: {n_ins} insertions requested, only {non_edges} non-edges"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = g.edges();
    let mut batch = EditBatch::default();
    for i in sample(&mut rng, edges.len(), n_del).into_vec() {
        let (u, v) = edges[i];
        batch.delete(u, v)?;
    }

    let ids = g.ids();
    if (n_ins as u128) * 4 >= non_edges {
        // dense case: enumerate the complement
        let mut sorted = ids.to_vec();
        sorted.sort_unstable();
        let mut pool = Vec::new();
        for (i, &u) in sorted.iter().enumerate() {
            for &v in &sorted[i + 1..] {
                if !g.has_edge(u, v) {
                    pool.push((u, v));
                }
            }
        }
        for i in sample(&mut rng, pool.len(), n_ins).into_vec() {
            let (u, v) = pool[i];
            batch.insert(u, v)?;
        }
    } else {
        while batch.insertions.len() < n_ins {
            let u = ids[rng.random_range(0..ids.len())];
            let v = ids[rng.random_range(0..ids.len())];
            if u != v && !g.has_edge(u, v) {
                batch.insertions.insert(ordered(u, v));
            }
        }
    }
    Ok(batch)
}

/// Uniform random graph on vertices `0..n` with exactly `m` edges.
pub fn generate_gnm(n: usize, m: usize, seed: u64) -> Result<Graph> {
    let max = n as u128 * n.saturating_sub(1) as u128 / 2;
    if m as u128 > max {
        return Err(Error::InvalidParameter(format!("{m} edges do not fit on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = BTreeSet::new();
    while set.len() < m {
        let u = rng.random_range(0..n as u64);
        let v = rng.random_range(0..n as u64);
        if u != v {
            set.insert(ordered(u, v));
        }
    }
    let mut g = Graph::with_vertices(0..n as u64);
    for (u, v) in set {
        g.link(u, v);
    }
    g.sort_adjacency();
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedParams {
    pub communities: usize,
    pub community_size: usize,
    /// Vertices shared by each pair of adjacent communities.
    pub overlap: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
}

impl PlantedParams {
    fn validate(&self) -> Result<()> {
        for (name, p) in [("p_in", self.p_in), ("p_out", self.p_out)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("{name}={p} is not a probability")));
            }
        }
        if self.communities == 0 || self.community_size == 0 {
            return Err(Error::InvalidParameter("need at least one non-empty community".into()));
        }
        if self.overlap >= self.community_size {
            return Err(Error::InvalidParameter(format!(
                "overlap {} must be smaller than community size {}",
                self.overlap, self.community_size
            )));
        }
        Ok(())
    }
}

/// Planted overlapping communities. Communities sit on a ring (a chain for
/// two), each sharing `overlap` vertices with the next one. Vertex ids are
/// `0..n`.
pub fn generate_planted_cover_graph(params: &PlantedParams) -> Result<(Graph, Cover)> {
    params.validate()?;
    let k = params.communities;
    let s = params.community_size;
    let step = s - params.overlap;
    let n = match k {
        1 => s,
        2 => s + step,
        _ => k * step,
    };
    let communities: Vec<Vec<VertexId>> =
        (0..k).map(|c| (0..s).map(|j| ((c * step + j) % n) as VertexId).collect()).collect();
    let mut member_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, members) in communities.iter().enumerate() {
        for &v in members {
            member_of[v as usize].push(c);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut g = Graph::with_vertices(0..n as u64);
    for u in 0..n {
        for v in u + 1..n {
            let shared = member_of[u].iter().any(|c| member_of[v].contains(c));
            let p = if shared { params.p_in } else { params.p_out };
            if p > 0.0 && rng.random::<f64>() < p {
                g.link(u as u64, v as u64);
            }
        }
    }
    g.sort_adjacency();
    Ok((g, Cover::new(communities)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(u64, u64)]) -> Graph {
        Graph::from_edges(edges.iter().copied()).0
    }

    #[test]
    fn from_edges_dedups_and_drops_loops() {
        let (g, stats) = Graph::from_edges([(1, 2), (2, 3), (2, 3), (4, 4)]);
        assert_eq!(g.edges(), vec![(1, 2), (2, 3)]);
        assert_eq!(stats, LoadStats { duplicates: 1, self_loops: 1 });
        let (g, stats) = Graph::from_edges([(1, 2), (2, 1)]);
        assert_eq!(g.edges(), vec![(1, 2)]);
        assert_eq!(stats.duplicates, 1);
        g.check_invariants().unwrap();
    }

    #[test]
    fn neighbors_sorted_by_id() {
        let g = graph(&[(5, 1), (5, 9), (5, 3)]);
        assert_eq!(g.neighbor_ids(5), vec![1, 3, 9]);
    }

    #[test]
    fn delete_from_triangle() {
        let g = graph(&[(1, 2), (2, 3), (1, 3)]);
        let b = EditBatch::new([], [(2, 3)]).unwrap();
        let out = apply_batch(&g, &b, BatchMode::Strict).unwrap();
        assert!(!out.deltas.contains_key(&1));
        let d2 = &out.deltas[&2];
        assert_eq!(d2.category, Category::LostOnly);
        assert_eq!(d2.removed, vec![3]);
        assert_eq!(out.deltas[&3].removed, vec![2]);
        assert_eq!(out.graph.edge_count(), 2);
    }

    #[test]
    fn insert_creates_vertex() {
        let g = graph(&[(1, 2)]);
        let b = EditBatch::new([(2, 3)], []).unwrap();
        let out = apply_batch(&g, &b, BatchMode::Strict).unwrap();
        assert!(!out.deltas.contains_key(&1));
        assert_eq!(out.deltas[&2].category, Category::HasNew);
        assert_eq!(out.deltas[&2].added, vec![3]);
        assert_eq!(out.deltas[&3].added, vec![2]);
        assert_eq!(out.deltas[&3].old_degree(), 0);
        assert!(out.graph.contains(3));
        assert_eq!(out.graph.index_of(3), Some(2));
    }

    #[test]
    fn conflicting_batch_is_an_error() {
        let mut b = EditBatch::default();
        b.delete(1, 2).unwrap();
        assert!(matches!(b.insert(2, 1), Err(Error::BatchValidation(_))));
        assert!(EditBatch::new([(3, 3)], []).is_err());
    }

    #[test]
    fn strict_and_lenient_modes() {
        let g = graph(&[(1, 2), (2, 3)]);
        let b = EditBatch::new([(1, 2)], [(1, 3)]).unwrap();
        let err = apply_batch(&g, &b, BatchMode::Strict).unwrap_err();
        assert!(err.to_string().contains("1-2") && err.to_string().contains("1-3"));
        let out = apply_batch(&g, &b, BatchMode::Lenient).unwrap();
        assert_eq!(out.skipped.len(), 2);
        assert_eq!(out.graph, g);
        assert!(out.deltas.is_empty());
    }

    #[test]
    fn isolated_vertex_persists() {
        let g = graph(&[(1, 2), (2, 3)]);
        let b = EditBatch::new([], [(1, 2)]).unwrap();
        let out = apply_batch(&g, &b, BatchMode::Strict).unwrap();
        assert!(out.graph.contains(1));
        assert_eq!(out.graph.degree(out.graph.index_of(1).unwrap()), 0);
        assert_eq!(out.graph.active_count(), 2);
    }

    #[test]
    fn random_batch_edge_cases() {
        let g = graph(&[(1, 2)]);
        assert!(generate_random_batch(&g, 0, 1).unwrap().is_empty());
        let k4 = graph(&[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        let err = generate_random_batch(&k4, 2, 1).unwrap_err();
        assert!(err.to_string().contains("insertion side"));
        let err = generate_random_batch(&g, 4, 1).unwrap_err();
        assert!(err.to_string().contains("deletion side"));
    }

    #[test]
    fn random_batch_is_reproducible() {
        let g = generate_gnm(40, 100, 3).unwrap();
        let a = generate_random_batch(&g, 20, 9).unwrap();
        let b = generate_random_batch(&g, 20, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.deletions().len(), 10);
        assert_eq!(a.insertions().len(), 10);
        assert!(a.deletions().iter().all(|&(u, v)| g.has_edge(u, v)));
        assert!(a.insertions().iter().all(|&(u, v)| u != v && !g.has_edge(u, v)));
        assert_ne!(a, generate_random_batch(&g, 20, 10).unwrap());
    }

    #[test]
    fn dense_complement_path() {
        let g = generate_gnm(8, 25, 1).unwrap();
        let b = generate_random_batch(&g, 6, 2).unwrap();
        assert_eq!(b.insertions().len(), 3);
        apply_batch(&g, &b, BatchMode::Strict).unwrap();
    }

    #[test]
    fn planted_constructions() {
        let p = PlantedParams { communities: 3, community_size: 4, overlap: 0, p_in: 1.0, p_out: 0.0, seed: 1 };
        let (g, cover) = generate_planted_cover_graph(&p).unwrap();
        assert_eq!(g.vertex_count(), 12);
        assert_eq!(g.edge_count(), 3 * 6);
        assert_eq!(cover.len(), 3);

        let p = PlantedParams { p_in: 0.0, ..p };
        let (g, _) = generate_planted_cover_graph(&p).unwrap();
        assert_eq!(g.edge_count(), 0);

        let p = PlantedParams { communities: 2, community_size: 10, overlap: 2, p_in: 1.0, p_out: 0.0, seed: 1 };
        let (g, cover) = generate_planted_cover_graph(&p).unwrap();
        assert_eq!(g.vertex_count(), 18);
        let c = cover.communities();
        assert_eq!(c[0].len(), 10);
        assert_eq!(c[1].len(), 10);
        let shared = c[0].iter().filter(|v| c[1].contains(v)).count();
        assert_eq!(shared, 2);

        let bad = PlantedParams { overlap: 10, ..p };
        assert!(generate_planted_cover_graph(&bad).is_err());
        let bad = PlantedParams { p_in: 1.5, ..p };
        assert!(generate_planted_cover_graph(&bad).is_err());
    }

    #[test]
    fn default_benchmark_has_500_vertices() {
        let p = PlantedParams { communities: 10, community_size: 55, overlap: 5, p_in: 0.3, p_out: 0.01, seed: 1 };
        let (g, cover) = generate_planted_cover_graph(&p).unwrap();
        assert_eq!(g.vertex_count(), 500);
        assert_eq!(cover.len(), 10);
    }
}
