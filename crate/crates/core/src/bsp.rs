//! An in-process bulk-synchronous simulator for the vertex programs.
//!
//! Vertices are spread over `k` workers by a hash of their id. Each
//! superstep buffers its messages and delivers them at the barrier; the
//! simulator counts every logical message and how many of them cross a
//! worker boundary. Results never depend on the worker count.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DeltaMap, Graph, VertexId};
use crate::incremental::{correction_propagate_traced, UpdateMetrics, UpdateTrace};
use crate::labels::{draw_pick, LabelState, Receiver};
use crate::postprocess::{Components, WeightedEdgeSet};
use crate::rng::{mix64, RngStream};
use crate::slpa::MemoryState;

/// Workers and the vertex-to-worker rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cluster {
    workers: usize,
}

impl Cluster {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidParameter("at least one worker is required".into()));
        }
        Ok(Self { workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn owner(&self, id: VertexId) -> usize {
        (mix64(id) % self.workers as u64) as usize
    }

    /// Dense indices owned by each worker, ascending.
    pub fn partition(&self, g: &Graph) -> Vec<Vec<u32>> {
        let mut parts = vec![Vec::new(); self.workers];
        for ix in 0..g.vertex_count() as u32 {
            parts[self.owner(g.id(ix))].push(ix);
        }
        parts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct PayloadCounts {
    pub label_request: usize,
    pub label_response: usize,
    pub correction: usize,
    pub record_removal: usize,
    /// Labels spoken by the voting baseline.
    pub spoken_label: usize,
    /// Parent labels exchanged while finding components.
    pub component_label: usize,
}

impl PayloadCounts {
    pub fn total(&self) -> usize {
        self.label_request
            + self.label_response
            + self.correction
            + self.record_removal
            + self.spoken_label
            + self.component_label
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct RoundMetrics {
    pub round: usize,
    pub logical: usize,
    pub inter_worker: usize,
    pub payload: PayloadCounts,
}

#[derive(Clone, Copy)]
enum Class {
    Request,
    Response,
    Correction,
    Removal,
    Spoken,
    Component,
}

impl RoundMetrics {
    fn new(round: usize) -> Self {
        Self { round, ..Default::default() }
    }

    fn count(&mut self, class: Class, crosses: bool) {
        self.count_many(class, 1, usize::from(crosses));
    }

    fn count_many(&mut self, class: Class, n: usize, crossing: usize) {
        self.logical += n;
        self.inter_worker += crossing;
        let p = &mut self.payload;
        let slot = match class {
            Class::Request => &mut p.label_request,
            Class::Response => &mut p.label_response,
            Class::Correction => &mut p.correction,
            Class::Removal => &mut p.record_removal,
            Class::Spoken => &mut p.spoken_label,
            Class::Component => &mut p.component_label,
        };
        *slot += n;
    }
}

fn owners(cluster: &Cluster, g: &Graph) -> Vec<usize> {
    (0..g.vertex_count() as u32).map(|ix| cluster.owner(g.id(ix))).collect()
}

/// Propagation as a request/response exchange per iteration. The final
/// state equals [`crate::labels::run`] with the same seed.
pub fn sim_run_rslpa(g: &Graph, iterations: u32, seed: u64, workers: usize) -> Result<(LabelState, Vec<RoundMetrics>)> {
    let cluster = Cluster::new(workers)?;
    let owner = owners(&cluster, g);
    let parts = cluster.partition(g);
    let rng = RngStream::new(seed);
    let mut state = LabelState::initialize(g);
    let mut rounds = Vec::with_capacity(iterations as usize);
    for t in 1..=iterations {
        let mut m = RoundMetrics::new(t as usize);
        // superstep 1: each worker's vertices pick and send requests
        let mut requests: Vec<Vec<(u32, u32, u32)>> = vec![Vec::new(); workers];
        for part in &parts {
            for &ix in part {
                let nbrs = g.neighbors(ix);
                if nbrs.is_empty() {
                    continue;
                }
                let (src, pos) = draw_pick(&rng, g.id(ix), t, nbrs);
                let crosses = owner[ix as usize] != owner[src as usize];
                m.count(Class::Request, crosses);
                requests[owner[src as usize]].push((src, pos, ix));
            }
        }
        // superstep 2: sources record the requester and answer
        let mut responses: Vec<Vec<(u32, u32, u32, u32)>> = vec![Vec::new(); workers];
        for inbox in requests {
            for (src, pos, ix) in inbox {
                let v = &mut state.vertices[src as usize];
                v.add_receiver(pos, Receiver { k: t, tar: ix });
                let label = v.labels[pos as usize];
                m.count(Class::Response, owner[src as usize] != owner[ix as usize]);
                responses[owner[ix as usize]].push((ix, label, src, pos));
            }
        }
        // barrier: requesters append
        let mut arrivals: Vec<(u32, u32, u32, u32)> = responses.into_iter().flatten().collect();
        arrivals.sort_unstable();
        for (ix, label, src, pos) in arrivals {
            state.vertices[ix as usize].push(label, src, pos);
        }
        state.iterations = t;
        rounds.push(m);
    }
    Ok((state, rounds))
}

/// The voting baseline with message accounting, one round per iteration.
pub fn sim_run_slpa(g: &Graph, iterations: u32, seed: u64, workers: usize) -> Result<(MemoryState, Vec<RoundMetrics>)> {
    let cluster = Cluster::new(workers)?;
    let owner = owners(&cluster, g);
    let crossing = g.edge_indices().iter().filter(|&&(a, b)| owner[a as usize] != owner[b as usize]).count() * 2;
    let rng = RngStream::new(seed);
    let mut state = MemoryState::initialize(g);
    let mut rounds = Vec::with_capacity(iterations as usize);
    for t in 1..=iterations {
        let mut m = RoundMetrics::new(t as usize);
        let spoken = state.step(g, &rng);
        m.count_many(Class::Spoken, spoken, crossing);
        rounds.push(m);
    }
    Ok((state, rounds))
}

struct Accounting<'a> {
    owner: &'a [usize],
    rounds: Vec<RoundMetrics>,
}

impl Accounting<'_> {
    fn crosses(&self, a: u32, b: u32) -> bool {
        let o = |x: u32| self.owner.get(x as usize).copied();
        o(a) != o(b)
    }

    fn round(&mut self, r: usize) -> &mut RoundMetrics {
        while self.rounds.len() <= r {
            let n = self.rounds.len();
            self.rounds.push(RoundMetrics::new(n));
        }
        &mut self.rounds[r]
    }
}

impl UpdateTrace for Accounting<'_> {
    fn record_removal(&mut self, vertex: u32, source: u32) {
        let c = self.crosses(vertex, source);
        self.round(0).count(Class::Removal, c);
    }

    fn fetch(&mut self, vertex: u32, source: u32) {
        let c = self.crosses(vertex, source);
        self.round(0).count(Class::Request, c);
    }

    fn deliver(&mut self, wave: usize, from: u32, to: u32) {
        let c = self.crosses(from, to);
        let class = if wave == 1 { Class::Response } else { Class::Correction };
        self.round(wave).count(class, c);
    }
}

/// Correction propagation with message accounting. Round 0 is the
/// classification round (record removals and label requests); round `w`
/// is wave `w`. State and metrics equal the library path.
pub fn sim_run_update(
    state: &LabelState,
    new_graph: &Graph,
    deltas: &DeltaMap,
    seed: u64,
    workers: usize,
) -> Result<(LabelState, UpdateMetrics, Vec<RoundMetrics>)> {
    let cluster = Cluster::new(workers)?;
    let owner = owners(&cluster, new_graph);
    let mut next = state.clone();
    let mut acc = Accounting { owner: &owner, rounds: vec![RoundMetrics::new(0)] };
    let metrics = correction_propagate_traced(&mut next, new_graph, deltas, &RngStream::new(seed), &mut acc)?;
    let mut rounds = acc.rounds;
    rounds.truncate(metrics.waves + 1);
    while rounds.len() < metrics.waves + 1 {
        let n = rounds.len();
        rounds.push(RoundMetrics::new(n));
    }
    Ok((next, metrics, rounds))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentsRun {
    pub components: Components,
    pub rounds: usize,
    pub metrics: Vec<RoundMetrics>,
}

/// Components of the edges with `w >= tau` by parent-pointer hooking and
/// shortcutting. Each round every kept edge exchanges grandparent labels,
/// parents hook to the smallest label seen and every vertex jumps to its
/// grandparent; rounds stop once no grandparent changes.
pub fn sim_connected_components(g: &Graph, w: &WeightedEdgeSet, tau: f64, workers: usize) -> Result<ComponentsRun> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParameter(format!("tau = {tau} is outside [0, 1]")));
    }
    let cluster = Cluster::new(workers)?;
    let owner = owners(&cluster, g);
    let n = g.vertex_count();
    let kept: Vec<(u32, u32)> = w.edges().iter().filter(|e| e.2 >= tau).map(|e| (e.0, e.1)).collect();
    let crossing_edges = kept.iter().filter(|&&(a, b)| owner[a as usize] != owner[b as usize]).count();

    let mut f: Vec<u32> = (0..n as u32).collect();
    let mut gf = f.clone();
    let mut metrics = Vec::new();
    while !kept.is_empty() {
        let mut m = RoundMetrics::new(metrics.len() + 1);
        m.count_many(Class::Component, 2 * kept.len(), 2 * crossing_edges);
        let mut next = f.clone();
        for &(a, b) in &kept {
            for (u, v) in [(a, b), (b, a)] {
                let label = gf[v as usize];
                let pu = f[u as usize] as usize;
                next[pu] = next[pu].min(label);
                next[u as usize] = next[u as usize].min(label);
            }
        }
        // grandparent lookups: one request and one answer per vertex
        let mut pointer_crossing = 0;
        for u in 0..n {
            next[u] = next[u].min(gf[u]);
            if owner[u] != owner[f[u] as usize] {
                pointer_crossing += 2;
            }
        }
        m.count_many(Class::Component, 2 * n, pointer_crossing);
        f = next;
        let new_gf: Vec<u32> = f.iter().map(|&p| f[p as usize]).collect();
        metrics.push(m);
        if new_gf == gf {
            break;
        }
        gf = new_gf;
    }

    let mut groups: std::collections::BTreeMap<u32, Vec<VertexId>> = Default::default();
    for ix in 0..n as u32 {
        if g.degree(ix) > 0 {
            groups.entry(f[ix as usize]).or_default().push(g.id(ix));
        }
    }
    let mut components = Components::default();
    for (_, mut members) in groups {
        if members.len() >= 2 {
            members.sort_unstable();
            components.communities.push(members);
        } else {
            components.isolated.extend(members);
        }
    }
    components.communities.sort();
    components.isolated.sort_unstable();
    Ok(ComponentsRun { components, rounds: metrics.len(), metrics })
}
