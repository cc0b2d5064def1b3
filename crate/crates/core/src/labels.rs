//! Randomized label propagation with full provenance.
//!
//! At iteration `t` every active vertex picks a uniform neighbor `src` and a
//! uniform position `pos < t`, and appends `src`'s label at `pos`. The pick is
//! remembered on both ends: `(src, pos)` on the picking slot, and the picking
//! slot in `src`'s receiver record for `pos`. The receiver records are what
//! let an incremental update forward corrections without rescanning.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::rng::{Purpose, RngStream};

pub use crate::dist::{uniform_pick_distribution, PickDistribution};

/// A slot that copied a label: vertex `tar` (dense index) at its iteration `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Receiver {
    pub k: u32,
    pub tar: u32,
}

/// Label sequence, provenance and receiver records of one vertex.
///
/// `labels[t]` holds the dense index of the vertex whose id is the label.
/// `src[t - 1]`/`pos[t - 1]` describe where `labels[t]` was copied from, and
/// `receivers[t]` is kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexLabels {
    pub(crate) labels: Vec<u32>,
    pub(crate) src: Vec<u32>,
    pub(crate) pos: Vec<u32>,
    pub(crate) receivers: Vec<Vec<Receiver>>,
}

impl VertexLabels {
    pub(crate) fn fresh(ix: u32) -> Self {
        Self { labels: vec![ix], src: Vec::new(), pos: Vec::new(), receivers: vec![Vec::new()] }
    }

    pub(crate) fn push(&mut self, label: u32, src: u32, pos: u32) {
        self.labels.push(label);
        self.src.push(src);
        self.pos.push(pos);
        self.receivers.push(Vec::new());
    }

    pub(crate) fn add_receiver(&mut self, t: u32, r: Receiver) {
        let list = &mut self.receivers[t as usize];
        match list.binary_search(&r) {
            Ok(_) => {}
            Err(at) => list.insert(at, r),
        }
    }

    pub(crate) fn remove_receiver(&mut self, t: u32, r: Receiver) -> bool {
        match self.receivers.get_mut(t as usize) {
            Some(list) => match list.binary_search(&r) {
                Ok(at) => {
                    list.remove(at);
                    true
                }
                Err(_) => false,
            },
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelState {
    pub(crate) iterations: u32,
    pub(crate) ids: Vec<VertexId>,
    pub(crate) index: HashMap<VertexId, u32>,
    pub(crate) vertices: Vec<VertexLabels>,
}

impl LabelState {
    /// Every vertex starts with its own id as its only label.
    pub fn initialize(g: &Graph) -> Self {
        Self {
            iterations: 0,
            ids: g.ids().to_vec(),
            index: g.ids().iter().enumerate().map(|(i, &id)| (id, i as u32)).collect(),
            vertices: (0..g.vertex_count() as u32).map(VertexLabels::fresh).collect(),
        }
    }

    pub fn iterations(&self) -> u32 {
        self.iterations
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn index_of(&self, id: VertexId) -> Option<u32> {
        self.index.get(&id).copied()
    }

    /// Appends any vertices the graph has gained, each with only its own label.
    pub(crate) fn extend_to(&mut self, g: &Graph) {
        for ix in self.ids.len()..g.vertex_count() {
            let id = g.id(ix as u32);
            self.ids.push(id);
            self.index.insert(id, ix as u32);
            self.vertices.push(VertexLabels::fresh(ix as u32));
        }
    }

    pub fn vertex(&self, ix: u32) -> &VertexLabels {
        &self.vertices[ix as usize]
    }

    /// Whether the vertex carries labels beyond its initial one.
    pub fn is_active(&self, ix: u32) -> bool {
        self.vertices[ix as usize].labels.len() > 1
    }

    /// Label sequence of a vertex as vertex ids, given its dense index.
    pub fn labels_at(&self, ix: u32) -> Vec<VertexId> {
        self.vertices[ix as usize].labels.iter().map(|&l| self.ids[l as usize]).collect()
    }

    /// Label sequence of a vertex as vertex ids.
    pub fn labels(&self, id: VertexId) -> Option<Vec<VertexId>> {
        self.index_of(id).map(|ix| self.labels_at(ix))
    }

    /// Raw label (dense index of the originating vertex) of a slot.
    pub fn label_index(&self, ix: u32, t: u32) -> u32 {
        self.vertices[ix as usize].labels[t as usize]
    }

    /// `(src id, pos)` for iterations `1..=T` of a vertex.
    pub fn provenance(&self, id: VertexId) -> Option<Vec<(VertexId, u32)>> {
        let v = &self.vertices[self.index_of(id)? as usize];
        Some(v.src.iter().zip(&v.pos).map(|(&s, &p)| (self.ids[s as usize], p)).collect())
    }

    /// `(receiver id, k)` pairs recorded for `l_id^t`.
    pub fn receivers(&self, id: VertexId, t: u32) -> Option<Vec<(VertexId, u32)>> {
        let v = &self.vertices[self.index_of(id)? as usize];
        Some(v.receivers.get(t as usize)?.iter().map(|r| (self.ids[r.tar as usize], r.k)).collect())
    }

    pub fn total_receivers(&self) -> usize {
        self.vertices.iter().map(|v| v.receivers.iter().map(Vec::len).sum::<usize>()).sum()
    }

    /// Builds a state from explicit picks. `picks[id]` lists `(src id, pos)`
    /// for iterations `1..=T`; vertices missing from the map stay inactive.
    /// Labels are resolved in iteration order and records are filled in.
    pub fn from_provenance(
        g: &Graph,
        iterations: u32,
        picks: &BTreeMap<VertexId, Vec<(VertexId, u32)>>,
    ) -> Result<Self> {
        let mut state = Self::initialize(g);
        state.iterations = iterations;
        let mut resolved = Vec::new();
        for (&id, list) in picks {
            let ix = g.index_of(id).ok_or(Error::UnknownVertex(id))?;
            if list.len() != iterations as usize {
                return Err(Error::Consistency(format!("vertex {id} has {} picks, expected {iterations}", list.len())));
            }
            let mut srcs = Vec::with_capacity(list.len());
            for &(s, p) in list {
                srcs.push((g.index_of(s).ok_or(Error::UnknownVertex(s))?, p));
            }
            resolved.push((ix, srcs));
        }
        for t in 1..=iterations {
            for (ix, srcs) in &resolved {
                let (s, p) = srcs[t as usize - 1];
                let label = *state.vertices[s as usize]
                    .labels
                    .get(p as usize)
                    .ok_or_else(|| Error::Consistency(format!("pick ({s}, {p}) at t={t} reads a missing slot")))?;
                state.vertices[*ix as usize].push(label, s, p);
                state.vertices[s as usize].add_receiver(p, Receiver { k: t, tar: *ix });
            }
        }
        state.check_invariants(g)?;
        Ok(state)
    }

    /// One propagation iteration. `t` must equal `iterations() + 1`.
    pub fn propagate_iteration(&mut self, g: &Graph, t: u32, rng: &RngStream) -> Result<()> {
        if t != self.iterations + 1 {
            return Err(Error::Sequencing { expected: self.iterations + 1, got: t });
        }
        if g.vertex_count() != self.vertices.len() {
            return Err(Error::Consistency(format!(
                "graph has {} vertices, state has {}",
                g.vertex_count(),
                self.vertices.len()
            )));
        }
        for ix in 0..self.vertices.len() as u32 {
            let nbrs = g.neighbors(ix);
            if nbrs.is_empty() {
                continue;
            }
            let (src, pos) = draw_pick(rng, g.id(ix), t, nbrs);
            let label = self.vertices[src as usize].labels[pos as usize];
            self.vertices[ix as usize].push(label, src, pos);
            self.vertices[src as usize].add_receiver(pos, Receiver { k: t, tar: ix });
        }
        self.iterations = t;
        Ok(())
    }

    /// Full audit: layout, provenance, label values and record duality.
    pub fn check_invariants(&self, g: &Graph) -> Result<()> {
        self.check_records(g)?;
        for (ix, v) in self.vertices.iter().enumerate() {
            for t in 1..v.labels.len() {
                let s = v.src[t - 1] as usize;
                let p = v.pos[t - 1] as usize;
                if v.labels[t] != self.vertices[s].labels[p] {
                    return Err(Error::Consistency(format!(
                        "label of {} at t={t} differs from its source {} at {p}",
                        self.ids[ix], self.ids[s]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Structural audit without label values: layout, provenance ranges and
    /// provenance/record duality. Holds between correction waves too.
    pub fn check_records(&self, g: &Graph) -> Result<()> {
        if self.ids.as_slice() != g.ids() {
            return Err(Error::Consistency("vertex layout differs from graph".into()));
        }
        let full = self.iterations as usize + 1;
        let mut picks = 0usize;
        for (ix, v) in self.vertices.iter().enumerate() {
            let id = self.ids[ix];
            let expected = if g.degree(ix as u32) > 0 { full } else { 1 };
            if v.labels.len() != expected
                || v.src.len() + 1 != v.labels.len()
                || v.pos.len() + 1 != v.labels.len()
                || v.receivers.len() != v.labels.len()
            {
                return Err(Error::Consistency(format!(
                    "vertex {id} holds {} labels, expected {expected}",
                    v.labels.len()
                )));
            }
            if v.labels[0] != ix as u32 {
                return Err(Error::Consistency(format!("vertex {id} does not start with its own label")));
            }
            for t in 1..v.labels.len() {
                let s = v.src[t - 1];
                let p = v.pos[t - 1];
                if g.neighbors(ix as u32).binary_search_by_key(&g.id(s), |&n| g.id(n)).is_err() {
                    return Err(Error::Consistency(format!(
                        "source {} of {id} at t={t} is not a neighbor",
                        self.ids[s as usize]
                    )));
                }
                if p as usize >= t {
                    return Err(Error::Consistency(format!("position {p} of {id} at t={t} is out of range")));
                }
                let r = Receiver { k: t as u32, tar: ix as u32 };
                let recs = self.vertices[s as usize].receivers.get(p as usize);
                if recs.is_none_or(|list| list.binary_search(&r).is_err()) {
                    return Err(Error::Consistency(format!(
                        "slot ({id}, {t}) missing from the record of ({}, {p})",
                        self.ids[s as usize]
                    )));
                }
                picks += 1;
            }
            for (t, list) in v.receivers.iter().enumerate() {
                for w in list.windows(2) {
                    if w[0] >= w[1] {
                        return Err(Error::Consistency(format!("record of ({id}, {t}) unsorted")));
                    }
                }
                for r in list {
                    let tv = self.vertices.get(r.tar as usize);
                    let ok = tv.is_some_and(|tv| {
                        r.k >= 1
                            && (r.k as usize) < tv.labels.len()
                            && tv.src[r.k as usize - 1] == ix as u32
                            && tv.pos[r.k as usize - 1] as usize == t
                    });
                    if !ok {
                        return Err(Error::Consistency(format!(
                            "record of ({id}, {t}) lists a slot that did not copy it"
                        )));
                    }
                }
            }
        }
        if picks != self.total_receivers() {
            return Err(Error::Consistency("receiver records and picks disagree in number".into()));
        }
        Ok(())
    }
}

/// The `(src, pos)` draw for a vertex at iteration `t`. Shared with the
/// simulator so both paths make identical picks.
pub(crate) fn draw_pick(rng: &RngStream, id: VertexId, t: u32, nbrs: &[u32]) -> (u32, u32) {
    let k = rng.below(nbrs.len() as u64, id, t, Purpose::PropagateSource, 0) as usize;
    let pos = rng.below(u64::from(t), id, t, Purpose::PropagatePosition, 0) as u32;
    (nbrs[k], pos)
}

/// `T` iterations from the initial state.
pub fn run(g: &Graph, iterations: u32, seed: u64) -> LabelState {
    let rng = RngStream::new(seed);
    let mut state = LabelState::initialize(g);
    for t in 1..=iterations {
        state.propagate_iteration(g, t, &rng).expect("iterations are issued in order on a matching graph");
    }
    state
}
