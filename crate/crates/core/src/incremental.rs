//! Correction propagation: maintaining a label state across an edit batch.
//!
//! Every pick `(src, pos)` in a state built by propagation is an independent
//! uniform draw. After a batch, a pick through a kept edge is still uniform
//! over the kept neighbors, so it only needs re-drawing when its edge was
//! deleted, or (with probability `added / (kept + added)`) to make room for
//! new neighbors. Re-drawn slots fetch their new value from the source, and
//! any slot whose value changes forwards it along its receiver record, one
//! barrier-separated wave at a time, until nothing changes.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Category, DeltaMap, Graph, VertexDelta, VertexId};
use crate::labels::{LabelState, Receiver, VertexLabels};
use crate::rng::{Purpose, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepickAction {
    Keep,
    Repick {
        src: VertexId,
        pos: u32,
    },
    /// The vertex has no neighbors left; its picked labels are dropped.
    Retire,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepickDecision {
    pub vertex: VertexId,
    pub t: u32,
    pub action: RepickAction,
}

/// Decides whether slot `(delta.vertex, t)` keeps its pick under the new
/// neighborhood. `current_src` is `None` for a slot that did not exist
/// before the batch (the vertex had no neighbors).
pub fn decide_repick(
    delta: &VertexDelta,
    t: u32,
    current_src: Option<VertexId>,
    rng: &RngStream,
) -> Result<RepickDecision> {
    if t == 0 {
        return Err(Error::InvalidParameter("initial labels are never repicked".into()));
    }
    let v = delta.vertex;
    let decision = |action| Ok(RepickDecision { vertex: v, t, action });
    if delta.category == Category::Unchanged {
        return decision(RepickAction::Keep);
    }
    if delta.new_degree() == 0 {
        return decision(RepickAction::Retire);
    }
    let pos = || rng.below(u64::from(t), v, t, Purpose::RepickPosition, 0) as u32;
    let n_u = delta.kept.len() as u64;
    let n_a = delta.added.len() as u64;

    let src_kept = match current_src {
        Some(s) if delta.kept.binary_search(&s).is_ok() => true,
        Some(s) if delta.removed.binary_search(&s).is_ok() => false,
        Some(s) => {
            return Err(Error::Consistency(format!(
                "slot ({v}, {t}) has source {s}, which was not a neighbor before the batch"
            )))
        }
        None => false,
    };

    if src_kept {
        if delta.category == Category::LostOnly {
            return decision(RepickAction::Keep);
        }
        // keep with probability n_u / (n_u + n_a), else switch to a new neighbor
        let coin = rng.below(n_u + n_a, v, t, Purpose::RepickCoin, 0);
        if coin < n_u {
            return decision(RepickAction::Keep);
        }
        let k = rng.below(n_a, v, t, Purpose::RepickSource, 0) as usize;
        return decision(RepickAction::Repick { src: delta.added[k], pos: pos() });
    }

    // source edge is gone (or the slot is new): uniform over all current neighbors
    let k = rng.below(n_u + n_a, v, t, Purpose::RepickSource, 0) as usize;
    let src = nth_of_union(&delta.kept, &delta.added, k);
    decision(RepickAction::Repick { src, pos: pos() })
}

/// k-th smallest element of the union of two disjoint sorted lists.
fn nth_of_union(a: &[VertexId], b: &[VertexId], k: usize) -> VertexId {
    let (mut i, mut j) = (0, 0);
    loop {
        let take_a = j >= b.len() || (i < a.len() && a[i] < b[j]);
        let x = if take_a { a[i] } else { b[j] };
        if i + j == k {
            return x;
        }
        if take_a {
            i += 1;
        } else {
            j += 1;
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct UpdateMetrics {
    /// Label slots whose value differs after the update (created and retired
    /// slots included).
    pub eta: usize,
    /// Slots whose `(src, pos)` was re-drawn.
    pub repicks: usize,
    /// Slots dropped because their vertex lost every neighbor.
    pub retired: usize,
    /// Receiver-record entries removed from former sources.
    pub record_removals: usize,
    /// Rounds in which at least one label message was delivered.
    pub waves: usize,
    /// Label messages delivered per wave; the first wave carries fetch
    /// responses, later waves carry corrections.
    pub messages: Vec<usize>,
}

impl UpdateMetrics {
    pub fn corrections(&self) -> usize {
        self.messages.iter().skip(1).sum()
    }
}

/// A label message: slot `(vertex, t)` should now hold `label`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct LabelMessage {
    pub vertex: u32,
    pub t: u32,
    pub label: u32,
    pub from: u32,
}

/// Hooks into an update, for message accounting. Vertices are dense indices.
pub(crate) trait UpdateTrace {
    /// Slot of `vertex` dropped from the record of `source`.
    fn record_removal(&mut self, _vertex: u32, _source: u32) {}
    /// Repicked slot of `vertex` asks `source` for its label.
    fn fetch(&mut self, _vertex: u32, _source: u32) {}
    /// Label message delivered in `wave` (1-based).
    fn deliver(&mut self, _wave: usize, _from: u32, _to: u32) {}
    /// State after the classification round (0) and after every wave.
    fn after_wave(&mut self, _state: &LabelState, _wave: usize) {}
}

struct Observer<F>(F);

impl<F: FnMut(&LabelState, usize)> UpdateTrace for Observer<F> {
    fn after_wave(&mut self, state: &LabelState, wave: usize) {
        (self.0)(state, wave)
    }
}

/// Per-slot starting values, recorded on first touch. `None` marks a slot
/// created by the update.
#[derive(Default)]
pub(crate) struct Originals(HashMap<(u32, u32), Option<u32>>);

impl Originals {
    pub fn note(&mut self, vertex: u32, t: u32, value: Option<u32>) {
        self.0.entry((vertex, t)).or_insert(value);
    }

    pub fn eta(&self, state: &LabelState) -> usize {
        self.0
            .iter()
            .filter(|(&(v, t), &orig)| {
                let now = state.vertices[v as usize].labels.get(t as usize).copied();
                now != orig
            })
            .count()
    }
}

/// Validates that the state matches the pre-batch graph implied by the deltas.
pub(crate) fn check_update_inputs(state: &LabelState, new_graph: &Graph, deltas: &DeltaMap) -> Result<()> {
    if new_graph.ids().len() < state.ids.len() || new_graph.ids()[..state.ids.len()] != state.ids[..] {
        return Err(Error::Consistency("state vertex layout is not a prefix of the new graph".into()));
    }
    for (&id, d) in deltas {
        if d.vertex != id {
            return Err(Error::Consistency(format!("delta keyed {id} describes vertex {}", d.vertex)));
        }
        let ix = new_graph.index_of(id).ok_or(Error::UnknownVertex(id))?;
        if new_graph.degree(ix) != d.new_degree() {
            return Err(Error::Consistency(format!("delta for {id} does not match the new graph")));
        }
        let old_len = state.vertices.get(ix as usize).map_or(1, VertexLabels::len);
        let expected = if d.old_degree() > 0 { state.iterations as usize + 1 } else { 1 };
        if old_len != expected {
            return Err(Error::Consistency(format!(
                "vertex {id} holds {old_len} labels but had degree {} (T = {})",
                d.old_degree(),
                state.iterations
            )));
        }
    }
    Ok(())
}

/// Brings `state` from the pre-batch graph to `new_graph`.
pub fn correction_propagate(
    state: &mut LabelState,
    new_graph: &Graph,
    deltas: &DeltaMap,
    rng: &RngStream,
) -> Result<UpdateMetrics> {
    correction_propagate_observed(state, new_graph, deltas, rng, |_, _| {})
}

/// As [`correction_propagate`], calling `observe(state, wave)` after the
/// classification round (wave 0) and after every wave.
pub fn correction_propagate_observed<F>(
    state: &mut LabelState,
    new_graph: &Graph,
    deltas: &DeltaMap,
    rng: &RngStream,
    observe: F,
) -> Result<UpdateMetrics>
where
    F: FnMut(&LabelState, usize),
{
    correction_propagate_traced(state, new_graph, deltas, rng, &mut Observer(observe))
}

pub(crate) fn correction_propagate_traced(
    state: &mut LabelState,
    new_graph: &Graph,
    deltas: &DeltaMap,
    rng: &RngStream,
    trace: &mut impl UpdateTrace,
) -> Result<UpdateMetrics> {
    check_update_inputs(state, new_graph, deltas)?;
    let big_t = state.iterations;
    let mut metrics = UpdateMetrics::default();
    let mut originals = Originals::default();
    state.extend_to(new_graph);

    // Slots of vertices gaining their first neighbors exist before any
    // registration targets them.
    for d in deltas.values() {
        if d.old_degree() == 0 && d.new_degree() > 0 {
            let ix = new_graph.index_of(d.vertex).expect("checked");
            let v = &mut state.vertices[ix as usize];
            for t in 1..=big_t {
                v.push(ix, ix, 0);
                originals.note(ix, t, None);
            }
        }
    }

    let mut fetches: Vec<(u32, u32)> = Vec::new();
    let mut retiring = Vec::new();
    for d in deltas.values() {
        if d.category == Category::Unchanged {
            continue;
        }
        let ix = new_graph.index_of(d.vertex).expect("checked");
        let fresh = d.old_degree() == 0;
        for t in 1..=big_t {
            let slot = &state.vertices[ix as usize];
            let (old_src, old_pos) =
                if fresh { (None, 0) } else { (Some(slot.src[t as usize - 1]), slot.pos[t as usize - 1]) };
            let decision = decide_repick(d, t, old_src.map(|s| state.ids[s as usize]), rng)?;
            let me = Receiver { k: t, tar: ix };
            match decision.action {
                RepickAction::Keep => {}
                RepickAction::Retire => {
                    let s = old_src.expect("retiring vertices had neighbors");
                    state.vertices[s as usize].remove_receiver(old_pos, me);
                    metrics.record_removals += 1;
                    trace.record_removal(ix, s);
                    retiring.push(ix);
                }
                RepickAction::Repick { src, pos } => {
                    if let Some(s) = old_src {
                        state.vertices[s as usize].remove_receiver(old_pos, me);
                        metrics.record_removals += 1;
                        trace.record_removal(ix, s);
                    }
                    let s = new_graph.index_of(src).expect("repick draws a current neighbor");
                    let slot = &mut state.vertices[ix as usize];
                    slot.src[t as usize - 1] = s;
                    slot.pos[t as usize - 1] = pos;
                    // registration precedes the read below
                    state.vertices[s as usize].add_receiver(pos, me);
                    fetches.push((ix, t));
                    trace.fetch(ix, s);
                    metrics.repicks += 1;
                }
            }
        }
    }
    retiring.dedup();
    for ix in retiring {
        let v = &mut state.vertices[ix as usize];
        for t in 1..v.labels.len() {
            originals.note(ix, t as u32, Some(v.labels[t]));
            debug_assert!(v.receivers[t].is_empty());
        }
        metrics.retired += v.labels.len() - 1;
        *v = VertexLabels {
            labels: vec![v.labels[0]],
            src: Vec::new(),
            pos: Vec::new(),
            receivers: vec![std::mem::take(&mut v.receivers[0])],
        };
    }

    let mut inbox: Vec<LabelMessage> = fetches
        .iter()
        .map(|&(ix, t)| {
            let v = &state.vertices[ix as usize];
            let (s, p) = (v.src[t as usize - 1], v.pos[t as usize - 1]);
            LabelMessage { vertex: ix, t, label: state.vertices[s as usize].labels[p as usize], from: s }
        })
        .collect();
    trace.after_wave(state, 0);

    while !inbox.is_empty() {
        inbox.sort_unstable();
        metrics.waves += 1;
        metrics.messages.push(inbox.len());
        let mut outbox = Vec::new();
        for m in inbox.drain(..) {
            trace.deliver(metrics.waves, m.from, m.vertex);
            let v = &mut state.vertices[m.vertex as usize];
            let cur = v.labels[m.t as usize];
            if cur == m.label {
                continue;
            }
            originals.note(m.vertex, m.t, Some(cur));
            v.labels[m.t as usize] = m.label;
            outbox.extend(v.receivers[m.t as usize].iter().map(|r| LabelMessage {
                vertex: r.tar,
                t: r.k,
                label: m.label,
                from: m.vertex,
            }));
        }
        trace.after_wave(state, metrics.waves);
        inbox = outbox;
    }

    metrics.eta = originals.eta(state);
    Ok(metrics)
}

/// Which form of the edge-change probability to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PcFormula {
    /// Switch factor `m_a / (E - m_d + m_a)`: vanishes when nothing changes.
    #[default]
    Corrected,
    /// Factor `(E - m_d) / (E - m_d + m_a)`, the keep probability. Gives
    /// `p_c = 1` for an empty batch.
    Literal,
}

impl PcFormula {
    pub fn note(self) -> &'static str {
        match self {
            PcFormula::Corrected => {
                "corrected p_c uses the switch probability m_a/(E-m_d+m_a); the literal form uses (E-m_d)/(E-m_d+m_a), which is the keep probability and yields p_c=1 for an empty batch"
            }
            PcFormula::Literal => {
                "literal p_c uses the factor (E-m_d)/(E-m_d+m_a), which is the keep probability; it yields p_c=1 for an empty batch, so bounds and estimate are not meaningful for small batches"
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostPrediction {
    pub p_c: f64,
    /// `Q(1..=T)`: probability a label picked at iteration t needs no update.
    pub q: Vec<f64>,
    pub eta_expected: f64,
    pub eta_lower: f64,
    pub eta_upper: f64,
    pub formula: PcFormula,
}

/// Probability that a picked edge is invalidated by a batch.
pub fn edge_change_probability(edges: u64, m_d: u64, m_a: u64, formula: PcFormula) -> Result<f64> {
    if m_d > edges {
        return Err(Error::InvalidParameter(format!("m_d = {m_d} exceeds E = {edges}")));
    }
    if edges == 0 {
        if m_d + m_a > 0 {
            return Err(Error::InvalidParameter("edits on a graph with no edges".into()));
        }
        return Ok(match formula {
            PcFormula::Corrected => 0.0,
            PcFormula::Literal => 1.0,
        });
    }
    let e = edges as f64;
    let md = m_d as f64;
    let ma = m_a as f64;
    let deleted = md / e;
    let survivors = e - md + ma;
    let factor = if survivors == 0.0 {
        0.0
    } else {
        match formula {
            PcFormula::Corrected => ma / survivors,
            PcFormula::Literal => (e - md) / survivors,
        }
    };
    Ok(deleted + (1.0 - deleted) * factor)
}

/// Expected number of label updates and its best/worst-case bounds for a
/// uniform batch of `m_d` deletions and `m_a` insertions.
pub fn predict_cost(
    vertices: u64,
    edges: u64,
    m_d: u64,
    m_a: u64,
    iterations: u32,
    formula: PcFormula,
) -> Result<CostPrediction> {
    if vertices == 0 {
        return Err(Error::InvalidParameter("V must be at least 1".into()));
    }
    if iterations == 0 {
        return Err(Error::InvalidParameter("T must be at least 1".into()));
    }
    let p_c = edge_change_probability(edges, m_d, m_a, formula)?;
    let v = vertices as f64;
    let tt = f64::from(iterations);

    let mut q = Vec::with_capacity(iterations as usize);
    let mut acc = 1.0;
    for t in 1..=iterations {
        acc *= 1.0 - p_c / f64::from(t);
        q.push(acc);
    }
    let eta_expected = tt * v - v * q.iter().sum::<f64>();
    let eta_lower = tt * v * p_c;
    // sum_{t=1..T} (1 - p_c)^t, i.e. (1 - p_c - (1 - p_c)^(T+1)) / p_c with the
    // p_c -> 0 limit handled by summing directly
    let mut geo = 0.0;
    let mut term = 1.0;
    for _ in 0..iterations {
        term *= 1.0 - p_c;
        geo += term;
    }
    let eta_upper = tt * v - v * geo;
    Ok(CostPrediction { p_c, q, eta_expected, eta_lower, eta_upper, formula })
}
