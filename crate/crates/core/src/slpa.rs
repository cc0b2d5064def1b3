//! The original speaker-listener label propagation, as a baseline.
//!
//! Each iteration every vertex speaks one uniform draw from its memory to
//! every neighbor, and every listener appends the most frequent label it
//! heard, breaking ties uniformly. Communities come from thresholding the
//! relative frequency of labels in each memory.

use std::collections::BTreeMap;

use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::rng::{Purpose, RngStream};

pub use crate::dist::{voting_distribution, DEFAULT_OUTCOME_CAP};

/// Iterations and threshold used for comparison runs.
pub const DEFAULT_SLPA_ITERATIONS: u32 = 100;
pub const DEFAULT_SLPA_TAU: f64 = 0.2;

/// Label memories, as dense vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoryState {
    pub(crate) iterations: u32,
    pub(crate) ids: Vec<VertexId>,
    pub(crate) memory: Vec<Vec<u32>>,
}

impl MemoryState {
    pub fn initialize(g: &Graph) -> Self {
        Self { iterations: 0, ids: g.ids().to_vec(), memory: (0..g.vertex_count() as u32).map(|ix| vec![ix]).collect() }
    }

    pub fn iterations(&self) -> u32 {
        self.iterations
    }

    pub fn vertex_count(&self) -> usize {
        self.memory.len()
    }

    /// Memory of the vertex at dense index `ix`, as vertex ids.
    pub fn memory_at(&self, ix: u32) -> Vec<VertexId> {
        self.memory[ix as usize].iter().map(|&l| self.ids[l as usize]).collect()
    }

    pub fn memory(&self, id: VertexId) -> Option<Vec<VertexId>> {
        let ix = self.ids.iter().position(|&x| x == id)?;
        Some(self.memory_at(ix as u32))
    }

    /// One speak/listen round. Returns the number of labels spoken.
    pub fn step(&mut self, g: &Graph, rng: &RngStream) -> usize {
        let t = self.iterations + 1;
        let mut heard = vec![Vec::new(); self.memory.len()];
        let mut spoken = 0;
        for (ix, mem) in self.memory.iter().enumerate() {
            let id = self.ids[ix];
            for &nb in g.neighbors(ix as u32) {
                let k = rng.below(mem.len() as u64, id, t, Purpose::SlpaSend, g.id(nb)) as usize;
                heard[nb as usize].push(mem[k]);
                spoken += 1;
            }
        }
        for (ix, mut labels) in heard.into_iter().enumerate() {
            if labels.is_empty() {
                continue;
            }
            let winner = plurality(&mut labels, rng, self.ids[ix], t);
            self.memory[ix].push(winner);
        }
        self.iterations = t;
        spoken
    }
}

fn plurality(labels: &mut [u32], rng: &RngStream, id: VertexId, t: u32) -> u32 {
    labels.sort_unstable();
    let mut best: Vec<u32> = Vec::new();
    let mut best_count = 0;
    for run in labels.chunk_by(|a, b| a == b) {
        match run.len().cmp(&best_count) {
            std::cmp::Ordering::Greater => {
                best_count = run.len();
                best.clear();
                best.push(run[0]);
            }
            std::cmp::Ordering::Equal => best.push(run[0]),
            std::cmp::Ordering::Less => {}
        }
    }
    if best.len() == 1 {
        best[0]
    } else {
        best[rng.below(best.len() as u64, id, t, Purpose::SlpaTieBreak, 0) as usize]
    }
}

pub fn slpa_run(g: &Graph, iterations: u32, seed: u64) -> MemoryState {
    let rng = RngStream::new(seed);
    let mut state = MemoryState::initialize(g);
    for _ in 0..iterations {
        state.step(g, &rng);
    }
    state
}

/// Communities from labels whose relative frequency in a memory is at least
/// `tau`. Singleton and duplicate communities are dropped.
pub fn slpa_threshold(mem: &MemoryState, tau: f64) -> Result<Cover> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParameter(format!("tau = {tau} is outside [0, 1]")));
    }
    let mut communities: BTreeMap<u32, Vec<VertexId>> = BTreeMap::new();
    let mut counts: Vec<(u32, usize)> = Vec::new();
    for (ix, m) in mem.memory.iter().enumerate() {
        let mut sorted = m.clone();
        sorted.sort_unstable();
        counts.clear();
        counts.extend(sorted.chunk_by(|a, b| a == b).map(|r| (r[0], r.len())));
        let len = m.len() as f64;
        for &(label, c) in &counts {
            if c as f64 / len >= tau - 1e-12 {
                communities.entry(label).or_default().push(mem.ids[ix]);
            }
        }
    }
    Ok(Cover::new(communities.into_values().filter(|c| c.len() >= 2)).dedup())
}
