//! Cover comparison and update-cost checks.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::incremental::{CostPrediction, UpdateMetrics};
use crate::labels::run;
use crate::postprocess::{postprocess, Thresholds};

/// Overlapping NMI and its two normalized conditional entropies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NmiReport {
    pub score: f64,
    /// Normalized `H(A|B)`, averaged over the communities of `a`.
    pub h_a_given_b: f64,
    /// Normalized `H(B|A)`, averaged over the communities of `b`.
    pub h_b_given_a: f64,
}

fn h(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.ln()
    }
}

fn binary_entropy(size: usize, n: f64) -> f64 {
    let p = size as f64 / n;
    h(p) + h(1.0 - p)
}

fn intersection(a: &[VertexId], b: &[VertexId]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Mean over communities of `x` of `H(X_k | Y) / H(X_k)`, where `H(X_k | Y)`
/// is the smallest conditional entropy over acceptable matches in `y`, or
/// `H(X_k)` when none is acceptable. A community spanning the whole universe
/// carries no information and contributes 0.
fn normalized_conditional(x: &Cover, y: &Cover, n: f64) -> f64 {
    let mut total = 0.0;
    for xk in x.communities() {
        let hx = binary_entropy(xk.len(), n);
        if hx <= 0.0 {
            continue;
        }
        let mut best = hx;
        for yl in y.communities() {
            let both = intersection(xk, yl) as f64;
            let p11 = both / n;
            let p10 = (xk.len() as f64 - both) / n;
            let p01 = (yl.len() as f64 - both) / n;
            let p00 = 1.0 - p11 - p10 - p01;
            let (h11, h10, h01, h00) = (h(p11), h(p10), h(p01), h(p00.max(0.0)));
            if h11 + h00 <= h01 + h10 {
                continue;
            }
            let cond = h11 + h10 + h01 + h00 - binary_entropy(yl.len(), n);
            best = best.min(cond);
        }
        total += best / hx;
    }
    total / x.len() as f64
}

/// NMI between two covers of `universe`, in `[0, 1]`, with 1 meaning equal.
pub fn nmi_overlapping(a: &Cover, b: &Cover, universe: &BTreeSet<VertexId>) -> Result<NmiReport> {
    if universe.is_empty() {
        return Err(Error::InvalidParameter("empty universe".into()));
    }
    for (name, c) in [("first", a), ("second", b)] {
        if c.is_empty() {
            return Err(Error::InvalidParameter(format!("{name} cover has no communities")));
        }
        if let Some(v) = c.vertices().into_iter().find(|v| !universe.contains(v)) {
            return Err(Error::InvalidParameter(format!("{name} cover contains {v}, outside the universe")));
        }
    }
    let n = universe.len() as f64;
    let h_a_given_b = normalized_conditional(a, b, n);
    let h_b_given_a = normalized_conditional(b, a, n);
    Ok(NmiReport { score: (1.0 - 0.5 * (h_a_given_b + h_b_given_a)).clamp(0.0, 1.0), h_a_given_b, h_b_given_a })
}

/// Vertices with at least one neighbor.
pub fn active_universe(g: &Graph) -> BTreeSet<VertexId> {
    (0..g.vertex_count() as u32).filter(|&ix| g.degree(ix) > 0).map(|ix| g.id(ix)).collect()
}

/// `cover` with every community cut down to `universe`.
pub fn restrict(cover: &Cover, universe: &BTreeSet<VertexId>) -> Cover {
    Cover::new(
        cover
            .communities()
            .iter()
            .map(|c| c.iter().copied().filter(|v| universe.contains(v)).collect::<Vec<_>>())
            .filter(|c| c.len() >= 2),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaComparison {
    pub measured: usize,
    pub expected: f64,
    pub lower: f64,
    pub upper: f64,
    pub in_bounds: bool,
    /// `(measured - expected) / expected`, or 0 when both are 0.
    pub relative_error: f64,
}

pub fn compare_eta(measured: &UpdateMetrics, predicted: &CostPrediction) -> EtaComparison {
    let m = measured.eta as f64;
    // bounds are real-valued; allow float noise at the edges
    let slack = 1e-9 * predicted.eta_upper.abs().max(1.0);
    let relative_error = if predicted.eta_expected == 0.0 {
        if m == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (m - predicted.eta_expected) / predicted.eta_expected
    };
    EtaComparison {
        measured: measured.eta,
        expected: predicted.eta_expected,
        lower: predicted.eta_lower,
        upper: predicted.eta_upper,
        in_bounds: m >= predicted.eta_lower - slack && m <= predicted.eta_upper + slack,
        relative_error,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub iterations: u32,
    pub mean_nmi: f64,
    pub scores: Vec<f64>,
    /// Runs that produced no communities, scored 0.
    pub degenerate: usize,
}

/// Mean NMI against `truth` of the detected cover, per iteration count.
pub fn convergence_probe(
    g: &Graph,
    truth: &Cover,
    iterations: &[u32],
    seeds: &[u64],
    thresholds: Thresholds,
) -> Result<Vec<ProbeRow>> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("no seeds given".into()));
    }
    let universe = active_universe(g);
    let truth = restrict(truth, &universe);
    let mut rows = Vec::with_capacity(iterations.len());
    for &t in iterations {
        let mut scores = Vec::with_capacity(seeds.len());
        let mut degenerate = 0;
        for &seed in seeds {
            let cover = if t == 0 { Cover::default() } else { postprocess(g, &run(g, t, seed), thresholds)?.cover };
            if cover.is_empty() || truth.is_empty() {
                degenerate += 1;
                scores.push(0.0);
            } else {
                scores.push(nmi_overlapping(&cover, &truth, &universe)?.score);
            }
        }
        rows.push(ProbeRow {
            iterations: t,
            mean_nmi: scores.iter().sum::<f64>() / scores.len() as f64,
            scores,
            degenerate,
        });
    }
    Ok(rows)
}
