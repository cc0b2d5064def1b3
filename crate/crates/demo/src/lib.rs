//! Browser bindings for the demo page. Every export returns a JSON string so
//! the same functions can be exercised from native tests.

use rslpa_core::dist::{uniform_pick_distribution, voting_distribution, PickDistribution, DEFAULT_OUTCOME_CAP};
use rslpa_core::eval::{active_universe, nmi_overlapping, restrict};
use rslpa_core::graph::{generate_planted_cover_graph, PlantedParams};
use rslpa_core::postprocess::{compute_weights, extract_cover, select_tau1, select_tau2, DEFAULT_SCAN_STEP};
use rslpa_core::{predict_cost, run, PcFormula};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct CurvePoint {
    batch: u64,
    p_c: f64,
    eta: f64,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct Curve {
    formula: PcFormula,
    note: &'static str,
    points: Vec<CurvePoint>,
}

/// Predicted update cost for batch sizes spaced evenly on a log scale from 1
/// to `edges`, half deletions and half insertions.
#[wasm_bindgen]
pub fn predictor_curve(
    vertices: u32,
    edges: u32,
    iterations: u32,
    points: u32,
    literal: bool,
) -> Result<String, String> {
    if edges == 0 || points < 2 {
        return Err("need at least one edge and two points".into());
    }
    let formula = if literal { PcFormula::Literal } else { PcFormula::Corrected };
    let mut sizes: Vec<u64> =
        (0..points).map(|i| (edges as f64).powf(i as f64 / (points - 1) as f64).round() as u64).collect();
    sizes.dedup();
    let mut out = Vec::with_capacity(sizes.len());
    for batch in sizes {
        let m_d = batch / 2;
        let p = predict_cost(vertices as u64, edges as u64, m_d, batch - m_d, iterations, formula)
            .map_err(|e| e.to_string())?;
        out.push(CurvePoint { batch, p_c: p.p_c, eta: p.eta_expected, lower: p.eta_lower, upper: p.eta_upper });
    }
    json(&Curve { formula, note: formula.note(), points: out })
}

#[derive(Serialize)]
struct Detection {
    vertices: usize,
    edges: usize,
    tau2: f64,
    tau1: f64,
    entropy: f64,
    scan: Vec<(f64, f64)>,
    community_sizes: Vec<usize>,
    overlapping_vertices: usize,
    unassigned: usize,
    nmi: f64,
}

/// Generates a planted-cover graph, runs detection and returns the threshold
/// scan alongside the recovered communities.
#[wasm_bindgen]
pub fn detect_planted(
    communities: u32,
    community_size: u32,
    overlap: u32,
    p_in: f64,
    p_out: f64,
    iterations: u32,
    seed: u32,
) -> Result<String, String> {
    let params = PlantedParams {
        communities: communities as usize,
        community_size: community_size as usize,
        overlap: overlap as usize,
        p_in,
        p_out,
        seed: seed as u64,
    };
    let (g, truth) = generate_planted_cover_graph(&params).map_err(|e| e.to_string())?;
    if g.edge_count() == 0 {
        return Err("the generated graph has no edges".into());
    }
    let state = run(&g, iterations, seed as u64);
    let w = compute_weights(&g, &state);
    let tau2 = select_tau2(&g, &w).map_err(|e| e.to_string())?;
    let scan = select_tau1(&g, &w, tau2, DEFAULT_SCAN_STEP).map_err(|e| e.to_string())?;
    let found = extract_cover(&g, &w, scan.tau1, tau2).map_err(|e| e.to_string())?;
    let universe = active_universe(&g);
    let nmi = if found.cover.is_empty() {
        0.0
    } else {
        nmi_overlapping(&found.cover, &restrict(&truth, &universe), &universe).map_err(|e| e.to_string())?.score
    };
    let mut community_sizes: Vec<usize> = found.cover.communities().iter().map(Vec::len).collect();
    community_sizes.sort_unstable_by(|a, b| b.cmp(a));
    json(&Detection {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        tau2,
        tau1: scan.tau1,
        entropy: scan.entropy,
        scan: scan.table,
        community_sizes,
        overlapping_vertices: found.cover.membership().values().filter(|m| m.len() > 1).count(),
        unassigned: found.unassigned.len(),
        nmi,
    })
}

#[derive(Serialize)]
struct Picks {
    voting: Vec<(u64, f64)>,
    uniform: Vec<(u64, f64)>,
    voting_max: f64,
    uniform_max: f64,
}

fn entries(d: &PickDistribution) -> Vec<(u64, f64)> {
    d.iter().collect()
}

/// Plurality-vote and uniform-pick distributions for one label selection.
/// Each line of `text` is one neighbor's label sequence, labels separated by
/// spaces or commas.
#[wasm_bindgen]
pub fn pick_distributions(text: &str) -> Result<String, String> {
    let mut seqs: Vec<Vec<u64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let tokens: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
        if tokens.is_empty() {
            continue;
        }
        let seq = tokens
            .iter()
            .map(|t| t.parse::<u64>().map_err(|_| format!("line {}: {t:?} is not a label", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        seqs.push(seq);
    }
    if seqs.is_empty() {
        return Err("enter at least one label sequence".into());
    }
    let voting = voting_distribution(&seqs, DEFAULT_OUTCOME_CAP).map_err(|e| e.to_string())?;
    let uniform = uniform_pick_distribution(&seqs).map_err(|e| e.to_string())?;
    json(&Picks {
        voting_max: voting.iter().map(|(_, p)| p).fold(0.0, f64::max),
        uniform_max: uniform.iter().map(|(_, p)| p).fold(0.0, f64::max),
        voting: entries(&voting),
        uniform: entries(&uniform),
    })
}

fn json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}
