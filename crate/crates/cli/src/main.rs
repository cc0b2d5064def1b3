use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rslpa_core::bsp::{sim_run_rslpa, sim_run_update, RoundMetrics};
use rslpa_core::eval::{active_universe, compare_eta, nmi_overlapping, restrict};
use rslpa_core::graph::{generate_planted_cover_graph, generate_random_batch, PlantedParams};
use rslpa_core::io::{
    read_batch, read_cover, read_edge_list, read_lfr_truth, write_batch, write_cover, write_edge_list,
};
use rslpa_core::{
    apply_batch, correction_propagate, load_snapshot, postprocess, predict_cost, run, save_snapshot, BatchMode, Error,
    PcFormula, RngStream, Snapshot, Thresholds,
};
use serde_json::{json, Map, Value};

const DEFAULT_ITERATIONS: u32 = 200;
const DEFAULT_STEP: f64 = 0.001;

#[derive(Parser)]
#[command(name = "rslpa", version, about = "Overlapping community detection with incremental label maintenance")]
struct Cli {
    /// Also write the reported metrics as a JSON object.
    #[arg(long, global = true, value_name = "PATH")]
    metrics_out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run label propagation on a graph and write a snapshot.
    Detect(DetectArgs),
    /// Apply edit batches to a snapshot with correction propagation.
    Update(UpdateArgs),
    /// Extract a cover from a snapshot.
    Postprocess(PostprocessArgs),
    /// Score a predicted cover against a ground truth.
    Eval(EvalArgs),
    /// Predict the cost of an update from graph and batch sizes.
    Predict(PredictArgs),
    /// Generate a random edit batch for a graph.
    Genbatch(GenbatchArgs),
    /// Generate a planted overlapping-community graph and its ground truth.
    Genplanted(GenplantedArgs),
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: u32,
    #[arg(long)]
    seed: Option<u64>,
    /// Run on the message-counting simulator with this many workers.
    #[arg(long, value_name = "K")]
    simulate_workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulaArg {
    Corrected,
    Literal,
}

impl From<FormulaArg> for PcFormula {
    fn from(f: FormulaArg) -> Self {
        match f {
            FormulaArg::Corrected => PcFormula::Corrected,
            FormulaArg::Literal => PcFormula::Literal,
        }
    }
}

#[derive(Args)]
struct UpdateArgs {
    #[arg(long)]
    snapshot: PathBuf,
    /// Batch file; repeat to apply several batches in order.
    #[arg(long, required = true)]
    batch: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = FormulaArg::Corrected)]
    pc_formula: FormulaArg,
    /// Skip invalid edits instead of rejecting the batch.
    #[arg(long)]
    lenient: bool,
    #[arg(long, value_name = "K")]
    simulate_workers: Option<usize>,
}

#[derive(Args)]
struct PostprocessArgs {
    #[arg(long)]
    snapshot: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, requires = "tau2")]
    tau1: Option<f64>,
    #[arg(long, requires = "tau1")]
    tau2: Option<f64>,
    /// Scan step for the automatic threshold (env RSLPA_SCAN_STEP).
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Read the truth in the LFR `vertex community...` format.
    #[arg(long)]
    lfr_truth: bool,
    /// Restrict both covers to the non-isolated vertices of this graph.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long = "V")]
    vertices: u64,
    #[arg(long = "E")]
    edges: u64,
    #[arg(long)]
    md: u64,
    #[arg(long)]
    ma: u64,
    #[arg(long = "T")]
    iterations: u32,
    #[arg(long, value_enum, default_value_t = FormulaArg::Corrected)]
    pc_formula: FormulaArg,
}

#[derive(Args)]
struct GenbatchArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    size: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GenplantedArgs {
    #[arg(long, default_value_t = 10)]
    communities: usize,
    #[arg(long, default_value_t = 55)]
    community_size: usize,
    #[arg(long, default_value_t = 5)]
    overlap: usize,
    #[arg(long, default_value_t = 0.3)]
    p_in: f64,
    #[arg(long, default_value_t = 0.01)]
    p_out: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    graph_out: PathBuf,
    #[arg(long)]
    truth_out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::BatchValidation(_)
            | Error::InfeasibleBatch(_)
            | Error::InvalidParameter(_)
            | Error::UnknownVertex(_)
            | Error::Snapshot { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

/// Ordered key/value report, printed as `key=value` lines.
#[derive(Default)]
struct Report(Map<String, Value>);

impl Report {
    fn put(&mut self, key: &str, value: impl Into<Value>) {
        let value = value.into();
        match &value {
            Value::String(s) => println!("{key}={s}"),
            v => println!("{key}={v}"),
        }
        self.0.insert(key.to_string(), value);
    }
}

fn seed_or_fresh(seed: Option<u64>, report: &mut Report) -> u64 {
    let seed = seed.unwrap_or_else(rand_seed);
    report.put("seed", seed);
    seed
}

fn rand_seed() -> u64 {
    use std::collections::hash_map::RandomState;
    use std::hash::BuildHasher;
    RandomState::new().hash_one(std::time::SystemTime::now())
}

fn rounds_json(rounds: &[RoundMetrics]) -> Value {
    Value::Array(
        rounds
            .iter()
            .map(|r| {
                json!({
                    "round": r.round,
                    "logical": r.logical,
                    "inter_worker": r.inter_worker,
                    "label_request": r.payload.label_request,
                    "label_response": r.payload.label_response,
                    "correction": r.payload.correction,
                    "record_removal": r.payload.record_removal,
                })
            })
            .collect(),
    )
}

fn print_rounds(rounds: &[RoundMetrics]) {
    for r in rounds {
        println!("round {} messages={} inter_worker={}", r.round, r.logical, r.inter_worker);
    }
}

fn detect(a: DetectArgs, report: &mut Report) -> Result<(), Failure> {
    let (g, stats) = read_edge_list(&a.graph)?;
    let seed = seed_or_fresh(a.seed, report);
    let start = Instant::now();
    let state = match a.simulate_workers {
        Some(k) => {
            let (state, rounds) = sim_run_rslpa(&g, a.iterations, seed, k)?;
            print_rounds(&rounds);
            report.put("workers", k);
            report.put("total_messages", rounds.iter().map(|r| r.logical).sum::<usize>());
            report.0.insert("rounds".into(), rounds_json(&rounds));
            state
        }
        None => run(&g, a.iterations, seed),
    };
    report.put("vertices", g.vertex_count());
    report.put("edges", g.edge_count());
    report.put("T", a.iterations);
    report.put("duplicates_dropped", stats.duplicates);
    report.put("self_loops_dropped", stats.self_loops);
    report.put("wall_ms", start.elapsed().as_secs_f64() * 1e3);
    save_snapshot(&Snapshot { seed, graph: g, state }, &a.out)?;
    report.put("snapshot", a.out.display().to_string());
    Ok(())
}

fn update(a: UpdateArgs, report: &mut Report) -> Result<(), Failure> {
    let Snapshot { seed: origin, mut graph, mut state } = load_snapshot(&a.snapshot)?;
    let seed = seed_or_fresh(a.seed, report);
    let mode = if a.lenient { BatchMode::Lenient } else { BatchMode::Strict };
    let formula = PcFormula::from(a.pc_formula);
    let mut batches = Vec::new();
    for (i, path) in a.batch.iter().enumerate() {
        let batch = read_batch(path)?;
        let applied = apply_batch(&graph, &batch, mode)?;
        for s in &applied.skipped {
            eprintln!("skipped: {s}");
        }
        let predicted = predict_cost(
            graph.active_count() as u64,
            graph.edge_count() as u64,
            batch.deletions().len() as u64,
            batch.insertions().len() as u64,
            state.iterations(),
            formula,
        )?;
        let stream_seed = seed.wrapping_add(i as u64);
        let start = Instant::now();
        let (metrics, rounds) = match a.simulate_workers {
            Some(k) => {
                let (next, metrics, rounds) = sim_run_update(&state, &applied.graph, &applied.deltas, stream_seed, k)?;
                state = next;
                (metrics, Some(rounds))
            }
            None => {
                (correction_propagate(&mut state, &applied.graph, &applied.deltas, &RngStream::new(stream_seed))?, None)
            }
        };
        let wall = start.elapsed().as_secs_f64() * 1e3;
        let cmp = compare_eta(&metrics, &predicted);
        println!(
            "batch {} path={} edits={} skipped={} eta={} repicks={} waves={} messages={} wall_ms={wall:.3} eta_expected={:.2} eta_lower={:.2} eta_upper={:.2} in_bounds={}",
            i + 1,
            path.display(),
            batch.len(),
            applied.skipped.len(),
            metrics.eta,
            metrics.repicks,
            metrics.waves,
            metrics.messages.iter().sum::<usize>(),
            cmp.expected,
            cmp.lower,
            cmp.upper,
            cmp.in_bounds
        );
        if let Some(rounds) = &rounds {
            print_rounds(rounds);
        }
        let mut entry = json!({
            "path": path.display().to_string(),
            "edits": batch.len(),
            "skipped": applied.skipped.len(),
            "eta": metrics.eta,
            "repicks": metrics.repicks,
            "retired": metrics.retired,
            "record_removals": metrics.record_removals,
            "waves": metrics.waves,
            "messages": metrics.messages,
            "wall_ms": wall,
            "p_c": predicted.p_c,
            "eta_expected": cmp.expected,
            "eta_lower": cmp.lower,
            "eta_upper": cmp.upper,
            "in_bounds": cmp.in_bounds,
            "relative_error": cmp.relative_error,
        });
        if let Some(rounds) = &rounds {
            entry["rounds"] = rounds_json(rounds);
        }
        batches.push(entry);
        graph = applied.graph;
    }
    let total: u64 = batches.iter().map(|b| b["eta"].as_u64().unwrap_or(0)).sum();
    report.put("batches", batches.len());
    report.put("eta", total);
    report.put("pc_formula", format!("{formula:?}").to_lowercase());
    report.0.insert("batch_reports".into(), Value::Array(batches));
    save_snapshot(&Snapshot { seed: origin, graph, state }, &a.out)?;
    report.put("snapshot", a.out.display().to_string());
    Ok(())
}

fn scan_step(flag: Option<f64>) -> Result<f64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("RSLPA_SCAN_STEP") {
        Ok(v) => v.parse().map_err(|_| Failure::Usage(format!("RSLPA_SCAN_STEP is not a number: {v}"))),
        Err(_) => Ok(DEFAULT_STEP),
    }
}

fn postprocess_cmd(a: PostprocessArgs, report: &mut Report) -> Result<(), Failure> {
    let thresholds = match (a.tau1, a.tau2) {
        (Some(tau1), Some(tau2)) => Thresholds::Explicit { tau1, tau2 },
        _ => Thresholds::Auto { step: scan_step(a.step)? },
    };
    if let Thresholds::Explicit { tau1, tau2 } = thresholds {
        if !(0.0..=1.0).contains(&tau1) || !(0.0..=1.0).contains(&tau2) {
            return Err(Failure::Usage("thresholds must lie in [0, 1]".into()));
        }
        if tau2 > tau1 {
            return Err(Failure::Usage(format!("tau2={tau2} exceeds tau1={tau1}")));
        }
    }
    let snap = load_snapshot(&a.snapshot)?;
    let r = postprocess(&snap.graph, &snap.state, thresholds)?;
    report.put("tau2", r.tau2);
    report.put("tau1", r.tau1);
    report.put("entropy", r.entropy);
    report.put("communities", r.cover.len());
    report.put("unassigned", r.unassigned.len());
    report.put("uncovered", r.uncovered);
    write_cover(&r.cover, &a.out)?;
    report.put("cover", a.out.display().to_string());
    Ok(())
}

fn eval(a: EvalArgs, report: &mut Report) -> Result<(), Failure> {
    let pred = read_cover(&a.pred)?;
    let truth = if a.lfr_truth { read_lfr_truth(&a.truth)? } else { read_cover(&a.truth)? };
    let (pred, truth, universe) = match &a.graph {
        Some(path) => {
            let (g, _) = read_edge_list(path)?;
            let u = active_universe(&g);
            (restrict(&pred, &u), restrict(&truth, &u), u)
        }
        None => {
            let u = pred.vertices().into_iter().chain(truth.vertices()).collect();
            (pred, truth, u)
        }
    };
    let r = nmi_overlapping(&pred, &truth, &universe)?;
    report.put("nmi", r.score);
    report.put("h_pred_given_truth", r.h_a_given_b);
    report.put("h_truth_given_pred", r.h_b_given_a);
    report.put("universe", universe.len());
    Ok(())
}

fn predict(a: PredictArgs, report: &mut Report) -> Result<(), Failure> {
    let formula = PcFormula::from(a.pc_formula);
    let p = predict_cost(a.vertices, a.edges, a.md, a.ma, a.iterations, formula)?;
    report.put("pc", p.p_c);
    report.put("eta", p.eta_expected);
    report.put("lower", p.eta_lower);
    report.put("upper", p.eta_upper);
    report.put("formula", format!("{formula:?}").to_lowercase());
    report.put("note", formula.note());
    report.0.insert("q".into(), json!(p.q));
    Ok(())
}

fn genbatch(a: GenbatchArgs, report: &mut Report) -> Result<(), Failure> {
    let (g, _) = read_edge_list(&a.graph)?;
    let seed = seed_or_fresh(a.seed, report);
    let b = generate_random_batch(&g, a.size, seed)?;
    write_batch(&b, &a.out)?;
    report.put("deletions", b.deletions().len());
    report.put("insertions", b.insertions().len());
    report.put("batch", a.out.display().to_string());
    Ok(())
}

fn genplanted(a: GenplantedArgs, report: &mut Report) -> Result<(), Failure> {
    let seed = seed_or_fresh(a.seed, report);
    let params = PlantedParams {
        communities: a.communities,
        community_size: a.community_size,
        overlap: a.overlap,
        p_in: a.p_in,
        p_out: a.p_out,
        seed,
    };
    let (g, truth) = generate_planted_cover_graph(&params)?;
    write_edge_list(&g, &a.graph_out)?;
    write_cover(&truth, &a.truth_out)?;
    report.put("vertices", g.vertex_count());
    report.put("edges", g.edge_count());
    report.put("communities", truth.len());
    Ok(())
}

fn write_metrics(path: &Path, report: Report) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(&Value::Object(report.0)).expect("report serializes");
    std::fs::write(path, text + "\n").map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut report = Report::default();
    let result = match cli.command {
        Command::Detect(a) => detect(a, &mut report),
        Command::Update(a) => update(a, &mut report),
        Command::Postprocess(a) => postprocess_cmd(a, &mut report),
        Command::Eval(a) => eval(a, &mut report),
        Command::Predict(a) => predict(a, &mut report),
        Command::Genbatch(a) => genbatch(a, &mut report),
        Command::Genplanted(a) => genplanted(a, &mut report),
    };
    let result = result.and_then(|()| match &cli.metrics_out {
        Some(path) => write_metrics(path, report),
        None => Ok(()),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
