//! WebAssembly bindings for the browser demo.
//!
//! Every export takes plain numbers and returns a JSON string. The
//! `*_json` functions hold the logic and are callable natively, which is
//! how the tests exercise them.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use exforce::correlation::{fisher_interval, CorrelationEstimate};
use exforce::epidemic::{
    calibrated_beta, lcc_mask, run_rng, simulate_trajectory, ProcessKind, RunOutcome, SpreadParams,
};
use exforce::generate::generate_pa_graph;
use exforce::metrics::{all_metrics, eigenvector_centrality, DEFAULT_MAX_ITER, DEFAULT_TOL};
use exforce::stats::network_stats;
use exforce::Graph;

/// Larger graphs make the page's layout and per-node table sluggish.
pub const MAX_NODES: usize = 3000;
pub const MAX_RUNS: usize = 50;

#[derive(Serialize)]
struct NodeRow {
    id: usize,
    degree: usize,
    exf: f64,
    exfm: f64,
    kshell: usize,
    evc: f64,
}

#[derive(Serialize)]
struct Network {
    nodes: usize,
    edges_count: usize,
    density: f64,
    mean_degree: f64,
    diameter: usize,
    lambda: f64,
    metrics: Vec<NodeRow>,
    edges: Vec<[usize; 2]>,
}

fn pa_graph(n: usize, m: usize, leaf_fraction: f64, seed: u64) -> Result<Graph, String> {
    if n > MAX_NODES {
        return Err(format!("at most {MAX_NODES} nodes in the browser demo"));
    }
    generate_pa_graph(n, m, leaf_fraction, seed).map_err(|e| e.to_string())
}

/// Generates a preferential-attachment graph and scores every node.
pub fn analyze_pa_json(n: usize, m: usize, leaf_fraction: f64, seed: u64, alpha: f64) -> Result<String, String> {
    let g = pa_graph(n, m, leaf_fraction, seed)?;
    let stats = network_stats(&g, false).map_err(|e| e.to_string())?;
    let all: Vec<usize> = (0..g.node_count()).collect();
    let records = all_metrics(&g, &all, alpha).map_err(|e| e.to_string())?;
    let network = Network {
        nodes: stats.nodes,
        edges_count: stats.edges,
        density: stats.density,
        mean_degree: stats.mean_degree,
        diameter: stats.diameter,
        lambda: stats.leading_eigenvalue,
        metrics: records
            .iter()
            .map(|r| NodeRow {
                id: r.node,
                degree: r.degree,
                exf: r.exf,
                exfm: r.exf_m,
                kshell: r.kshell,
                evc: r.evc,
            })
            .collect(),
        edges: g.edges().map(|(u, v)| [u, v]).collect(),
    };
    serde_json::to_string(&network).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Curves {
    beta: f64,
    gamma: f64,
    component_size: usize,
    /// One series of infected fractions per run, step 0 first.
    infected: Vec<Vec<f64>>,
    /// SIR only: recovered fractions per run.
    recovered: Vec<Vec<f64>>,
    epidemic_runs: usize,
    mean_half_coverage_time: Option<f64>,
}

/// Prevalence curves of `runs` processes seeded at `seed_node` on the same
/// graph [`analyze_pa_json`] builds for these parameters. `beta` is
/// `beta_factor * gamma / lambda`.
#[allow(clippy::too_many_arguments)]
pub fn spread_curves_json(
    n: usize,
    m: usize,
    leaf_fraction: f64,
    graph_seed: u64,
    process: &str,
    seed_node: usize,
    beta_factor: f64,
    gamma: f64,
    t_max: u32,
    runs: usize,
    master_seed: u64,
) -> Result<String, String> {
    let g = pa_graph(n, m, leaf_fraction, graph_seed)?;
    let kind: ProcessKind = process.parse().map_err(|e: exforce::epidemic::EpidemicError| e.to_string())?;
    if seed_node >= g.node_count() {
        return Err(format!("seed node {seed_node} out of range"));
    }
    if !(1..=MAX_RUNS).contains(&runs) {
        return Err(format!("runs must lie in 1..={MAX_RUNS}"));
    }
    let (_, lambda) = eigenvector_centrality(&g, DEFAULT_TOL, DEFAULT_MAX_ITER).map_err(|e| e.to_string())?;
    let mut p = SpreadParams::new(kind, calibrated_beta(beta_factor, gamma, lambda), gamma);
    p.t_max = t_max;
    // show whole SIS curves instead of stopping once classified
    p.stop_when_decided = false;
    p.validate().map_err(|e| e.to_string())?;

    let (mask, size) = lcc_mask(&g);
    if !mask[seed_node] {
        return Err(format!("seed node {seed_node} is outside the largest component"));
    }
    let label = g.label(seed_node).to_owned();
    let mut curves = Curves {
        beta: p.beta,
        gamma,
        component_size: size,
        infected: Vec::with_capacity(runs),
        recovered: Vec::new(),
        epidemic_runs: 0,
        mean_half_coverage_time: None,
    };
    let mut times = Vec::new();
    for run in 0..runs {
        let t = simulate_trajectory(&g, seed_node, &p, &mut run_rng(master_seed, &label, run as u64));
        let frac = |c: usize| c as f64 / size as f64;
        curves.infected.push(t.counts.iter().map(|c| frac(c.infected)).collect());
        if kind == ProcessKind::Sir {
            curves.recovered.push(t.counts.iter().map(|c| frac(c.recovered)).collect());
        }
        match t.outcome {
            RunOutcome::Si { half_coverage_time } => times.extend(half_coverage_time),
            other => curves.epidemic_runs += usize::from(other.is_epidemic() == Some(true)),
        }
    }
    if !times.is_empty() {
        curves.mean_half_coverage_time = Some(times.iter().map(|&t| f64::from(t)).sum::<f64>() / times.len() as f64);
    }
    serde_json::to_string(&curves).map_err(|e| e.to_string())
}

/// Fisher-z interval for a correlation `r` from `n` pairs.
pub fn fisher_ci_json(r: f64, n: usize, level: f64) -> Result<String, String> {
    if !(-1.0..=1.0).contains(&r) {
        return Err(format!("r must lie in [-1, 1], got {r}"));
    }
    if n < 4 {
        return Err(format!("need at least 4 pairs, got {n}"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(format!("level must lie in (0, 1), got {level}"));
    }
    #[derive(Serialize)]
    struct Ci {
        #[serde(flatten)]
        estimate: CorrelationEstimate,
        display: String,
    }
    let estimate = fisher_interval(r, n, level);
    serde_json::to_string(&Ci {
        display: estimate.display_pm(),
        estimate,
    })
    .map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn analyze_pa(n: usize, m: usize, leaf_fraction: f64, seed: u32, alpha: f64) -> Result<String, JsValue> {
    analyze_pa_json(n, m, leaf_fraction, u64::from(seed), alpha).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn spread_curves(
    n: usize,
    m: usize,
    leaf_fraction: f64,
    graph_seed: u32,
    process: &str,
    seed_node: usize,
    beta_factor: f64,
    gamma: f64,
    t_max: u32,
    runs: usize,
    master_seed: u32,
) -> Result<String, JsValue> {
    spread_curves_json(
        n,
        m,
        leaf_fraction,
        u64::from(graph_seed),
        process,
        seed_node,
        beta_factor,
        gamma,
        t_max,
        runs,
        u64::from(master_seed),
    )
    .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn fisher_ci(r: f64, n: usize, level: f64) -> Result<String, JsValue> {
    fisher_ci_json(r, n, level).map_err(|e| JsValue::from_str(&e))
}
