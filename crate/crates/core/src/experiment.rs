//! The evaluation pipeline: sample seeds from the largest component, measure
//! every metric on them, run SI/SIS/SIR batches from each seed and correlate
//! metrics with outcomes.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::correlation::{correlation_ci, CorrelationEstimate, Method};
use crate::epidemic::{
    calibrated_beta, lcc_mask, run_batch, write_outcomes_csv, EpidemicError, ProcessKind,
    SeedOutcome, SpreadParams, DEFAULT_BETA_FACTOR, DEFAULT_GAMMA,
};
use crate::format::sig6;
use crate::graph::{Graph, GraphError, NodeId};
use crate::metrics::{all_metrics, write_metrics_csv, MetricsError, NodeMetricsRecord, DEFAULT_ALPHA};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Epidemic(#[from] EpidemicError),
    #[error("{0}")]
    Argument(String),
    #[error("report has no correlation cells")]
    EmptyReport,
    #[error("{0}")]
    Fetch(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Degree,
    Exf,
    Exfm,
    Kshell,
    Evc,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Degree => "degree",
            Metric::Exf => "exf",
            Metric::Exfm => "exfm",
            Metric::Kshell => "kshell",
            Metric::Evc => "evc",
        }
    }

    pub fn value(self, r: &NodeMetricsRecord) -> f64 {
        match self {
            Metric::Degree => r.degree as f64,
            Metric::Exf => r.exf,
            Metric::Exfm => r.exf_m,
            Metric::Kshell => r.kshell as f64,
            Metric::Evc => r.evc,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "degree" => Ok(Metric::Degree),
            "exf" => Ok(Metric::Exf),
            "exfm" | "exf_m" => Ok(Metric::Exfm),
            "kshell" | "ks" => Ok(Metric::Kshell),
            "evc" => Ok(Metric::Evc),
            other => Err(ExperimentError::Argument(format!("unknown metric {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub sample_size: usize,
    pub runs_per_seed: usize,
    pub si: SpreadParams,
    pub sis: SpreadParams,
    pub sir: SpreadParams,
    pub metrics: Vec<Metric>,
    pub master_seed: u64,
    pub alpha: f64,
    pub level: f64,
    pub method: Method,
    /// Correlate against `ln(1 + outcome)` instead of the raw outcome.
    pub log_outcomes: bool,
}

impl ExperimentConfig {
    /// Default configuration with one `beta` and `gamma` shared by all three
    /// processes.
    pub fn new(beta: f64, gamma: f64) -> Self {
        ExperimentConfig {
            sample_size: 1000,
            runs_per_seed: 100,
            si: SpreadParams::new(ProcessKind::Si, beta, gamma),
            sis: SpreadParams::new(ProcessKind::Sis, beta, gamma),
            sir: SpreadParams::new(ProcessKind::Sir, beta, gamma),
            metrics: vec![Metric::Exf, Metric::Exfm, Metric::Kshell, Metric::Evc],
            master_seed: 0,
            alpha: DEFAULT_ALPHA,
            level: 0.95,
            method: Method::Pearson,
            log_outcomes: false,
        }
    }

    /// Defaults with `beta = 2 * gamma / lambda`, `gamma = 0.5`.
    pub fn calibrated(lambda: f64) -> Self {
        let beta = calibrated_beta(DEFAULT_BETA_FACTOR, DEFAULT_GAMMA, lambda);
        Self::new(beta, DEFAULT_GAMMA)
    }

    pub fn params(&self, kind: ProcessKind) -> &SpreadParams {
        match kind {
            ProcessKind::Si => &self.si,
            ProcessKind::Sis => &self.sis,
            ProcessKind::Sir => &self.sir,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        for kind in ProcessKind::ALL {
            let p = self.params(kind);
            if p.kind != kind {
                return Err(ExperimentError::Argument(format!(
                    "{kind} parameters carry process kind {}",
                    p.kind
                )));
            }
            p.validate()?;
        }
        if self.runs_per_seed < 1 {
            return Err(ExperimentError::Argument("runs_per_seed must be at least 1".into()));
        }
        if self.metrics.is_empty() {
            return Err(ExperimentError::Argument("no metrics selected".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(ExperimentError::Argument(format!(
                "confidence level must lie in (0, 1), got {}",
                self.level
            )));
        }
        Ok(())
    }
}

/// `k` distinct nodes drawn uniformly without replacement from the largest
/// connected component.
pub fn sample_seeds(g: &Graph, k: usize, master_seed: u64) -> Result<Vec<NodeId>, ExperimentError> {
    let (mask, lcc_size) = lcc_mask(g);
    if k > lcc_size {
        return Err(ExperimentError::Argument(format!(
            "sample size {k} exceeds largest component size {lcc_size}"
        )));
    }
    let pool: Vec<NodeId> = (0..g.node_count()).filter(|&u| mask[u]).collect();
    let mut h = Sha256::new();
    h.update(b"exforce/sample/v1");
    h.update(master_seed.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(h.finalize().into());
    Ok(rand::seq::index::sample(&mut rng, pool.len(), k)
        .into_iter()
        .map(|i| pool[i])
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationCell {
    pub process: ProcessKind,
    pub metric: Metric,
    /// `None` when the correlation is undefined (constant column or fewer
    /// than four usable seeds).
    pub estimate: Option<CorrelationEstimate>,
    pub n: usize,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessOutcomes {
    pub process: ProcessKind,
    pub outcomes: Vec<SeedOutcome>,
    /// SI seeds dropped from correlation because every run was censored.
    pub dropped_censored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub nodes: usize,
    pub edges: usize,
    pub lcc_size: usize,
    pub seeds: Vec<NodeId>,
    pub metrics: Vec<NodeMetricsRecord>,
    pub processes: Vec<ProcessOutcomes>,
    pub correlations: Vec<CorrelationCell>,
}

impl ExperimentReport {
    pub fn cell(&self, process: ProcessKind, metric: Metric) -> Option<&CorrelationCell> {
        self.correlations
            .iter()
            .find(|c| c.process == process && c.metric == metric)
    }

    pub fn r(&self, process: ProcessKind, metric: Metric) -> Option<f64> {
        self.cell(process, metric)?.estimate.map(|e| e.r)
    }
}

/// Outcome oriented so that larger means a stronger spreader: SI times are
/// negated, epidemic potentials kept.
pub fn spreading_score(o: &SeedOutcome, log_outcomes: bool) -> Option<f64> {
    let transform = |v: f64| if log_outcomes { v.ln_1p() } else { v };
    match o.process {
        ProcessKind::Si => o.mean_time.map(|t| -transform(t)),
        _ => o.epidemic_potential.map(transform),
    }
}

/// Correlates each metric with the oriented outcome of one process.
pub fn correlate_process(
    cfg: &ExperimentConfig,
    process: ProcessKind,
    metrics: &[NodeMetricsRecord],
    outcomes: &[SeedOutcome],
) -> Vec<CorrelationCell> {
    let paired: Vec<(&NodeMetricsRecord, f64)> = metrics
        .iter()
        .zip(outcomes)
        .filter_map(|(m, o)| {
            debug_assert_eq!(m.node, o.node);
            spreading_score(o, cfg.log_outcomes).map(|s| (m, s))
        })
        .collect();
    let y: Vec<f64> = paired.iter().map(|(_, s)| *s).collect();
    cfg.metrics
        .iter()
        .map(|&metric| {
            let x: Vec<f64> = paired.iter().map(|(m, _)| metric.value(m)).collect();
            let (estimate, note) = match correlation_ci(cfg.method, &x, &y, cfg.level) {
                Ok(e) => (Some(e), None),
                Err(e) => (None, Some(e.to_string())),
            };
            CorrelationCell {
                process,
                metric,
                estimate,
                n: x.len(),
                note,
            }
        })
        .collect()
}

pub fn run_experiment(g: &Graph, cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    g.require_edges()?;
    let (_, lcc_size) = lcc_mask(g);
    let seeds = sample_seeds(g, cfg.sample_size, cfg.master_seed)?;
    log::info!("sampled {} seeds from a component of {lcc_size}", seeds.len());

    let metrics = all_metrics(g, &seeds, cfg.alpha)?;
    log::info!("metrics computed");

    let mut processes = Vec::new();
    let mut correlations = Vec::new();
    for kind in ProcessKind::ALL {
        let batch = run_batch(g, &seeds, cfg.params(kind), cfg.runs_per_seed, cfg.master_seed)?;
        let outcomes = batch.into_iter().collect::<Result<Vec<_>, _>>()?;
        let dropped_censored = outcomes
            .iter()
            .filter(|o| kind == ProcessKind::Si && o.mean_time.is_none())
            .count();
        log::info!("{kind}: {} seeds simulated, {dropped_censored} fully censored", outcomes.len());
        correlations.extend(correlate_process(cfg, kind, &metrics, &outcomes));
        processes.push(ProcessOutcomes {
            process: kind,
            outcomes,
            dropped_censored,
        });
    }

    Ok(ExperimentReport {
        config: cfg.clone(),
        nodes: g.node_count(),
        edges: g.edge_count(),
        lcc_size,
        seeds,
        metrics,
        processes,
        correlations,
    })
}

/// Writes `process,metric,r,lower,upper,half_width,n`; undefined cells keep
/// their `n` and leave the estimate columns empty.
pub fn write_correlations_csv<W: Write>(report: &ExperimentReport, mut out: W) -> io::Result<()> {
    writeln!(out, "process,metric,r,lower,upper,half_width,n")?;
    for c in &report.correlations {
        match c.estimate {
            Some(e) => writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.process,
                c.metric,
                sig6(e.r),
                sig6(e.lower),
                sig6(e.upper),
                sig6(e.half_width),
                e.n
            )?,
            None => writeln!(out, "{},{},,,,,{}", c.process, c.metric, c.n)?,
        }
    }
    Ok(())
}

/// Text table per process in the `r ± half_width` style.
pub fn summary_table(report: &ExperimentReport) -> String {
    let mut s = String::new();
    let metrics = &report.config.metrics;
    s.push_str(&format!("{:<8}", "process"));
    for m in metrics {
        s.push_str(&format!("{:>15}", m.as_str()));
    }
    s.push('\n');
    for p in &report.processes {
        s.push_str(&format!("{:<8}", p.process.as_str()));
        for &m in metrics {
            let cell = report
                .cell(p.process, m)
                .and_then(|c| c.estimate)
                .map(|e| e.display_pm())
                .unwrap_or_else(|| "n/a".into());
            s.push_str(&format!("{cell:>15}"));
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Serialize)]
struct BundleMeta<'a> {
    tool: &'static str,
    version: &'static str,
    input: Option<&'a InputInfo>,
    nodes: usize,
    edges: usize,
    lcc_size: usize,
    config: &'a ExperimentConfig,
    seeds: Vec<&'a str>,
    dropped_censored_si_seeds: usize,
    policies: Policies,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputInfo {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
struct Policies {
    si_outcome: &'static str,
    sis_epidemic: String,
    sir_epidemic: String,
    censoring: &'static str,
    correlation: String,
    exf_log_base: &'static str,
    updating: &'static str,
}

fn policies(cfg: &ExperimentConfig) -> Policies {
    Policies {
        si_outcome: "negated mean time to coverage_target of the largest component, so larger means stronger spreader",
        sis_epidemic: format!(
            "prevalence reaches {} of the largest component before t_max = {}, or infection still active at t_max",
            cfg.sis.epidemic_threshold, cfg.sis.t_max
        ),
        sir_epidemic: format!("final attack fraction >= {}", cfg.sir.epidemic_threshold),
        censoring: "SI runs not covered by t_max are excluded from the mean and counted; seeds with every run censored are dropped from the SI correlation",
        correlation: format!(
            "{:?} with Fisher-z {} interval{}",
            cfg.method,
            cfg.level,
            if cfg.log_outcomes { ", outcomes transformed by ln(1 + x)" } else { "" }
        ),
        exf_log_base: "natural",
        updating: "synchronous discrete time",
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `metrics.csv`, `outcomes_<process>.csv`, `correlations.csv`,
/// `figure.svg` and `meta.json` into `dir`.
pub fn write_bundle(
    g: &Graph,
    report: &ExperimentReport,
    dir: &Path,
    input: Option<&InputInfo>,
) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    let create = |name: &str| fs::File::create(dir.join(name)).map(io::BufWriter::new);

    let mut f = create("metrics.csv")?;
    write_metrics_csv(g, &report.metrics, &mut f)?;
    f.flush()?;
    for p in &report.processes {
        let mut f = create(&format!("outcomes_{}.csv", p.process))?;
        write_outcomes_csv(&p.outcomes, &mut f)?;
        f.flush()?;
    }
    let mut f = create("correlations.csv")?;
    write_correlations_csv(report, &mut f)?;
    f.flush()?;
    fs::write(dir.join("figure.svg"), crate::figure::render_figure(report)?)?;

    let meta = BundleMeta {
        tool: "exforce",
        version: env!("CARGO_PKG_VERSION"),
        input,
        nodes: report.nodes,
        edges: report.edges,
        lcc_size: report.lcc_size,
        config: &report.config,
        seeds: report.seeds.iter().map(|&s| g.label(s)).collect(),
        dropped_censored_si_seeds: report
            .processes
            .iter()
            .map(|p| p.dropped_censored)
            .sum(),
        policies: policies(&report.config),
    };
    let json = serde_json::to_string_pretty(&meta).map_err(io::Error::other)?;
    fs::write(dir.join("meta.json"), json + "\n")?;
    Ok(())
}
