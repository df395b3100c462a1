//! Discrete-time SI, SIS and SIR processes on a graph.
//!
//! Updating is synchronous. In each step every node infected at the start
//! of the step independently infects each susceptible neighbor with
//! probability `beta`; then every node infected at the start of the step
//! recovers with probability `gamma`. Nodes infected during a step neither
//! transmit nor recover until the next one.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::format::sig6;
use crate::graph::{label_cmp, largest_index, Graph, NodeId};
use crate::stats::bfs_distances;

pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_T_MAX: u32 = 1000;
pub const DEFAULT_COVERAGE_TARGET: f64 = 0.5;
pub const DEFAULT_EPIDEMIC_THRESHOLD: f64 = 0.05;
/// Multiple of the SIS threshold `gamma / lambda` used when no `beta` is given.
pub const DEFAULT_BETA_FACTOR: f64 = 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum EpidemicError {
    #[error("invalid spreading parameters: {0}")]
    Params(String),
    #[error("node {label:?} is not in the largest connected component")]
    NotInLcc { label: String },
    #[error("node id {0} out of range")]
    InvalidNode(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    Si,
    Sis,
    Sir,
}

impl ProcessKind {
    pub const ALL: [ProcessKind; 3] = [ProcessKind::Si, ProcessKind::Sis, ProcessKind::Sir];

    pub fn as_str(self) -> &'static str {
        match self {
            ProcessKind::Si => "si",
            ProcessKind::Sis => "sis",
            ProcessKind::Sir => "sir",
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProcessKind {
    type Err = EpidemicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "si" => Ok(ProcessKind::Si),
            "sis" => Ok(ProcessKind::Sis),
            "sir" => Ok(ProcessKind::Sir),
            other => Err(EpidemicError::Params(format!("unknown process {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadParams {
    pub kind: ProcessKind,
    /// Per-contact, per-step transmission probability.
    pub beta: f64,
    /// Per-step recovery probability; ignored by SI.
    pub gamma: f64,
    pub t_max: u32,
    /// SI: fraction of the component that counts as covered.
    pub coverage_target: f64,
    /// SIS: prevalence that classifies a run as epidemic. SIR: attack
    /// fraction that does.
    pub epidemic_threshold: f64,
    /// SIS only: end a run as soon as it is classified epidemic. Peak
    /// prevalence is then the peak seen up to that step.
    pub stop_when_decided: bool,
}

impl SpreadParams {
    pub fn new(kind: ProcessKind, beta: f64, gamma: f64) -> Self {
        SpreadParams {
            kind,
            beta,
            gamma,
            t_max: DEFAULT_T_MAX,
            coverage_target: DEFAULT_COVERAGE_TARGET,
            epidemic_threshold: DEFAULT_EPIDEMIC_THRESHOLD,
            stop_when_decided: true,
        }
    }

    pub fn with_kind(self, kind: ProcessKind) -> Self {
        SpreadParams { kind, ..self }
    }

    pub fn validate(&self) -> Result<(), EpidemicError> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(EpidemicError::Params(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        unit("beta", self.beta)?;
        unit("gamma", self.gamma)?;
        if self.t_max < 1 {
            return Err(EpidemicError::Params("t_max must be at least 1".into()));
        }
        if !(self.coverage_target > 0.0 && self.coverage_target <= 1.0) {
            return Err(EpidemicError::Params(format!(
                "coverage_target must lie in (0, 1], got {}",
                self.coverage_target
            )));
        }
        if !(self.epidemic_threshold > 0.0 && self.epidemic_threshold < 1.0) {
            return Err(EpidemicError::Params(format!(
                "epidemic_threshold must lie in (0, 1), got {}",
                self.epidemic_threshold
            )));
        }
        Ok(())
    }
}

/// `factor * gamma / lambda`, capped at 1. With factor 1 this is the SIS
/// epidemic threshold of a network with leading eigenvalue `lambda`.
pub fn calibrated_beta(factor: f64, gamma: f64, lambda: f64) -> f64 {
    (factor * gamma / lambda).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "process", rename_all = "lowercase")]
pub enum RunOutcome {
    Si {
        /// `None` when the coverage target was not reached by `t_max`.
        half_coverage_time: Option<u32>,
    },
    Sis {
        is_epidemic: bool,
        peak_prevalence: f64,
        steps: u32,
    },
    Sir {
        is_epidemic: bool,
        peak_prevalence: f64,
        attack_fraction: f64,
        steps: u32,
    },
}

impl RunOutcome {
    pub fn is_epidemic(&self) -> Option<bool> {
        match *self {
            RunOutcome::Si { .. } => None,
            RunOutcome::Sis { is_epidemic, .. } | RunOutcome::Sir { is_epidemic, .. } => {
                Some(is_epidemic)
            }
        }
    }
}

/// Compartment counts within the seed's component after a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepCounts {
    pub step: u32,
    pub susceptible: usize,
    pub infected: usize,
    pub recovered: usize,
    pub ever_infected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub counts: Vec<StepCounts>,
    pub outcome: RunOutcome,
}

const SUSCEPTIBLE: u8 = 0;
const INFECTED: u8 = 1;
const RECOVERED: u8 = 2;

/// Per-worker state arrays, reset between runs by undoing only the nodes a
/// run touched.
#[derive(Debug, Default)]
pub struct Scratch {
    state: Vec<u8>,
    touched: Vec<NodeId>,
    infected: Vec<NodeId>,
    next: Vec<NodeId>,
}

impl Scratch {
    pub fn new(node_count: usize) -> Self {
        Scratch {
            state: vec![SUSCEPTIBLE; node_count],
            ..Default::default()
        }
    }

    fn reset(&mut self, node_count: usize) {
        if self.state.len() != node_count {
            self.state = vec![SUSCEPTIBLE; node_count];
        } else {
            for &u in &self.touched {
                self.state[u] = SUSCEPTIBLE;
            }
        }
        self.touched.clear();
        self.infected.clear();
        self.next.clear();
    }
}

/// Observer hook used to record trajectories.
trait StepObserver {
    fn observe(&mut self, step: u32, state: &[u8], ever_infected: usize);
}

struct NoTrace;

impl StepObserver for NoTrace {
    #[inline]
    fn observe(&mut self, _: u32, _: &[u8], _: usize) {}
}

struct ComponentTrace<'a> {
    members: &'a [NodeId],
    counts: Vec<StepCounts>,
}

impl StepObserver for ComponentTrace<'_> {
    fn observe(&mut self, step: u32, state: &[u8], ever_infected: usize) {
        let mut c = StepCounts {
            step,
            susceptible: 0,
            infected: 0,
            recovered: 0,
            ever_infected,
        };
        for &u in self.members {
            match state[u] {
                SUSCEPTIBLE => c.susceptible += 1,
                INFECTED => c.infected += 1,
                _ => c.recovered += 1,
            }
        }
        self.counts.push(c);
    }
}

#[inline]
fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    rng.random::<f64>() < p
}

fn run_process<R: Rng + ?Sized, O: StepObserver>(
    g: &Graph,
    component_size: usize,
    seed: NodeId,
    p: &SpreadParams,
    rng: &mut R,
    scratch: &mut Scratch,
    observer: &mut O,
) -> RunOutcome {
    scratch.reset(g.node_count());
    let size = component_size as f64;
    let coverage_needed = (p.coverage_target * size).ceil().max(1.0) as usize;
    let recovers = p.kind != ProcessKind::Si && p.gamma > 0.0;
    let recovered_state = if p.kind == ProcessKind::Sir {
        RECOVERED
    } else {
        SUSCEPTIBLE
    };

    scratch.state[seed] = INFECTED;
    scratch.touched.push(seed);
    scratch.infected.push(seed);
    let mut ever = 1usize;
    let mut peak = 1.0 / size;
    let mut reached_threshold = peak >= p.epidemic_threshold;
    observer.observe(0, &scratch.state, ever);

    if p.kind == ProcessKind::Si && ever >= coverage_needed {
        return RunOutcome::Si {
            half_coverage_time: Some(0),
        };
    }

    let mut step = 0u32;
    while step < p.t_max && !scratch.infected.is_empty() {
        step += 1;
        let Scratch {
            state,
            touched,
            infected,
            next,
        } = scratch;
        next.clear();

        for &i in infected.iter() {
            for &j in g.neighbors(i) {
                if state[j] == SUSCEPTIBLE && bernoulli(rng, p.beta) {
                    state[j] = INFECTED;
                    next.push(j);
                }
            }
        }
        ever += next.len();
        touched.extend_from_slice(next);

        if recovers {
            infected.retain(|&i| {
                if bernoulli(rng, p.gamma) {
                    state[i] = recovered_state;
                    false
                } else {
                    true
                }
            });
        } else if p.kind == ProcessKind::Si {
            // nodes without susceptible neighbors never draw again
            infected.retain(|&i| g.neighbors(i).iter().any(|&j| state[j] == SUSCEPTIBLE));
        }
        infected.extend_from_slice(next);
        observer.observe(step, state, ever);

        match p.kind {
            ProcessKind::Si => {
                if ever >= coverage_needed {
                    return RunOutcome::Si {
                        half_coverage_time: Some(step),
                    };
                }
            }
            ProcessKind::Sis | ProcessKind::Sir => {
                let prevalence = infected.len() as f64 / size;
                peak = peak.max(prevalence);
                if p.kind == ProcessKind::Sis && prevalence >= p.epidemic_threshold {
                    reached_threshold = true;
                    if p.stop_when_decided {
                        break;
                    }
                }
            }
        }
    }

    let active = !scratch.infected.is_empty();
    match p.kind {
        ProcessKind::Si => RunOutcome::Si {
            half_coverage_time: None,
        },
        ProcessKind::Sis => RunOutcome::Sis {
            is_epidemic: reached_threshold || active,
            peak_prevalence: peak,
            steps: step,
        },
        ProcessKind::Sir => {
            let attack_fraction = ever as f64 / size;
            RunOutcome::Sir {
                is_epidemic: attack_fraction >= p.epidemic_threshold,
                peak_prevalence: peak,
                attack_fraction,
                steps: step,
            }
        }
    }
}

fn component_members(g: &Graph, seed: NodeId) -> Vec<NodeId> {
    bfs_distances(g, seed)
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != usize::MAX)
        .map(|(u, _)| u)
        .collect()
}

fn simulate_kind<R: Rng + ?Sized>(
    g: &Graph,
    seed: NodeId,
    p: &SpreadParams,
    rng: &mut R,
    kind: ProcessKind,
) -> RunOutcome {
    let size = component_members(g, seed).len();
    let p = p.with_kind(kind);
    run_process(g, size, seed, &p, rng, &mut Scratch::new(g.node_count()), &mut NoTrace)
}

/// One SI run; `p.kind` is ignored. Coverage is measured against the size
/// of the seed's connected component.
pub fn simulate_si<R: Rng + ?Sized>(g: &Graph, seed: NodeId, p: &SpreadParams, rng: &mut R) -> RunOutcome {
    simulate_kind(g, seed, p, rng, ProcessKind::Si)
}

/// One SIS run; `p.kind` is ignored.
pub fn simulate_sis<R: Rng + ?Sized>(g: &Graph, seed: NodeId, p: &SpreadParams, rng: &mut R) -> RunOutcome {
    simulate_kind(g, seed, p, rng, ProcessKind::Sis)
}

/// One SIR run; `p.kind` is ignored.
pub fn simulate_sir<R: Rng + ?Sized>(g: &Graph, seed: NodeId, p: &SpreadParams, rng: &mut R) -> RunOutcome {
    simulate_kind(g, seed, p, rng, ProcessKind::Sir)
}

/// Runs `p.kind` from `seed`, recording compartment counts over the seed's
/// component after every step (step 0 is the initial state).
pub fn simulate_trajectory<R: Rng + ?Sized>(
    g: &Graph,
    seed: NodeId,
    p: &SpreadParams,
    rng: &mut R,
) -> Trajectory {
    let members = component_members(g, seed);
    let mut trace = ComponentTrace {
        members: &members,
        counts: Vec::new(),
    };
    let outcome = run_process(
        g,
        members.len(),
        seed,
        p,
        rng,
        &mut Scratch::new(g.node_count()),
        &mut trace,
    );
    Trajectory {
        counts: trace.counts,
        outcome,
    }
}

/// Independent RNG stream for one run, a pure function of the master seed,
/// the seed node's external label and the run index.
pub fn run_rng(master_seed: u64, label: &str, run: u64) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(b"exforce/run/v1");
    h.update(master_seed.to_le_bytes());
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    h.update(run.to_le_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedOutcome {
    pub node: NodeId,
    pub label: String,
    pub process: ProcessKind,
    pub runs: usize,
    /// SI runs that never reached the coverage target.
    pub censored: usize,
    /// SI: mean half-coverage time over uncensored runs; `None` if every run
    /// was censored or the process is not SI.
    pub mean_time: Option<f64>,
    /// SIS/SIR: fraction of runs classified epidemic.
    pub epidemic_potential: Option<f64>,
}

fn aggregate(g: &Graph, seed: NodeId, kind: ProcessKind, runs: &[RunOutcome]) -> SeedOutcome {
    let mut censored = 0;
    let mut time_sum = 0.0;
    let mut epidemics = 0;
    for r in runs {
        match *r {
            RunOutcome::Si {
                half_coverage_time: Some(t),
            } => time_sum += f64::from(t),
            RunOutcome::Si {
                half_coverage_time: None,
            } => censored += 1,
            _ => {
                if r.is_epidemic() == Some(true) {
                    epidemics += 1;
                }
            }
        }
    }
    let n = runs.len();
    let (mean_time, epidemic_potential) = match kind {
        ProcessKind::Si => {
            let done = n - censored;
            ((done > 0).then(|| time_sum / done as f64), None)
        }
        _ => (None, Some(epidemics as f64 / n as f64)),
    };
    SeedOutcome {
        node: seed,
        label: g.label(seed).to_owned(),
        process: kind,
        runs: n,
        censored,
        mean_time,
        epidemic_potential,
    }
}

/// Largest connected component as a membership mask plus its size.
pub fn lcc_mask(g: &Graph) -> (Vec<bool>, usize) {
    let (comp, sizes) = g.components();
    match largest_index(&sizes) {
        Some(best) => (comp.iter().map(|&c| c == best).collect(), sizes[best]),
        None => (Vec::new(), 0),
    }
}

/// Runs `runs_per_seed` processes from every seed and aggregates them.
///
/// Run `r` of seed `s` draws from [`run_rng`]`(master_seed, label(s), r)`,
/// so the output does not depend on scheduling or worker count. Seeds
/// outside the largest connected component produce an error entry; the
/// rest of the batch still runs.
pub fn run_batch(
    g: &Graph,
    seeds: &[NodeId],
    p: &SpreadParams,
    runs_per_seed: usize,
    master_seed: u64,
) -> Result<Vec<Result<SeedOutcome, EpidemicError>>, EpidemicError> {
    p.validate()?;
    if runs_per_seed < 1 {
        return Err(EpidemicError::Params("runs_per_seed must be at least 1".into()));
    }
    for &s in seeds {
        if s >= g.node_count() {
            return Err(EpidemicError::InvalidNode(s));
        }
    }
    let (in_lcc, lcc_size) = lcc_mask(g);
    let valid: Vec<NodeId> = seeds.iter().copied().filter(|&s| in_lcc[s]).collect();

    let jobs: Vec<(NodeId, u64)> = valid
        .iter()
        .flat_map(|&s| (0..runs_per_seed as u64).map(move |r| (s, r)))
        .collect();
    let run_one = |scratch: &mut Scratch, &(s, r): &(NodeId, u64)| {
        let mut rng = run_rng(master_seed, g.label(s), r);
        run_process(g, lcc_size, s, p, &mut rng, scratch, &mut NoTrace)
    };

    #[cfg(feature = "parallel")]
    let outcomes: Vec<RunOutcome> = {
        use rayon::prelude::*;
        jobs.par_iter()
            .map_init(|| Scratch::new(g.node_count()), run_one)
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<RunOutcome> = {
        let mut scratch = Scratch::new(g.node_count());
        jobs.iter().map(|job| run_one(&mut scratch, job)).collect()
    };

    let mut chunks = outcomes.chunks(runs_per_seed);
    Ok(seeds
        .iter()
        .map(|&s| {
            if in_lcc[s] {
                let runs = chunks.next().expect("one chunk per valid seed");
                Ok(aggregate(g, s, p.kind, runs))
            } else {
                Err(EpidemicError::NotInLcc {
                    label: g.label(s).to_owned(),
                })
            }
        })
        .collect())
}

/// Writes `node,process,runs,censored,mean_time,epidemic_potential`, rows
/// ordered by label, empty fields where a column does not apply.
pub fn write_outcomes_csv<W: Write>(outcomes: &[SeedOutcome], mut out: W) -> std::io::Result<()> {
    let mut sorted: Vec<&SeedOutcome> = outcomes.iter().collect();
    sorted.sort_by(|a, b| label_cmp(&a.label, &b.label).then(a.process.cmp(&b.process)));
    writeln!(out, "node,process,runs,censored,mean_time,epidemic_potential")?;
    for o in sorted {
        let time = o.mean_time.map(sig6).unwrap_or_default();
        let potential = o.epidemic_potential.map(sig6).unwrap_or_default();
        let censored = if o.process == ProcessKind::Si {
            o.censored.to_string()
        } else {
            String::new()
        };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            o.label, o.process, o.runs, censored, time, potential
        )?;
    }
    Ok(())
}
