mod settings;

use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use exforce::correlation::Method;
use exforce::epidemic::{
    calibrated_beta, run_batch, write_outcomes_csv, ProcessKind, SpreadParams, DEFAULT_BETA_FACTOR,
    DEFAULT_COVERAGE_TARGET, DEFAULT_EPIDEMIC_THRESHOLD, DEFAULT_GAMMA, DEFAULT_T_MAX,
};
use exforce::experiment::{
    run_experiment, sample_seeds, sha256_hex, summary_table, write_bundle, ExperimentConfig, ExperimentError,
    InputInfo, Metric,
};
use exforce::format::decimal;
use exforce::generate::generate_pa_graph;
use exforce::graph::{parse_edge_list, Graph, NodeId};
use exforce::metrics::{all_metrics, eigenvector_centrality, write_metrics_csv, DEFAULT_ALPHA, DEFAULT_MAX_ITER, DEFAULT_TOL};
use exforce::stats::network_stats;

use settings::{pick, switch, FileSettings};

#[derive(Parser, Debug)]
#[command(name = "exforce", version, about = "Spreading-power metrics and epidemic simulation on undirected networks")]
struct Cli {
    /// Worker threads for metric and simulation fan-out (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Size, density, diameter and leading eigenvalue of an edge list.
    Stats {
        graph: PathBuf,
        /// All-sources BFS instead of the bounded search.
        #[arg(long)]
        exact_diameter: bool,
    },
    /// Per-node ExF, ExF^M, k-shell and eigenvector centrality as CSV.
    Metrics {
        graph: PathBuf,
        /// Uniform sample of this many nodes from the largest component.
        #[arg(long, conflicts_with = "nodes")]
        sample: Option<usize>,
        /// File with one node label per line.
        #[arg(long)]
        nodes: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Seed for `--sample`.
        #[arg(long, default_value_t = 0)]
        master_seed: u64,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeated SI, SIS or SIR runs from each listed seed.
    Simulate {
        graph: PathBuf,
        #[arg(long, value_enum)]
        process: Process,
        /// File with one seed label per line.
        #[arg(long)]
        seeds: PathBuf,
        #[command(flatten)]
        spread: SpreadFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Synthetic preferential-attachment edge list.
    Generate {
        #[arg(long, value_enum, default_value_t = Model::Pa)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        leaf_fraction: f64,
        #[arg(long, default_value_t = 0)]
        master_seed: u64,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample seeds, compute metrics, simulate all three processes and
    /// correlate; writes the report bundle.
    Experiment {
        graph: PathBuf,
        #[arg(long)]
        sample: Option<usize>,
        /// Comma-separated metric names (degree, exf, exfm, kshell, evc).
        #[arg(long, value_delimiter = ',')]
        metrics: Option<Vec<String>>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Confidence level of the correlation intervals.
        #[arg(long)]
        level: Option<f64>,
        /// Rank correlation instead of Pearson.
        #[arg(long)]
        spearman: bool,
        /// Correlate against ln(1 + outcome).
        #[arg(long)]
        log_outcomes: bool,
        #[command(flatten)]
        spread: SpreadFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Download a snapshot file. No parsing.
    Fetch {
        #[arg(long)]
        url: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        overwrite: bool,
    },
}

#[derive(Args, Debug)]
struct SpreadFlags {
    #[arg(long)]
    runs: Option<usize>,
    /// Transmission probability (default: beta-factor * gamma / lambda).
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    beta_factor: Option<f64>,
    #[arg(long)]
    tmax: Option<u32>,
    /// SI coverage target as a fraction of the largest component.
    #[arg(long)]
    coverage: Option<f64>,
    /// SIS prevalence / SIR attack fraction that counts as an epidemic.
    #[arg(long)]
    threshold: Option<f64>,
    /// Keep SIS runs going after they are classified epidemic.
    #[arg(long)]
    run_to_horizon: bool,
    #[arg(long)]
    master_seed: Option<u64>,
    /// TOML file whose keys are flag names; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OutputFlags {
    #[arg(long, env = "EXFORCE_OUT_DIR", default_value = "exforce-out")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Process {
    Si,
    Sis,
    Sir,
}

impl From<Process> for ProcessKind {
    fn from(p: Process) -> Self {
        match p {
            Process::Si => ProcessKind::Si,
            Process::Sis => ProcessKind::Sis,
            Process::Sir => ProcessKind::Sir,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    Pa,
}

/// Failures split by exit code.
enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.into())
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

type Outcome<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(1);
        }
    };

    let result = match cli.threads {
        Some(0) => Err(usage(anyhow!("--threads must be at least 1"))),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(Failure::Data(e.into())),
        },
        None => dispatch(cli.command),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {}", one_line(&e));
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {}", one_line(&e));
            ExitCode::from(2)
        }
    }
}

fn one_line(e: &anyhow::Error) -> String {
    format!("{e:#}").replace('\n', " ")
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Stats { graph, exact_diameter } => stats(&graph, exact_diameter),
        Command::Metrics {
            graph,
            sample,
            nodes,
            alpha,
            master_seed,
            out,
        } => metrics(&graph, sample, nodes.as_deref(), alpha, master_seed, out.as_deref()),
        Command::Simulate {
            graph,
            process,
            seeds,
            spread,
            output,
        } => simulate(&graph, process.into(), &seeds, &spread, &output.out_dir),
        Command::Generate {
            model: Model::Pa,
            n,
            m,
            leaf_fraction,
            master_seed,
            out,
        } => {
            let g = generate_pa_graph(n, m, leaf_fraction, master_seed).map_err(usage)?;
            with_output(out.as_deref(), |w| g.write_edge_list(w))
        }
        Command::Experiment {
            graph,
            sample,
            metrics,
            alpha,
            level,
            spearman,
            log_outcomes,
            spread,
            output,
        } => {
            let flags = ExperimentFlags {
                sample,
                metrics,
                alpha,
                level,
                spearman,
                log_outcomes,
            };
            experiment(&graph, &flags, &spread, &output.out_dir)
        }
        Command::Fetch { url, out, overwrite } => {
            let bytes = exforce::fetch::fetch_snapshot(&url, &out, overwrite)?;
            println!("wrote {bytes} bytes to {}", out.display());
            Ok(())
        }
    }
}

struct LoadedGraph {
    graph: Graph,
    input: InputInfo,
}

fn load_graph(path: &Path) -> Outcome<LoadedGraph> {
    let bytes = fs::read(path).with_context(|| path.display().to_string())?;
    let (graph, summary) = parse_edge_list(&bytes[..]).with_context(|| path.display().to_string())?;
    log::info!(
        "{}: {} nodes, {} edges ({} self-loops, {} duplicates dropped)",
        path.display(),
        graph.node_count(),
        graph.edge_count(),
        summary.self_loops,
        summary.duplicate_edges
    );
    Ok(LoadedGraph {
        graph,
        input: InputInfo {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        },
    })
}

/// One label per line; `#` comments and blank lines skipped, extra tokens
/// ignored.
fn read_node_list(path: &Path, g: &Graph) -> Outcome<Vec<NodeId>> {
    let file = fs::File::open(path).with_context(|| path.display().to_string())?;
    let mut nodes = Vec::new();
    for (i, line) in io::BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| path.display().to_string())?;
        let Some(label) = line.split_whitespace().next() else {
            continue;
        };
        if label.starts_with('#') {
            continue;
        }
        let id = g
            .id_of(label)
            .ok_or_else(|| anyhow!("{}: line {}: unknown node {label:?}", path.display(), i + 1))?;
        nodes.push(id);
    }
    Ok(nodes)
}

fn with_output(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Outcome {
    match path {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| path.display().to_string())?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn stats(path: &Path, exact_diameter: bool) -> Outcome {
    let loaded = load_graph(path)?;
    let s = network_stats(&loaded.graph, exact_diameter)?;
    println!("nodes={}", s.nodes);
    println!("edges={}", s.edges);
    println!("density={}", decimal(s.density, 6));
    println!("mean_degree={}", decimal(s.mean_degree, 6));
    println!("diameter={}", s.diameter);
    println!("diameter_exact={}", s.diameter_exact);
    println!("lambda={}", decimal(s.leading_eigenvalue, 6));
    println!("lcc_nodes={}", s.lcc_size);
    println!("lcc_edges={}", s.lcc_edges);
    Ok(())
}

fn metrics(
    path: &Path,
    sample: Option<usize>,
    nodes: Option<&Path>,
    alpha: f64,
    master_seed: u64,
    out: Option<&Path>,
) -> Outcome {
    let g = load_graph(path)?.graph;
    let selected = match (sample, nodes) {
        (Some(k), _) => sample_seeds(&g, k, master_seed).map_err(usage)?,
        (None, Some(file)) => read_node_list(file, &g)?,
        (None, None) => (0..g.node_count()).collect(),
    };
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(usage(anyhow!("--alpha must be positive, got {alpha}")));
    }
    let records = all_metrics(&g, &selected, alpha)?;
    with_output(out, |w| write_metrics_csv(&g, &records, w))
}

fn leading_eigenvalue(g: &Graph) -> Outcome<f64> {
    Ok(eigenvector_centrality(g, DEFAULT_TOL, DEFAULT_MAX_ITER)?.1)
}

/// Resolved spreading parameters for one process kind.
fn spread_params(g: &Graph, kind: ProcessKind, flags: &SpreadFlags, file: &FileSettings) -> Outcome<SpreadParams> {
    let gamma = pick(flags.gamma, file.gamma, DEFAULT_GAMMA);
    let beta = match flags.beta.or(file.beta) {
        Some(beta) => beta,
        None => {
            let factor = pick(flags.beta_factor, file.beta_factor, DEFAULT_BETA_FACTOR);
            let lambda = leading_eigenvalue(g)?;
            let beta = calibrated_beta(factor, gamma, lambda);
            log::info!("beta = {factor} * {gamma} / {lambda} = {beta}");
            beta
        }
    };
    let mut p = SpreadParams::new(kind, beta, gamma);
    p.t_max = pick(flags.tmax, file.tmax, DEFAULT_T_MAX);
    p.coverage_target = pick(flags.coverage, file.coverage, DEFAULT_COVERAGE_TARGET);
    p.epidemic_threshold = pick(flags.threshold, file.threshold, DEFAULT_EPIDEMIC_THRESHOLD);
    p.stop_when_decided = !switch(flags.run_to_horizon, file.run_to_horizon);
    p.validate().map_err(usage)?;
    Ok(p)
}

#[derive(Serialize)]
struct SimulationMeta<'a> {
    tool: &'static str,
    version: &'static str,
    input: &'a InputInfo,
    params: &'a SpreadParams,
    runs_per_seed: usize,
    master_seed: u64,
    seeds: Vec<&'a str>,
    skipped_outside_largest_component: Vec<String>,
}

fn simulate(path: &Path, kind: ProcessKind, seeds_file: &Path, flags: &SpreadFlags, out_dir: &Path) -> Outcome {
    let file = FileSettings::load(flags.config.as_deref()).map_err(usage)?;
    let loaded = load_graph(path)?;
    let g = &loaded.graph;
    let seeds = read_node_list(seeds_file, g)?;
    let params = spread_params(g, kind, flags, &file)?;
    let runs = pick(flags.runs, file.runs, 100);
    let master_seed = pick(flags.master_seed, file.master_seed, 0);

    let batch = run_batch(g, &seeds, &params, runs, master_seed).map_err(usage)?;
    let mut outcomes = Vec::new();
    let mut skipped = Vec::new();
    for entry in batch {
        match entry {
            Ok(o) => outcomes.push(o),
            Err(e) => {
                log::warn!("{e}");
                skipped.push(e.to_string());
            }
        }
    }

    fs::create_dir_all(out_dir).with_context(|| out_dir.display().to_string())?;
    let csv = out_dir.join(format!("outcomes_{kind}.csv"));
    with_output(Some(&csv), |w| write_outcomes_csv(&outcomes, w))?;
    let meta = SimulationMeta {
        tool: "exforce",
        version: env!("CARGO_PKG_VERSION"),
        input: &loaded.input,
        params: &params,
        runs_per_seed: runs,
        master_seed,
        seeds: outcomes.iter().map(|o| o.label.as_str()).collect(),
        skipped_outside_largest_component: skipped,
    };
    let json = serde_json::to_string_pretty(&meta)?;
    fs::write(out_dir.join(format!("outcomes_{kind}.meta.json")), json + "\n")?;
    println!("{}", csv.display());
    Ok(())
}

struct ExperimentFlags {
    sample: Option<usize>,
    metrics: Option<Vec<String>>,
    alpha: Option<f64>,
    level: Option<f64>,
    spearman: bool,
    log_outcomes: bool,
}

fn experiment(path: &Path, flags: &ExperimentFlags, spread: &SpreadFlags, out_dir: &Path) -> Outcome {
    let file = FileSettings::load(spread.config.as_deref()).map_err(usage)?;
    let loaded = load_graph(path)?;
    let g = &loaded.graph;
    g.require_edges()?;

    // calibrate once, then specialize per process
    let si = spread_params(g, ProcessKind::Si, spread, &file)?;
    let mut cfg = ExperimentConfig::new(si.beta, si.gamma);
    cfg.si = si;
    cfg.sis = si.with_kind(ProcessKind::Sis);
    cfg.sir = si.with_kind(ProcessKind::Sir);
    cfg.sample_size = pick(flags.sample, file.sample, cfg.sample_size);
    cfg.runs_per_seed = pick(spread.runs, file.runs, cfg.runs_per_seed);
    cfg.master_seed = pick(spread.master_seed, file.master_seed, cfg.master_seed);
    cfg.alpha = pick(flags.alpha, file.alpha, cfg.alpha);
    cfg.level = pick(flags.level, file.level, cfg.level);
    if let Some(names) = flags.metrics.clone().or(file.metrics.clone()) {
        cfg.metrics = names
            .iter()
            .map(|n| n.trim().parse::<Metric>())
            .collect::<Result<_, _>>()
            .map_err(usage)?;
    }
    if switch(flags.spearman, file.spearman) {
        cfg.method = Method::Spearman;
    }
    cfg.log_outcomes = switch(flags.log_outcomes, file.log_outcomes);
    cfg.validate().map_err(usage)?;
    if !(cfg.alpha > 0.0 && cfg.alpha.is_finite()) {
        return Err(usage(anyhow!("--alpha must be positive, got {}", cfg.alpha)));
    }

    let report = run_experiment(g, &cfg).map_err(|e| match e {
        ExperimentError::Argument(_) => usage(e),
        other => other.into(),
    })?;
    write_bundle(g, &report, out_dir, Some(&loaded.input))?;
    print!("{}", summary_table(&report));
    println!("bundle written to {}", out_dir.display());
    Ok(())
}
