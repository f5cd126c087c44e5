//! Command-line frontend.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 when the graph is
//! disconnected. `LCU_THREADS` sets the number of worker threads (0 runs
//! serially).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    domination_correlation, equivalence_experiment, scale_invariance_sweep, timing_scan,
    write_plot_csvs, EquivalenceConfig, ExperimentReport, ScaleConfig, TimingConfig,
};
use crate::deterministic::{run_with, InitScheme, SystemParams, SystemState, UpdateOrder};
use crate::error::{LcuError, Result};
use crate::graph::{
    build_knn_graph, build_knn_graph_auto, diameter, diameter_lower_bound, gen_torus_knot, gen_two_gaussians,
    reveal_labels, validate_graph, Dataset, Graph,
};
use crate::io::{self, ClassSummary, GraphSummary, ReportParams, RunReport, StochasticParams, Timings};
use crate::rng::{self, mix};
use crate::stochastic::{init_particles, stoch_step, ParticleEnsemble};
use crate::unfolding::{classify, unfold, Prediction, Unfolding};

/// Largest graph whose exact diameter is computed for the `tau` check.
const EXACT_DIAMETER_LIMIT: usize = 5_000;

#[derive(Debug, Parser)]
#[command(name = "lcu", version, about = "Semi-supervised classification by labeled component unfolding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the network, run the deterministic system, unfold and label vertices.
    Classify(RunArgs),
    /// Same pipeline driven by the stochastic particle system.
    Simulate(RunArgs),
    /// Run one of the experiment suites.
    Experiment(ExperimentArgs),
    /// Write synthetic inputs.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    /// Degree of every vertex, for every class.
    Degree,
    /// Degree of the sources of each class only.
    Sources,
    /// Read from --init-file.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Synchronous,
    Sequential,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Edge list (`i j` per line, 0-based).
    #[arg(long, conflicts_with = "points", required_unless_present = "points")]
    pub edges: Option<PathBuf>,
    /// Points CSV; a kNN network is built from it.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// The last column of --points holds labels.
    #[arg(long, requires = "points")]
    pub label_column: bool,
    /// Labels CSV `vertex,label` (0 = unlabeled). Overrides --label-column,
    /// which then serves as ground truth.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Ground truth labels CSV, used to report accuracy on unlabeled vertices.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Number of classes; every class must have a labeled vertex. Defaults to the largest label.
    #[arg(long)]
    pub classes: Option<usize>,
    /// Competition level in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Number of iterations.
    #[arg(long, default_value_t = 1000)]
    pub tau: usize,
    /// Neighbors per point for the kNN network.
    #[arg(long, conflicts_with = "auto_k")]
    pub k: Option<usize>,
    /// Use the smallest k that yields a connected network (default when --k is absent).
    #[arg(long)]
    pub auto_k: bool,
    /// Upper bound for the automatic k search.
    #[arg(long, default_value_t = 20)]
    pub max_k: usize,
    /// Initial population.
    #[arg(long, value_enum, default_value_t = InitArg::Degree)]
    pub init: InitArg,
    /// CSV `class,vertex,value` for --init file.
    #[arg(long)]
    pub init_file: Option<PathBuf>,
    /// Class update order within an iteration.
    #[arg(long, value_enum, default_value_t = OrderArg::Synchronous)]
    pub order: OrderArg,
    /// Master seed of the stochastic runs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use the stochastic particle system.
    #[arg(long)]
    pub stochastic: bool,
    /// Initial particles per class (stochastic).
    #[arg(long, default_value_t = 100_000)]
    pub particles: u64,
    /// Stochastic runs averaged together.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Also run the deterministic system and report the correlation of both.
    #[arg(long)]
    pub compare: bool,
    /// Record wall-clock timings in the report.
    #[arg(long)]
    pub timings: bool,
    /// Output directory.
    #[arg(long, default_value = "lcu-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Deterministic against stochastic cumulative domination.
    Equivalence,
    /// Per-iteration time against network size.
    Timing,
    /// Scaling of the initial population.
    Scale,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Networks (equivalence) or graphs (scale).
    #[arg(long)]
    pub networks: Option<usize>,
    /// Stochastic runs per condition (equivalence) or timed runs per size (timing).
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub tau: Option<usize>,
    /// Comma-separated competition levels.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    /// Comma-separated particle scale factors (equivalence).
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<u64>>,
    /// Comma-separated edge counts at fixed vertex count (timing).
    #[arg(long, value_delimiter = ',')]
    pub edge_counts: Option<Vec<usize>>,
    /// Comma-separated vertex counts at fixed edge count (timing).
    #[arg(long, value_delimiter = ',')]
    pub vertex_counts: Option<Vec<usize>>,
    /// Timed iterations per run (timing).
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long, default_value = "lcu-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    /// Class-assortative network G(y, m, p).
    ClassNetwork,
    /// Noisy torus knot split into classes.
    Torus,
    /// Two Gaussian blobs in the plane.
    TwoGaussians,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: GeneratorKind,
    /// Vertices or points per class (class-network, two-gaussians).
    #[arg(long, default_value_t = 100)]
    pub per_class: usize,
    /// Number of classes (class-network, torus).
    #[arg(long, default_value_t = 2)]
    pub classes: usize,
    /// Total points (torus).
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Draws per vertex (class-network).
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Cross-class weight (class-network).
    #[arg(long, default_value_t = 0.05)]
    pub p: f64,
    /// Noise standard deviation [default: 0.2 for torus, 1.0 for two-gaussians].
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Distance between the Gaussian centers (two-gaussians).
    #[arg(long, default_value_t = 4.0)]
    pub separation: f64,
    /// Fraction of labels revealed in labels.csv.
    #[arg(long, default_value_t = 0.05)]
    pub label_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "lcu-out")]
    pub out: PathBuf,
}

/// Maps an error to the process exit code.
pub fn exit_code(err: &LcuError) -> i32 {
    match err {
        LcuError::Disconnected { .. } => 2,
        _ => 1,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match thread_pool() {
        Ok(Some(pool)) => pool.install(|| execute(&cli)),
        Ok(None) => execute(&cli),
        Err(e) => Err(e),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>> {
    let Ok(value) = std::env::var("LCU_THREADS") else {
        return Ok(None);
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| LcuError::InvalidParameter(format!("LCU_THREADS = {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build()
        .map(Some)
        .map_err(|e| LcuError::InvalidParameter(format!("thread pool: {e}")))
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Generate(args) => cmd_generate(args),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| LcuError::io(dir, e))
}

struct Input {
    graph: Graph,
    k: Option<usize>,
    truth: Option<Vec<usize>>,
    built_from_points: bool,
}

fn load_input(args: &RunArgs) -> Result<Input> {
    if let Some(edges) = &args.edges {
        let g = io::read_edge_list(edges)?;
        let Some(labels_path) = &args.labels else {
            return Err(LcuError::InvalidParameter("--edges requires --labels".into()));
        };
        let (labels, c) = io::read_labels(labels_path, g.num_vertices(), args.classes)?;
        let graph = g.with_labels(labels, c)?;
        let truth = read_truth(args, graph.num_vertices())?;
        return Ok(Input { graph, k: None, truth, built_from_points: false });
    }
    let points = args.points.as_ref().expect("clap requires --edges or --points");
    let data = io::read_points(points, args.label_column)?;
    let (data, mut truth) = match &args.labels {
        Some(path) => {
            let (labels, _) = io::read_labels(path, data.len(), args.classes)?;
            let truth = args.label_column.then(|| data.labels().to_vec());
            (data.with_labels(labels)?, truth)
        }
        None if args.label_column => (data, None),
        None => {
            return Err(LcuError::InvalidParameter(
                "--points requires --labels or --label-column".into(),
            ))
        }
    };
    if args.truth.is_some() {
        truth = read_truth(args, data.len())?;
    }
    let (graph, k) = match args.k {
        Some(k) => (build_knn_graph(&data, k)?, k),
        None => build_knn_graph_auto(&data, args.max_k)?,
    };
    let c = args.classes.unwrap_or(data.num_classes());
    let graph = graph.relabeled(data.labels().to_vec(), c)?;
    Ok(Input { graph, k: Some(k), truth, built_from_points: true })
}

fn read_truth(args: &RunArgs, n: usize) -> Result<Option<Vec<usize>>> {
    args.truth
        .as_ref()
        .map(|p| io::read_labels(p, n, None).map(|(l, _)| l))
        .transpose()
}

fn system_params(args: &RunArgs, g: &Graph) -> Result<SystemParams> {
    let init = match args.init {
        InitArg::Degree => InitScheme::DegreeAllClasses,
        InitArg::Sources => InitScheme::DegreeSourcesOnly,
        InitArg::File => {
            let path = args
                .init_file
                .as_ref()
                .ok_or_else(|| LcuError::InvalidParameter("--init file requires --init-file".into()))?;
            InitScheme::Custom(io::read_initial_population(path, g.num_vertices(), g.num_classes())?)
        }
    };
    let order = match args.order {
        OrderArg::Synchronous => UpdateOrder::Synchronous,
        OrderArg::Sequential => UpdateOrder::Sequential,
    };
    let params = SystemParams::new(args.lambda, args.tau).with_init(init).with_order(order);
    params.validate()?;
    Ok(params)
}

fn check_args(args: &RunArgs, stochastic: bool) -> Result<()> {
    if args.tau == 0 {
        return Err(LcuError::InvalidParameter("tau must be at least 1".into()));
    }
    if stochastic {
        if args.particles == 0 {
            return Err(LcuError::InvalidParameter("--particles must be at least 1".into()));
        }
        if args.runs == 0 {
            return Err(LcuError::InvalidParameter("--runs must be at least 1".into()));
        }
        if args.init == InitArg::File {
            return Err(LcuError::InvalidParameter(
                "--init file is not available for the stochastic system".into(),
            ));
        }
        if args.order == OrderArg::Sequential {
            return Err(LcuError::InvalidParameter(
                "--order sequential is not available for the stochastic system".into(),
            ));
        }
    }
    Ok(())
}

/// Diameter used for the `tau` warning: exact on small graphs, a lower bound otherwise.
fn diameter_estimate(g: &Graph) -> Result<(usize, bool)> {
    if g.num_vertices() <= EXACT_DIAMETER_LIMIT {
        Ok((diameter(g)?, true))
    } else {
        Ok((diameter_lower_bound(g)?, false))
    }
}

/// Outcome of one system run, ready to be written out.
struct Outcome {
    domination: Vec<Vec<f64>>,
    populations: Vec<Vec<f64>>,
    iterations: usize,
    stochastic: Option<StochasticParams>,
    correlation: Option<f64>,
}

fn run_deterministic(g: &Graph, params: &SystemParams) -> Result<(SystemState, Vec<Vec<f64>>)> {
    let mut populations = vec![Vec::with_capacity(params.tau); g.num_classes()];
    let state = run_with(g, params, |s| {
        for (p, c) in populations.iter_mut().zip(&s.classes) {
            p.push(c.total_population());
        }
    })?;
    Ok((state, populations))
}

fn initial_ensemble(g: &Graph, args: &RunArgs) -> Result<ParticleEnsemble> {
    match args.init {
        InitArg::Sources => {
            let counts = (1..=g.num_classes())
                .map(|c| source_counts(g, c, args.particles))
                .collect();
            ParticleEnsemble::from_counts(g, counts)
        }
        _ => init_particles(g, args.particles),
    }
}

/// `total` split over the sources of `class` in proportion to degree.
///
/// Largest-remainder rounding; equal remainders go to the lower index.
fn source_counts(g: &Graph, class: usize, total: u64) -> Vec<u64> {
    let members = g.sources(class);
    let degree_sum: u128 = members.iter().map(|&i| g.degree(i) as u128).sum();
    let mut counts = vec![0u64; g.num_vertices()];
    let mut remainders = Vec::with_capacity(members.len());
    let mut assigned = 0;
    for &i in &members {
        let share = total as u128 * g.degree(i) as u128;
        counts[i] = (share / degree_sum) as u64;
        assigned += counts[i];
        remainders.push((share % degree_sum, i));
    }
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in remainders.iter().take((total - assigned) as usize) {
        counts[i] += 1;
    }
    counts
}

fn run_stochastic(g: &Graph, args: &RunArgs) -> Result<Outcome> {
    let seeds: Vec<u64> = (0..args.runs as u64).map(|r| mix(args.seed, r)).collect();
    let c = g.num_classes();
    let mut domination = vec![vec![0.0; g.num_slots()]; c];
    let mut populations = vec![vec![0.0; args.tau]; c];
    let initial = initial_ensemble(g, args)?;
    for &s in &seeds {
        let mut ens = initial.clone();
        let mut rng = rng::stream(s, 0);
        for t in 0..args.tau {
            stoch_step(g, &mut ens, args.lambda, &mut rng);
            for (p, cls) in populations.iter_mut().zip(&ens.classes) {
                p[t] += cls.total() as f64;
            }
        }
        for (acc, cls) in domination.iter_mut().zip(&ens.classes) {
            for (a, &x) in acc.iter_mut().zip(&cls.cumulative) {
                *a += x as f64;
            }
        }
    }
    let runs = args.runs as f64;
    domination.iter_mut().flatten().for_each(|x| *x /= runs);
    populations.iter_mut().flatten().for_each(|x| *x /= runs);
    Ok(Outcome {
        domination,
        populations,
        iterations: args.tau,
        stochastic: Some(StochasticParams { particles: args.particles, runs: args.runs, seeds }),
        correlation: None,
    })
}

fn accuracy(pred: &Prediction, g: &Graph, truth: &[usize]) -> Option<f64> {
    let eval: Vec<usize> = (0..g.num_vertices())
        .filter(|&i| g.label(i) == 0 && truth.get(i).is_some_and(|&t| t != 0))
        .collect();
    (!eval.is_empty()).then(|| 1.0 - pred.error_rate(truth, &eval))
}

fn pipeline(args: &RunArgs, stochastic: bool) -> Result<()> {
    check_args(args, stochastic)?;
    let t0 = Instant::now();
    let input = load_input(args)?;
    let g = &input.graph;
    validate_graph(g)?;
    let params = system_params(args, g)?;
    let build_seconds = t0.elapsed().as_secs_f64();

    let mut warnings = Vec::new();
    let (diam, exact) = diameter_estimate(g)?;
    if args.tau < diam {
        let msg = format!(
            "tau = {} is below the network diameter{} {diam}; some vertices may stay unreached",
            args.tau,
            if exact { "" } else { " lower bound" }
        );
        eprintln!("warning: {msg}");
        warnings.push(msg);
    }

    let t1 = Instant::now();
    let outcome = if stochastic {
        let mut out = run_stochastic(g, args)?;
        if args.compare {
            let (det, _) = run_deterministic(g, &params)?;
            out.correlation = Some(domination_correlation(g, &det, &out.domination)?);
        }
        out
    } else {
        let (state, populations) = run_deterministic(g, &params)?;
        Outcome {
            iterations: state.t,
            domination: state.classes.into_iter().map(|c| c.domination).collect(),
            populations,
            stochastic: None,
            correlation: None,
        }
    };
    let unfolding = unfold(g, &outcome.domination);
    let unfold_seconds = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let pred = classify(g, &unfolding);
    let classify_seconds = t2.elapsed().as_secs_f64();

    let acc = input.truth.as_deref().and_then(|t| accuracy(&pred, g, t));
    write_outputs(
        args,
        &input,
        &params,
        &outcome,
        &unfolding,
        &pred,
        acc,
        (diam, exact),
        warnings,
        args.timings.then_some(Timings { build_seconds, unfold_seconds, classify_seconds }),
    )?;

    let overlapping = pred.vertices.iter().filter(|v| v.overlapping).count();
    println!(
        "classified {} vertices into {} classes ({} overlapping); outputs in {}",
        g.num_vertices(),
        g.num_classes(),
        overlapping,
        args.out.display()
    );
    if let Some(a) = acc {
        println!("accuracy: {a}");
    }
    if let Some(r) = outcome.correlation {
        println!("correlation: {r}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn write_outputs(
    args: &RunArgs,
    input: &Input,
    params: &SystemParams,
    outcome: &Outcome,
    unfolding: &Unfolding,
    pred: &Prediction,
    accuracy: Option<f64>,
    diameter: (usize, bool),
    warnings: Vec<String>,
    timings: Option<Timings>,
) -> Result<()> {
    let g = &input.graph;
    let out = &args.out;
    create_dir(out)?;
    if input.built_from_points {
        io::write_edge_list(g, out.join("graph.edges"))?;
    }
    io::write_predictions(pred, out.join("predictions.csv"))?;
    for c in 1..=g.num_classes() {
        io::write_unfolding_edges(g, unfolding, c, out.join(format!("unfolding_class_{c}.edges")))?;
    }
    io::write_unfolding_edges(g, unfolding, 0, out.join("unfolding_unassigned.edges"))?;
    io::dump_domination(g, &outcome.domination, outcome.iterations, out.join("domination.txt"))?;

    let sizes = unfolding.sizes();
    let report = RunReport {
        schema_version: io::RUN_REPORT_SCHEMA,
        params: ReportParams {
            lambda: params.lambda,
            tau: params.tau,
            k: input.k,
            init: format!("{:?}", args.init).to_lowercase(),
            update_order: format!("{:?}", args.order).to_lowercase(),
            seed: outcome.stochastic.as_ref().map(|_| args.seed),
            stochastic: outcome.stochastic.clone(),
        },
        graph: GraphSummary {
            vertices: g.num_vertices(),
            edges: g.num_edges(),
            classes: g.num_classes(),
            labeled: g.labels().iter().filter(|&&l| l != 0).count(),
            diameter: diameter.1.then_some(diameter.0),
        },
        iterations: outcome.iterations,
        classes: (1..=g.num_classes())
            .map(|c| ClassSummary {
                class: c,
                population_by_iteration: outcome.populations[c - 1].clone(),
                unfolding_edges: sizes[c],
            })
            .collect(),
        unassigned_edges: sizes[0],
        overlapping_vertices: pred
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| v.overlapping)
            .map(|(i, _)| i)
            .collect(),
        predictions: pred.vertices.clone(),
        accuracy,
        correlation: outcome.correlation,
        warnings,
        timings,
    };
    io::write_run_report(&report, out.join("report.json"))
}

pub fn cmd_classify(args: &RunArgs) -> Result<()> {
    pipeline(args, args.stochastic)
}

pub fn cmd_simulate(args: &RunArgs) -> Result<()> {
    pipeline(args, true)
}

fn finish_experiment(report: &ExperimentReport, out: &Path) -> Result<()> {
    create_dir(out)?;
    io::write_json(report, out.join(format!("{}_report.json", report.experiment)))?;
    for p in write_plot_csvs(report, out)? {
        println!("wrote {}", p.display());
    }
    for m in &report.metrics {
        println!("{} = {} (n = {})", m.name, m.value, m.samples);
    }
    Ok(())
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<()> {
    let report = match args.suite {
        Suite::Equivalence => {
            let d = EquivalenceConfig::default();
            equivalence_experiment(&EquivalenceConfig {
                num_networks: args.networks.unwrap_or(d.num_networks),
                runs: args.runs.unwrap_or(d.runs),
                tau: args.tau.unwrap_or(d.tau),
                lambdas: args.lambdas.clone().unwrap_or(d.lambdas),
                scale_factors: args.scales.clone().unwrap_or(d.scale_factors),
                seed: args.seed,
                ..d
            })?
        }
        Suite::Timing => {
            let d = TimingConfig::default();
            timing_scan(&TimingConfig {
                edge_counts: args.edge_counts.clone().unwrap_or(d.edge_counts),
                vertex_counts: args.vertex_counts.clone().unwrap_or(d.vertex_counts),
                runs: args.runs.unwrap_or(d.runs),
                iterations: args.iterations.unwrap_or(d.iterations),
                seed: args.seed,
                ..d
            })?
        }
        Suite::Scale => {
            let d = ScaleConfig::default();
            scale_invariance_sweep(&ScaleConfig {
                num_graphs: args.networks.unwrap_or(d.num_graphs),
                tau: args.tau.unwrap_or(d.tau),
                lambdas: args.lambdas.clone().unwrap_or(d.lambdas),
                seed: args.seed,
                ..d
            })?
        }
    };
    finish_experiment(&report, &args.out)
}

fn write_dataset(data: &Dataset, classes: usize, args: &GenerateArgs) -> Result<()> {
    let observed = reveal_labels(data.labels(), classes, args.label_fraction, mix(args.seed, 1))?;
    io::write_points(data, true, args.out.join("points.csv"))?;
    io::write_labels(&observed, args.out.join("labels.csv"))?;
    println!("wrote points.csv and labels.csv to {}", args.out.display());
    Ok(())
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    create_dir(&args.out)?;
    match args.kind {
        GeneratorKind::ClassNetwork => {
            let truth: Vec<usize> = (0..args.per_class * args.classes)
                .map(|i| 1 + i / args.per_class.max(1))
                .collect();
            let g = crate::graph::gen_class_network(&truth, args.m, args.p, args.seed)?;
            let observed = reveal_labels(&truth, args.classes, args.label_fraction, mix(args.seed, 1))?;
            io::write_edge_list(&g, args.out.join("graph.edges"))?;
            io::write_labels(&observed, args.out.join("labels.csv"))?;
            io::write_labels(&truth, args.out.join("truth.csv"))?;
            println!("wrote graph.edges, labels.csv and truth.csv to {}", args.out.display());
            Ok(())
        }
        GeneratorKind::Torus => {
            let data = gen_torus_knot(args.n, args.classes, args.sigma.unwrap_or(0.2), args.seed)?;
            write_dataset(&data, args.classes, args)
        }
        GeneratorKind::TwoGaussians => {
            let data = gen_two_gaussians(args.per_class, args.separation, args.sigma.unwrap_or(1.0), args.seed)?;
            write_dataset(&data, 2, args)
        }
    }
}
