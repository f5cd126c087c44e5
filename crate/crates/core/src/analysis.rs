//! Experiments: agreement between the deterministic and stochastic systems,
//! scale-invariance sweeps and per-iteration timing.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deterministic::{init_state, run, run_with, step_in_place, InitScheme, SystemParams, SystemState};
use crate::error::{LcuError, Result};
use crate::graph::{
    build_knn_graph_auto, gen_class_network, gen_torus_knot, random_connected_graph, reveal_labels, Graph,
};
use crate::rng::mix;
use crate::stochastic::stoch_run;
use crate::unfolding::{symmetric_domination, unfold, CumulativeDomination};

pub const EXPERIMENT_REPORT_SCHEMA: u32 = 1;

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len(), "pearson: length mismatch");
    let n = a.len() as f64;
    if a.is_empty() {
        return None;
    }
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Ranks starting at 1, ties sharing their average rank.
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    let mut r = vec![0.0; x.len()];
    let mut k = 0;
    while k < order.len() {
        let mut end = k + 1;
        while end < order.len() && x[order[end]] == x[order[k]] {
            end += 1;
        }
        let avg = (k + end + 1) as f64 / 2.0;
        for &i in &order[k..end] {
            r[i] = avg;
        }
        k = end;
    }
    r
}

/// Spearman rank correlation; `None` when either side is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    pearson(&ranks(a), &ranks(b))
}

/// Pearson correlation between two sets of cumulative domination matrices,
/// taken over the symmetrized per-edge values of all classes.
pub fn domination_correlation<A, B>(g: &Graph, a: &A, b: &B) -> Result<f64>
where
    A: CumulativeDomination + ?Sized,
    B: CumulativeDomination + ?Sized,
{
    if a.num_classes() != b.num_classes() {
        return Err(LcuError::InvalidParameter(format!(
            "{} classes against {}",
            a.num_classes(),
            b.num_classes()
        )));
    }
    let x: Vec<f64> = symmetric_domination(g, a).concat();
    let y: Vec<f64> = symmetric_domination(g, b).concat();
    pearson(&x, &y).ok_or(LcuError::UndefinedCorrelation("cumulative domination has zero variance"))
}

/// Largest relative deviation of `scaled` from `kappa * base`, with `0/0 = 0`.
pub fn max_relative_deviation(base: &[f64], scaled: &[f64], kappa: f64) -> f64 {
    base.iter()
        .zip(scaled)
        .map(|(&b, &s)| {
            let expected = kappa * b;
            let denom = expected.abs().max(s.abs());
            if denom == 0.0 {
                0.0
            } else {
                (s - expected).abs() / denom
            }
        })
        .fold(0.0, f64::max)
}

/// Mean, sample standard deviation and sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub std: f64,
    pub samples: usize,
}

impl Aggregate {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = if n == 0 { f64::NAN } else { xs.iter().sum::<f64>() / n as f64 };
        let std = if n < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Aggregate { mean, std, samples: n }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub x: f64,
    pub y: Aggregate,
}

/// One plotted curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<SeriesPoint>,
}

impl Series {
    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.y.mean).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    pub config: serde_json::Value,
    pub master_seed: u64,
    /// Seeds of every generated network and simulation, in generation order.
    pub seeds: Vec<u64>,
    pub series: Vec<Series>,
    pub metrics: Vec<Metric>,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }
}

/// Writes one `x,y,sigma` CSV per series as `<experiment>_<series>.csv`.
pub fn write_plot_csvs(report: &ExperimentReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut written = Vec::new();
    for s in &report.series {
        let path = dir.join(format!("{}_{}.csv", report.experiment, s.name));
        let mut out = String::from("x,y,sigma\n");
        for p in &s.points {
            out.push_str(&format!(
                "{},{},{}\n",
                crate::io::format_float(p.x),
                crate::io::format_float(p.y.mean),
                crate::io::format_float(p.y.std)
            ));
        }
        fs::write(&path, out).map_err(|e| LcuError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Two-class network with `per_class` vertices of each class and a
/// `label_fraction` of its labels revealed. Returns the graph with observed
/// labels and the ground truth.
pub fn labeled_class_network(
    per_class: usize,
    m: usize,
    p: f64,
    label_fraction: f64,
    seed: u64,
) -> Result<(Graph, Vec<usize>)> {
    let truth: Vec<usize> = (0..2 * per_class).map(|i| 1 + i / per_class).collect();
    let g = gen_class_network(&truth, m, p, seed)?;
    let observed = reveal_labels(&truth, 2, label_fraction, mix(seed, 1))?;
    Ok((g.relabeled(observed, 2)?, truth))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceConfig {
    pub num_networks: usize,
    pub vertices_per_class: usize,
    pub m: usize,
    pub p: f64,
    pub label_fraction: f64,
    pub lambdas: Vec<f64>,
    pub tau: usize,
    /// Initial particles per class, in multiples of the degree sum.
    pub scale_factors: Vec<u64>,
    /// Stochastic runs averaged per condition.
    pub runs: usize,
    pub seed: u64,
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        EquivalenceConfig {
            num_networks: 10,
            vertices_per_class: 100,
            m: 3,
            p: 0.05,
            label_fraction: 0.05,
            lambdas: vec![0.0, 0.5, 1.0],
            tau: 200,
            scale_factors: vec![1, 4, 16, 64],
            runs: 10,
            seed: 1,
        }
    }
}

/// Seed-averaged cumulative domination of the stochastic system.
pub fn averaged_stochastic_domination(
    g: &Graph,
    particles: u64,
    lambda: f64,
    tau: usize,
    seeds: &[u64],
) -> Result<Vec<Vec<f64>>> {
    let mut avg = vec![vec![0.0; g.num_slots()]; g.num_classes()];
    for &s in seeds {
        let ens = stoch_run(g, particles, lambda, tau, s)?;
        for (acc, cls) in avg.iter_mut().zip(&ens.classes) {
            for (a, &x) in acc.iter_mut().zip(&cls.cumulative) {
                *a += x as f64;
            }
        }
    }
    let k = seeds.len() as f64;
    avg.iter_mut().flatten().for_each(|a| *a /= k);
    Ok(avg)
}

/// Correlation between deterministic and seed-averaged stochastic cumulative
/// domination, per competition level and initial particle count.
///
/// Series `lambda=<l>` holds the correlation against the scale factor,
/// aggregated over networks. Metrics: `spearman_lambda=<l>` (trend of the
/// mean correlation over scale) and `final_lambda=<l>` (mean correlation at
/// the largest scale).
pub fn equivalence_experiment(cfg: &EquivalenceConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    let network_seeds: Vec<u64> = (0..cfg.num_networks as u64).map(|k| mix(cfg.seed, k)).collect();
    let networks = network_seeds
        .iter()
        .map(|&s| labeled_class_network(cfg.vertices_per_class, cfg.m, cfg.p, cfg.label_fraction, s))
        .collect::<Result<Vec<_>>>()?;

    let mut seeds = network_seeds.clone();
    let mut conditions = Vec::new();
    for (k, (g, _)) in networks.iter().enumerate() {
        for (li, &lambda) in cfg.lambdas.iter().enumerate() {
            for (si, &scale) in cfg.scale_factors.iter().enumerate() {
                let base = mix(network_seeds[k], ((li as u64) << 32) | si as u64);
                let run_seeds: Vec<u64> = (0..cfg.runs as u64).map(|r| mix(base, r)).collect();
                seeds.extend(&run_seeds);
                conditions.push((k, li, si, g, lambda, scale, run_seeds));
            }
        }
    }

    let determ: Vec<Vec<SystemState>> = networks
        .par_iter()
        .map(|(g, _)| {
            cfg.lambdas
                .iter()
                .map(|&l| run(g, &SystemParams::new(l, cfg.tau)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let results: Vec<(usize, usize, f64)> = conditions
        .par_iter()
        .map(|(k, li, si, g, lambda, scale, run_seeds)| {
            let degree_sum: u64 = g.degrees().iter().map(|&d| d as u64).sum();
            let avg = averaged_stochastic_domination(g, scale * degree_sum, *lambda, cfg.tau, run_seeds)?;
            let r = domination_correlation(g, &determ[*k][*li], &avg)?;
            Ok((*li, *si, r))
        })
        .collect::<Result<_>>()?;

    let mut series = Vec::new();
    let mut metrics = Vec::new();
    for (li, &lambda) in cfg.lambdas.iter().enumerate() {
        let points: Vec<SeriesPoint> = cfg
            .scale_factors
            .iter()
            .enumerate()
            .map(|(si, &scale)| {
                let rs: Vec<f64> = results
                    .iter()
                    .filter(|r| r.0 == li && r.1 == si)
                    .map(|r| r.2)
                    .collect();
                SeriesPoint { x: scale as f64, y: Aggregate::of(&rs) }
            })
            .collect();
        let s = Series {
            name: format!("lambda={lambda}"),
            x_label: "initial particles / degree sum".into(),
            y_label: "correlation".into(),
            points,
        };
        let trend = spearman(&s.xs(), &s.means()).unwrap_or(f64::NAN);
        metrics.push(Metric {
            name: format!("spearman_lambda={lambda}"),
            value: trend,
            samples: s.points.len(),
        });
        if let Some(last) = s.points.last() {
            metrics.push(Metric {
                name: format!("final_lambda={lambda}"),
                value: last.y.mean,
                samples: last.y.samples,
            });
        }
        series.push(s);
    }

    Ok(ExperimentReport {
        schema_version: EXPERIMENT_REPORT_SCHEMA,
        experiment: "equivalence".into(),
        config: serde_json::to_value(cfg)?,
        master_seed: cfg.seed,
        seeds,
        series,
        metrics,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleConfig {
    pub num_graphs: usize,
    pub kappas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub tau: usize,
    pub label_fraction: f64,
    pub seed: u64,
}

impl Default for ScaleConfig {
    fn default() -> Self {
        ScaleConfig {
            num_graphs: 50,
            kappas: vec![0.5, 2.0, 10.0],
            lambdas: vec![0.0, 0.5, 1.0],
            tau: 50,
            label_fraction: 0.1,
            seed: 1,
        }
    }
}

/// Test graph `k` of the scale sweep: even indices are class networks
/// `G(y, 3, 0.05)`, odd indices kNN graphs over noisy torus knots, with
/// 100 to 200 vertices.
pub fn sweep_graph(k: usize, label_fraction: f64, seed: u64) -> Result<Graph> {
    let s = mix(seed, k as u64);
    let n = 100 + (s % 101) as usize;
    if k.is_multiple_of(2) {
        let truth: Vec<usize> = (0..n).map(|i| 1 + 2 * i / n).collect();
        let g = gen_class_network(&truth, 3, 0.05, s)?;
        g.relabeled(reveal_labels(&truth, 2, label_fraction, mix(s, 1))?, 2)
    } else {
        let classes = 2 + (s >> 32) as usize % 3;
        let data = gen_torus_knot(n, classes, 0.2, s)?;
        let truth = data.labels().to_vec();
        let (g, _) = build_knn_graph_auto(&data, 20)?;
        g.relabeled(reveal_labels(&truth, classes, label_fraction, mix(s, 1))?, classes)
    }
}

/// Flattened `(n, N, D)` of every class.
pub fn state_vector(s: &SystemState) -> Vec<f64> {
    let mut v = Vec::new();
    for c in &s.classes {
        v.extend(&c.population);
        v.extend(&c.flow);
        v.extend(&c.domination);
    }
    v
}

/// Runs every graph with the initial population scaled by each `kappa` and
/// reports the largest relative deviation from the scaled reference
/// trajectory, and the number of runs whose unfolding differs.
pub fn scale_invariance_sweep(cfg: &ScaleConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    let seeds: Vec<u64> = (0..cfg.num_graphs as u64).map(|k| mix(cfg.seed, k)).collect();
    let graphs = (0..cfg.num_graphs)
        .into_par_iter()
        .map(|k| sweep_graph(k, cfg.label_fraction, cfg.seed))
        .collect::<Result<Vec<_>>>()?;

    // (lambda index, kappa index, deviation, unfolding differs)
    let outcomes: Vec<(usize, usize, f64, bool)> = graphs
        .par_iter()
        .map(|g| {
            let mut out = Vec::new();
            for (li, &lambda) in cfg.lambdas.iter().enumerate() {
                let base = SystemParams::new(lambda, cfg.tau);
                let mut reference = Vec::new();
                let ref_state = run_with(g, &base, |s| reference.push(state_vector(s)))?;
                let init = init_state(g, &base)?;
                for (ki, &kappa) in cfg.kappas.iter().enumerate() {
                    let scaled_init = init
                        .classes
                        .iter()
                        .map(|c| c.population.iter().map(|x| kappa * x).collect())
                        .collect();
                    let params = base.clone().with_init(InitScheme::Custom(scaled_init));
                    let mut dev: f64 = 0.0;
                    let mut t = 0;
                    let state = run_with(g, &params, |s| {
                        dev = dev.max(max_relative_deviation(&reference[t], &state_vector(s), kappa));
                        t += 1;
                    })?;
                    let differs = unfold(g, &state) != unfold(g, &ref_state);
                    out.push((li, ki, dev, differs));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut series = Vec::new();
    let mut metrics = Vec::new();
    for (li, &lambda) in cfg.lambdas.iter().enumerate() {
        let points = cfg
            .kappas
            .iter()
            .enumerate()
            .map(|(ki, &kappa)| {
                let devs: Vec<f64> = outcomes
                    .iter()
                    .filter(|o| o.0 == li && o.1 == ki)
                    .map(|o| o.2)
                    .collect();
                SeriesPoint { x: kappa, y: Aggregate::of(&devs) }
            })
            .collect();
        series.push(Series {
            name: format!("lambda={lambda}"),
            x_label: "kappa".into(),
            y_label: "max relative deviation".into(),
            points,
        });
    }
    metrics.push(Metric {
        name: "max_relative_deviation".into(),
        value: outcomes.iter().map(|o| o.2).fold(0.0, f64::max),
        samples: outcomes.len(),
    });
    metrics.push(Metric {
        name: "unfolding_mismatches".into(),
        value: outcomes.iter().filter(|o| o.3).count() as f64,
        samples: outcomes.len(),
    });

    Ok(ExperimentReport {
        schema_version: EXPERIMENT_REPORT_SCHEMA,
        experiment: "scale".into(),
        config: serde_json::to_value(cfg)?,
        master_seed: cfg.seed,
        seeds,
        series,
        metrics,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingConfig {
    pub fixed_vertices: usize,
    pub edge_counts: Vec<usize>,
    pub fixed_edges: usize,
    pub vertex_counts: Vec<usize>,
    pub runs: usize,
    pub iterations: usize,
    pub lambda: f64,
    pub label_fraction: f64,
    pub seed: u64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        TimingConfig {
            fixed_vertices: 2_000,
            edge_counts: vec![20_000, 40_000, 80_000, 160_000, 320_000],
            fixed_edges: 400_000,
            vertex_counts: vec![25_000, 50_000, 100_000, 200_000, 400_000],
            runs: 10,
            iterations: 30,
            lambda: 1.0,
            label_fraction: 0.05,
            seed: 1,
        }
    }
}

/// Random connected two-class graph with a `label_fraction` of labeled vertices.
pub fn timing_graph(vertices: usize, edges: usize, label_fraction: f64, seed: u64) -> Result<Graph> {
    let g = random_connected_graph(vertices, edges, seed)?;
    let truth: Vec<usize> = (0..vertices).map(|i| 1 + i % 2).collect();
    g.with_labels(reveal_labels(&truth, 2, label_fraction, mix(seed, 1))?, 2)
}

/// Seconds per iteration: for each run, a fresh state and one untimed
/// warm-up iteration, then `iterations` individually timed iterations.
pub fn time_iterations(g: &Graph, params: &SystemParams, runs: usize, iterations: usize) -> Result<Vec<f64>> {
    let mut samples = Vec::with_capacity(runs * iterations);
    for _ in 0..runs {
        let mut state = init_state(g, params)?;
        step_in_place(g, &mut state, params);
        for _ in 0..iterations {
            let start = Instant::now();
            step_in_place(g, &mut state, params);
            samples.push(start.elapsed().as_secs_f64());
        }
    }
    Ok(samples)
}

/// Mean iteration time against `|E|` at fixed `|V|` and against `|V|` at
/// fixed `|E|`. Measurements run on a single thread.
///
/// Metrics: `slope_edges`, `slope_vertices` (log-log fits) and
/// `lambda0_over_lambda1` (time ratio on the largest fixed-`|V|` graph).
pub fn timing_scan(cfg: &TimingConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| LcuError::InvalidParameter(format!("thread pool: {e}")))?;
    let params = SystemParams::new(cfg.lambda, cfg.iterations);
    let mut seeds = Vec::new();

    let mut measure = |vertices: usize, edges: usize, salt: u64, lambdas: &[f64]| -> Result<Vec<Aggregate>> {
        let seed = mix(cfg.seed, salt);
        seeds.push(seed);
        let g = timing_graph(vertices, edges, cfg.label_fraction, seed)?;
        lambdas
            .iter()
            .map(|&l| {
                let p = SystemParams { lambda: l, ..params.clone() };
                pool.install(|| time_iterations(&g, &p, cfg.runs, cfg.iterations))
                    .map(|s| Aggregate::of(&s))
            })
            .collect()
    };

    let mut edge_points = Vec::new();
    let mut ratio = f64::NAN;
    for (k, &e) in cfg.edge_counts.iter().enumerate() {
        let last = k + 1 == cfg.edge_counts.len();
        let lambdas: &[f64] = if last { &[cfg.lambda, 0.0] } else { &[cfg.lambda] };
        let aggs = measure(cfg.fixed_vertices, e, k as u64, lambdas)?;
        if last {
            ratio = aggs[1].mean / aggs[0].mean;
        }
        edge_points.push(SeriesPoint { x: e as f64, y: aggs[0] });
    }
    let mut vertex_points = Vec::new();
    for (k, &v) in cfg.vertex_counts.iter().enumerate() {
        let aggs = measure(v, cfg.fixed_edges, 1000 + k as u64, &[cfg.lambda])?;
        vertex_points.push(SeriesPoint { x: v as f64, y: aggs[0] });
    }

    let edges = Series {
        name: "edges".into(),
        x_label: "edges".into(),
        y_label: "seconds per iteration".into(),
        points: edge_points,
    };
    let vertices = Series {
        name: "vertices".into(),
        x_label: "vertices".into(),
        y_label: "seconds per iteration".into(),
        points: vertex_points,
    };
    let metrics = vec![
        Metric {
            name: "slope_edges".into(),
            value: log_log_slope(&edges.xs(), &edges.means()),
            samples: edges.points.len(),
        },
        Metric {
            name: "slope_vertices".into(),
            value: log_log_slope(&vertices.xs(), &vertices.means()),
            samples: vertices.points.len(),
        },
        Metric {
            name: "lambda0_over_lambda1".into(),
            value: ratio,
            samples: 2 * cfg.runs * cfg.iterations,
        },
    ];

    Ok(ExperimentReport {
        schema_version: EXPERIMENT_REPORT_SCHEMA,
        experiment: "timing".into(),
        config: serde_json::to_value(cfg)?,
        master_seed: cfg.seed,
        seeds,
        series: vec![edges, vertices],
        metrics,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}
