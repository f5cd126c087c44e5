//! Acceptance suite. Prints one `[PASS]` or `[FAIL]` line per criterion.
//!
//! Criteria can be selected by number: `cargo test --test acceptance -- 1 3`.
//! Failures are reported but do not fail the run unless
//! `LCU_ACCEPTANCE_STRICT=1` is set.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use lcu::analysis::{
    equivalence_experiment, labeled_class_network, max_relative_deviation, state_vector, sweep_graph,
    timing_scan, EquivalenceConfig, TimingConfig,
};
use lcu::deterministic::{edge_subordination, init_state, run_with, step, InitScheme, SystemParams};
use lcu::rng::mix;
use lcu::unfolding::{classify, unfold};

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(budget_secs: u64, elapsed: Duration) -> bool {
    elapsed <= Duration::from_secs(budget_secs)
}

/// Scale invariance on 50 graphs, plus the subordination sum on every iteration.
fn scale_runs() -> (Outcome, Outcome) {
    let started = Instant::now();
    let kappas = [0.5, 2.0, 10.0];
    let lambdas = [0.0, 0.5, 1.0];
    let tau = 50;
    let mut max_dev: f64 = 0.0;
    let mut mismatches = 0;
    let mut runs = 0;
    let mut sigma_err: f64 = 0.0;
    let mut sigma_checks = 0usize;
    let (mut knn, mut class_nets) = (0, 0);

    for k in 0..50 {
        let g = sweep_graph(k, 0.1, SEED).expect("sweep graph");
        assert!((100..=200).contains(&g.num_vertices()));
        if k % 2 == 0 {
            class_nets += 1;
        } else {
            knn += 1;
        }
        let expected_sum = (g.num_classes() - 1) as f64;
        let mut check_sigma = |s: &lcu::SystemState| {
            let sigma = edge_subordination(&g, s);
            for e in 0..g.num_edges() {
                let total: f64 = sigma.iter().map(|c| c[e]).sum();
                sigma_err = sigma_err.max((total - expected_sum).abs());
                sigma_checks += 1;
            }
        };
        for &lambda in &lambdas {
            let base = SystemParams::new(lambda, tau);
            let mut reference = Vec::new();
            let ref_state = run_with(&g, &base, |s| {
                reference.push(state_vector(s));
                check_sigma(s);
            })
            .unwrap();
            let init = init_state(&g, &base).unwrap();
            for &kappa in &kappas {
                let scaled = init
                    .classes
                    .iter()
                    .map(|c| c.population.iter().map(|x| kappa * x).collect())
                    .collect();
                let params = base.clone().with_init(InitScheme::Custom(scaled));
                let mut t = 0;
                let state = run_with(&g, &params, |s| {
                    max_dev = max_dev.max(max_relative_deviation(&reference[t], &state_vector(s), kappa));
                    check_sigma(s);
                    t += 1;
                })
                .unwrap();
                if unfold(&g, &state) != unfold(&g, &ref_state) {
                    mismatches += 1;
                }
                runs += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    let scale = Outcome {
        pass: max_dev <= 1e-9 && mismatches == 0 && within(60, elapsed),
        detail: format!(
            "{runs} scaled runs on {class_nets} class networks and {knn} kNN graphs; max relative deviation {max_dev:.3e} (limit 1e-9); {mismatches} unfolding mismatches; {:.1}s (limit 60s)",
            elapsed.as_secs_f64()
        ),
    };
    let sigma = Outcome {
        pass: sigma_err <= 1e-12,
        detail: format!("{sigma_checks} edge checks; max |sum - (C - 1)| = {sigma_err:.3e} (limit 1e-12)"),
    };
    (scale, sigma)
}

fn small_instances() -> Outcome {
    let started = Instant::now();
    let all = common::enumerate_labeled(5, 2, false);
    let mut oracle_err: f64 = 0.0;
    let mut oracle_steps = 0;
    for sg in &all {
        let g = sg.to_graph(2);
        let dense_g = common::DenseGraph::from_graph(&g);
        for &lambda in &[0.0, 0.5, 1.0] {
            for init in [InitScheme::DegreeAllClasses, InitScheme::DegreeSourcesOnly] {
                let params = SystemParams::new(lambda, 3).with_init(init);
                let mut s = init_state(&g, &params).unwrap();
                for _ in 0..3 {
                    let expected = common::dense_step(&dense_g, &common::dense_from_state(&g, &s), lambda);
                    s = step(&g, &s, &params);
                    oracle_err = oracle_err.max(common::dense_distance(&common::dense_from_state(&g, &s), &expected));
                    oracle_steps += 1;
                }
            }
        }
    }
    let oracle_time = started.elapsed();

    let orbits = common::enumerate_labeled(5, 2, true);
    let steps = 3;
    let mut per_step = vec![(0usize, 0usize, 0.0f64); steps];
    let mut degenerate = 0;
    for (k, sg) in orbits.iter().enumerate() {
        let g = sg.to_graph(2);
        let c = common::compare_ensemble(&g, 1.0, 1_000, 10_000, steps, mix(SEED, k as u64));
        degenerate += c.degenerate_mismatches;
        for (acc, s) in per_step.iter_mut().zip(&c.by_step) {
            acc.0 += s.0;
            acc.1 += s.1;
            acc.2 = acc.2.max(s.2);
        }
    }
    let elapsed = started.elapsed();

    // Two-sided tail beyond 3 standard errors under normality.
    let nominal = 0.0027;
    let mut ensemble_ok = degenerate == 0;
    let mut lines = Vec::new();
    for (t, &(count, exceed, max_z)) in per_step.iter().enumerate() {
        let expect = nominal * count as f64;
        let bound = expect + 3.0 * expect.sqrt();
        ensemble_ok &= exceed as f64 <= bound;
        lines.push(format!(
            "t={}: {exceed}/{count} beyond 3 SE (chance bound {bound:.1}), max |z| {max_z:.2}",
            t + 1
        ));
    }
    let oracle_ok = oracle_err <= 1e-12;
    Outcome {
        pass: oracle_ok && ensemble_ok && within(600, elapsed),
        detail: format!(
            "dense oracle: {} labeled graphs, {oracle_steps} steps, max error {oracle_err:.3e} (limit 1e-12, {:.1}s); ensemble of 1e4 runs x 1e3 particles, lambda=1, over {} isomorphism classes: {}; {degenerate} zero-variance mismatches; {:.1}s (limit 600s)",
            all.len(),
            oracle_time.as_secs_f64(),
            orbits.len(),
            lines.join("; "),
            elapsed.as_secs_f64()
        ),
    }
}

fn equivalence() -> Outcome {
    let started = Instant::now();
    let cfg = EquivalenceConfig { seed: SEED, ..EquivalenceConfig::default() };
    let report = equivalence_experiment(&cfg).expect("equivalence experiment");
    let elapsed = started.elapsed();
    let mut ok = within(900, elapsed);
    let mut parts = Vec::new();
    for &lambda in &cfg.lambdas {
        let trend = report.metric(&format!("spearman_lambda={lambda}")).unwrap();
        let last = report.metric(&format!("final_lambda={lambda}")).unwrap();
        let curve: Vec<String> = report
            .series(&format!("lambda={lambda}"))
            .unwrap()
            .means()
            .iter()
            .map(|r| format!("{r:.4}"))
            .collect();
        ok &= trend >= 0.8 && last >= 0.9;
        parts.push(format!(
            "lambda={lambda}: correlation [{}], Spearman {trend:.2} (min 0.8), final {last:.4} (min 0.9)",
            curve.join(", ")
        ));
    }
    Outcome {
        pass: ok,
        detail: format!("{}; {:.1}s (limit 900s)", parts.join("; "), elapsed.as_secs_f64()),
    }
}

fn timing() -> Outcome {
    let started = Instant::now();
    let cfg = TimingConfig { seed: SEED, ..TimingConfig::default() };
    let report = timing_scan(&cfg).expect("timing scan");
    let elapsed = started.elapsed();
    let se = report.metric("slope_edges").unwrap();
    let sv = report.metric("slope_vertices").unwrap();
    let ratio = report.metric("lambda0_over_lambda1").unwrap();
    let in_band = |s: f64| (0.8..=1.3).contains(&s);
    let fmt = |name: &str| {
        report
            .series(name)
            .unwrap()
            .points
            .iter()
            .map(|p| format!("{}:{:.2}ms", p.x, 1e3 * p.y.mean))
            .collect::<Vec<_>>()
            .join(" ")
    };
    Outcome {
        pass: in_band(se) && in_band(sv) && within(600, elapsed),
        detail: format!(
            "slope vs |E| at |V|={}: {se:.3} [{}]; slope vs |V| at |E|={}: {sv:.3} [{}]; band [0.8, 1.3]; lambda 0/1 time ratio {ratio:.2}; {:.1}s (limit 600s)",
            cfg.fixed_vertices,
            fmt("edges"),
            cfg.fixed_edges,
            fmt("vertices"),
            elapsed.as_secs_f64()
        ),
    }
}

fn classification() -> Outcome {
    let started = Instant::now();
    let mut errors = Vec::new();
    for k in 0..10 {
        let (g, truth) = labeled_class_network(100, 3, 0.05, 0.05, mix(SEED, 500 + k)).unwrap();
        let state = run_with(&g, &SystemParams::new(1.0, 500), |_| {}).unwrap();
        let pred = classify(&g, &unfold(&g, &state));
        let test: Vec<usize> = (0..g.num_vertices()).filter(|&i| g.label(i) == 0).collect();
        errors.push(pred.error_rate(&truth, &test));
    }
    let elapsed = started.elapsed();
    let mean = errors.iter().sum::<f64>() / errors.len() as f64;
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Outcome {
        pass: mean <= 0.10 && within(120, elapsed),
        detail: format!(
            "mean test error {:.2}% over 10 networks (limit 10%), worst {:.2}%; {:.1}s (limit 120s)",
            100.0 * mean,
            100.0 * worst,
            elapsed.as_secs_f64()
        ),
    }
}

fn lcu(args: &[&str], threads: &str) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_lcu"))
        .args(args)
        .env("LCU_THREADS", threads)
        .output()
        .expect("run lcu binary")
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::TempDir::new().unwrap();
    let root = tmp.path();
    let s = |p: &Path| p.to_str().unwrap().to_owned();
    let data = root.join("data");
    let net = root.join("net");
    let gen1 = lcu(&["generate", "two-gaussians", "--per-class", "150", "--seed", "3", "--out", &s(&data)], "1");
    let gen2 = lcu(&["generate", "class-network", "--seed", "4", "--out", &s(&net)], "1");
    if !gen1.status.success() || !gen2.status.success() {
        return Outcome { pass: false, detail: "input generation failed".into() };
    }

    let mut identical = true;
    let mut compared = 0;
    let inputs: [Vec<String>; 2] = [
        vec![
            "--points".into(),
            s(&data.join("points.csv")),
            "--label-column".into(),
            "--labels".into(),
            s(&data.join("labels.csv")),
            "--auto-k".into(),
        ],
        vec![
            "--edges".into(),
            s(&net.join("graph.edges")),
            "--labels".into(),
            s(&net.join("labels.csv")),
            "--truth".into(),
            s(&net.join("truth.csv")),
        ],
    ];
    for (k, input) in inputs.iter().enumerate() {
        let mut outputs = Vec::new();
        for (run, threads) in ["4", "4", "1"].iter().enumerate() {
            let out = root.join(format!("out_{k}_{run}"));
            let mut args: Vec<&str> = vec!["classify", "--tau", "200", "--out"];
            let out_s = s(&out);
            args.push(&out_s);
            args.extend(input.iter().map(String::as_str));
            let result = lcu(&args, threads);
            if !result.status.success() {
                return Outcome {
                    pass: false,
                    detail: format!("classify failed: {}", String::from_utf8_lossy(&result.stderr)),
                };
            }
            outputs.push(dir_contents(&out));
        }
        compared += outputs[0].len();
        identical &= outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].is_empty();
    }
    Outcome {
        pass: identical,
        detail: format!(
            "2 inputs x 3 runs (LCU_THREADS 4, 4, 1); {compared} output files per run set {}",
            if identical { "byte-identical" } else { "differ" }
        ),
    }
}

fn main() {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wants = |k: usize| selected.is_empty() || selected.contains(&k);
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();

    if wants(1) || wants(2) {
        let (scale, sigma) = scale_runs();
        if wants(1) {
            results.push((1, "scale invariance", scale));
        }
        if wants(2) {
            results.push((2, "subordination sum", sigma));
        }
    }
    let rest: [(usize, &str, fn() -> Outcome); 5] = [
        (3, "small-instance oracle", small_instances),
        (4, "deterministic/stochastic correlation", equivalence),
        (5, "linear iteration time", timing),
        (6, "desk-scale classification", classification),
        (7, "CLI determinism", determinism),
    ];
    for (k, name, f) in rest {
        if wants(k) {
            results.push((k, name, f()));
        }
    }

    let mut failed = 0;
    for (k, name, o) in &results {
        if !o.pass {
            failed += 1;
        }
        println!("[{}] {k}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {}/{} criteria passed", results.len() - failed, results.len());
    if failed > 0 && std::env::var("LCU_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
