use lcu::graph::Graph;
use lcu::rng;
use lcu::stochastic::{stoch_step, ParticleEnsemble};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const ALPHA: f64 = 1e-3;

fn chi_square_p(observed: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dist = ChiSquared::new((observed.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|j| (0, j)).collect();
    let mut labels = vec![0; leaves + 1];
    labels[0] = 1;
    Graph::from_edges(leaves + 1, edges).unwrap().with_labels(labels, 1).unwrap()
}

#[test]
fn movement_is_uniform_over_neighbors() {
    let g = star(6);
    for seed in 0..5 {
        let mut counts = vec![0u64; 7];
        counts[0] = 30_000;
        let mut ens = ParticleEnsemble::from_counts(&g, vec![counts]).unwrap();
        stoch_step(&g, &mut ens, 0.0, &mut rng::stream(seed, 0));
        let c = ens.class(1);
        assert_eq!(c.total(), 30_000);
        let p = chi_square_p(&c.counts[1..], &[1.0 / 6.0; 6]);
        assert!(p > ALPHA, "seed {seed}: p = {p}");
    }
}

#[test]
fn survival_thinning_and_rival_absorption() {
    // Path 0 - 1 - 2 with sources of classes 1 and 2 at the ends. Without
    // previous flows every edge is evenly contested, so at lambda = 1 a class 1
    // particle leaving vertex 1 survives only towards vertex 0, with
    // probability 1/2 * 1/2.
    let g = Graph::from_edges(3, [(0, 1), (1, 2)])
        .unwrap()
        .with_labels(vec![1, 0, 2], 2)
        .unwrap();
    for seed in 0..5 {
        let n = 40_000;
        let mut ens = ParticleEnsemble::from_counts(&g, vec![vec![0, n, 0], vec![0, 0, 1]]).unwrap();
        stoch_step(&g, &mut ens, 1.0, &mut rng::stream(seed, 0));
        let c = ens.class(1);
        assert_eq!(c.generated_last, vec![0, 0, 0]);
        let survived = c.counts[0];
        assert_eq!(c.absorbed_last[1], n - survived);
        let p = chi_square_p(&[survived, n - survived], &[0.25, 0.75]);
        assert!(p > ALPHA, "seed {seed}: p = {p}");
    }
}

#[test]
fn single_class_walk_reaches_degree_distribution() {
    // Wheel on eight vertices: hub 0 and an odd rim, so the walk is aperiodic.
    let rim = 7;
    let mut edges: Vec<_> = (1..=rim).map(|j| (0, j)).collect();
    edges.extend((1..=rim).map(|j| (j, j % rim + 1)));
    let mut labels = vec![0; rim + 1];
    labels[3] = 1;
    let g = Graph::from_edges(rim + 1, edges).unwrap().with_labels(labels, 1).unwrap();
    let two_m = 2.0 * g.num_edges() as f64;
    let probs: Vec<f64> = (0..=rim).map(|i| g.degree(i) as f64 / two_m).collect();
    for seed in 0..5 {
        let mut counts = vec![0u64; rim + 1];
        counts[3] = 20_000;
        let mut ens = ParticleEnsemble::from_counts(&g, vec![counts]).unwrap();
        let mut r = rng::stream(seed, 0);
        for _ in 0..100 {
            stoch_step(&g, &mut ens, 0.0, &mut r);
        }
        let c = ens.class(1);
        assert_eq!(c.total(), 20_000);
        let p = chi_square_p(&c.counts, &probs);
        assert!(p > ALPHA, "seed {seed}: p = {p}");
    }
}

#[test]
fn same_seed_same_trajectory() {
    let g = star(4);
    let run = |seed| {
        let mut ens = ParticleEnsemble::from_counts(&g, vec![vec![500, 0, 0, 0, 0]]).unwrap();
        let mut r = rng::stream(seed, 0);
        for _ in 0..20 {
            stoch_step(&g, &mut ens, 0.5, &mut r);
        }
        ens
    };
    assert_eq!(run(7), run(7));
    assert_ne!(run(7).class(1).cumulative, run(8).class(1).cumulative);
}
