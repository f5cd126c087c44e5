//! Stochastic particle competition system.
//!
//! Integer particles walk the network. In one iteration every particle of
//! class `c` at vertex `i` picks a neighbor `j` uniformly; it is absorbed if
//! `j` is labeled with another class, and otherwise survives with probability
//! `1 - lambda * xi`, where `xi` is the rival share of the flow over `{i, j}`
//! in the previous iteration. Then, if the class population at the start of
//! the iteration was below its initial total, the missing particles are
//! regenerated at the sources of the class.
//!
//! Movement is simulated per (vertex, class) as a multinomial split over the
//! neighbors followed by binomial survival thinning per edge, which is
//! distributed exactly like independent per-particle moves.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::deterministic::EdgeShares;
use crate::error::{LcuError, Result};
use crate::graph::{validate_graph, Graph};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassParticles {
    /// Active particles per vertex.
    pub counts: Vec<u64>,
    /// Surviving moves of the last iteration per directed slot.
    pub flow: Vec<u64>,
    /// Cumulative surviving moves per directed slot.
    pub cumulative: Vec<u64>,
    pub initial_total: u64,
    /// Particles that left each vertex in the last iteration and were absorbed.
    pub absorbed_last: Vec<u64>,
    /// Particles generated at each vertex in the last iteration.
    pub generated_last: Vec<u64>,
}

impl ClassParticles {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticleEnsemble {
    pub t: usize,
    /// Index `c - 1` holds class `c`.
    pub classes: Vec<ClassParticles>,
}

impl ParticleEnsemble {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, c: usize) -> &ClassParticles {
        &self.classes[c - 1]
    }

    /// Ensemble with explicit initial counts, one vector per class.
    pub fn from_counts(g: &Graph, counts: Vec<Vec<u64>>) -> Result<Self> {
        validate_graph(g)?;
        if counts.len() != g.num_classes() {
            return Err(LcuError::InvalidParameter(format!(
                "{} count vectors for {} classes",
                counts.len(),
                g.num_classes()
            )));
        }
        let n = g.num_vertices();
        let slots = g.num_slots();
        let classes = counts
            .into_iter()
            .enumerate()
            .map(|(q, counts)| {
                if counts.len() != n {
                    return Err(LcuError::InvalidParameter(format!(
                        "count vector of class {} has length {}, expected {n}",
                        q + 1,
                        counts.len()
                    )));
                }
                let initial_total: u64 = counts.iter().sum();
                if initial_total == 0 {
                    return Err(LcuError::InvalidParameter(format!(
                        "class {} starts without particles",
                        q + 1
                    )));
                }
                Ok(ClassParticles {
                    counts,
                    flow: vec![0; slots],
                    cumulative: vec![0; slots],
                    initial_total,
                    absorbed_last: vec![0; n],
                    generated_last: vec![0; n],
                })
            })
            .collect::<Result<_>>()?;
        Ok(ParticleEnsemble { t: 0, classes })
    }
}

/// Splits `total` over vertices in proportion to degree.
///
/// Largest-remainder rounding; equal remainders go to the lower index.
pub fn degree_proportional_counts(g: &Graph, total: u64) -> Vec<u64> {
    let degree_sum: u128 = (0..g.num_vertices()).map(|i| g.degree(i) as u128).sum();
    if degree_sum == 0 {
        return vec![0; g.num_vertices()];
    }
    let mut counts = Vec::with_capacity(g.num_vertices());
    let mut remainders = Vec::with_capacity(g.num_vertices());
    for i in 0..g.num_vertices() {
        let share = total as u128 * g.degree(i) as u128;
        counts.push((share / degree_sum) as u64);
        remainders.push((share % degree_sum, i));
    }
    let assigned: u64 = counts.iter().sum();
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in remainders.iter().take((total - assigned) as usize) {
        counts[i] += 1;
    }
    counts
}

/// `total_per_class` particles per class, spread over vertices in proportion
/// to degree ([`degree_proportional_counts`]).
pub fn init_particles(g: &Graph, total_per_class: u64) -> Result<ParticleEnsemble> {
    if total_per_class == 0 {
        return Err(LcuError::InvalidParameter(
            "at least one particle per class is required".into(),
        ));
    }
    let counts = degree_proportional_counts(g, total_per_class);
    ParticleEnsemble::from_counts(g, vec![counts; g.num_classes()])
}

fn binomial<R: Rng + ?Sized>(rng: &mut R, trials: u64, p: f64) -> u64 {
    if trials == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return trials;
    }
    Binomial::new(trials, p)
        .expect("probability within [0, 1]")
        .sample(rng)
}

/// One iteration of the particle system.
///
/// Random draws are consumed class by class, vertex by vertex, neighbor by
/// neighbor, then source by source; this order is part of the reproducibility
/// contract.
pub fn stoch_step<R: Rng + ?Sized>(g: &Graph, ens: &mut ParticleEnsemble, lambda: f64, rng: &mut R) {
    let shares = EdgeShares::new(g, ens.num_classes(), |q, slot| ens.classes[q].flow[slot] as f64);
    let n = g.num_vertices();
    for q in 0..ens.num_classes() {
        let class = q + 1;
        let cls = &mut ens.classes[q];
        let before = cls.total();
        let mut next = vec![0u64; n];
        cls.absorbed_last.iter_mut().for_each(|a| *a = 0);
        for i in 0..n {
            let mut remaining = cls.counts[i];
            let deg = g.degree(i) as u64;
            for (k, slot) in g.slots(i).enumerate() {
                let chosen = if k as u64 + 1 == deg {
                    remaining
                } else {
                    binomial(rng, remaining, 1.0 / (deg - k as u64) as f64)
                };
                remaining -= chosen;
                let j = g.target(slot);
                let survived = if g.is_rival_sink(j, class) {
                    0
                } else {
                    binomial(rng, chosen, shares.survival(g.edge_id(slot), q, lambda))
                };
                cls.absorbed_last[i] += chosen - survived;
                cls.flow[slot] = survived;
                cls.cumulative[slot] += survived;
                next[j] += survived;
            }
        }

        // Multinomial split of the deficit over the sources: each source's
        // count is Binomial(deficit, rho_i) and the total is exactly the deficit.
        cls.generated_last.iter_mut().for_each(|x| *x = 0);
        let mut trials = cls.initial_total.saturating_sub(before);
        let sources = g.sources(class);
        let mut degree_left: u64 = sources.iter().map(|&i| g.degree(i) as u64).sum();
        for &i in &sources {
            let d = g.degree(i) as u64;
            let born = binomial(rng, trials, d as f64 / degree_left as f64);
            trials -= born;
            degree_left -= d;
            cls.generated_last[i] = born;
            next[i] += born;
        }
        cls.counts = next;
    }
    ens.t += 1;
}

/// `tau` iterations from [`init_particles`], drawing from stream 0 of `seed`.
pub fn stoch_run(g: &Graph, total_per_class: u64, lambda: f64, tau: usize, seed: u64) -> Result<ParticleEnsemble> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(LcuError::InvalidParameter(format!("lambda = {lambda} outside [0, 1]")));
    }
    let mut ens = init_particles(g, total_per_class)?;
    let mut rng = rng::stream(seed, 0);
    for _ in 0..tau {
        stoch_step(g, &mut ens, lambda, &mut rng);
    }
    Ok(ens)
}
