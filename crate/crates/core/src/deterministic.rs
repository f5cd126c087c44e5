//! Deterministic (mean-field) particle competition system.
//!
//! For every class `c` the state holds the population `n_c` over vertices,
//! the flow `N_c` of the last iteration over directed slots, and the
//! cumulative domination `D_c`, the running sum of all flows. One iteration
//! computes, from the flows of all classes at time `t`,
//!
//! ```text
//! N_c(t+1) = diag(n_c(t)) P_c
//! n_c(t+1) = n_c(t) P_c + g_c
//! D_c(t+1) = D_c(t) + N_c(t+1)
//! ```
//!
//! where `P_c[i, j]` is zero when `j` is labeled with another class and
//! `(1 - lambda * sigma_c(i, j)) / deg(i)` otherwise, `sigma_c(i, j)` is the
//! share of the last iteration's flow over `{i, j}` (both directions) that
//! belongs to rival classes (`1 - 1/C` on edges without flow), and `g_c`
//! redistributes the population lost so far over the sources of `c` in
//! proportion to their degree.
//!
//! Per iteration the work is `O(C (|V| + |E|))`. Every reduction runs in a
//! fixed order, so results are bit-identical regardless of thread count.

use rayon::prelude::*;

use crate::error::{LcuError, Result};
use crate::graph::{validate_graph, Graph};
use crate::unfolding::unfold;

/// Flows below this fraction of the class's initial population are set to
/// zero. Keeps every state component in the normal floating-point range,
/// where relative precision does not depend on the population scale.
pub const FLOW_FLOOR: f64 = 1e-250;

/// Initial population of every class.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitScheme {
    /// `n_c(0)[i] = deg(i)` for every vertex and class.
    #[default]
    DegreeAllClasses,
    /// `n_c(0)[i] = deg(i)` on the sources of `c`, zero elsewhere.
    DegreeSourcesOnly,
    /// One nonnegative vector per class (class 1 first).
    Custom(Vec<Vec<f64>>),
}

/// How classes are advanced within one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateOrder {
    /// Every class reads the flows of time `t`.
    #[default]
    Synchronous,
    /// Class `c` reads the already advanced flows of classes `< c`.
    Sequential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Competition level in `[0, 1]`.
    pub lambda: f64,
    /// Number of iterations.
    pub tau: usize,
    pub init: InitScheme,
    pub order: UpdateOrder,
    /// Stop once the unfolding has not changed for this many iterations.
    pub stop_when_stable: Option<usize>,
}

impl SystemParams {
    pub fn new(lambda: f64, tau: usize) -> Self {
        SystemParams {
            lambda,
            tau,
            init: InitScheme::default(),
            order: UpdateOrder::default(),
            stop_when_stable: None,
        }
    }

    pub fn with_init(mut self, init: InitScheme) -> Self {
        self.init = init;
        self
    }

    pub fn with_order(mut self, order: UpdateOrder) -> Self {
        self.order = order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(LcuError::InvalidParameter(format!(
                "lambda = {} outside [0, 1]",
                self.lambda
            )));
        }
        if self.stop_when_stable == Some(0) {
            return Err(LcuError::InvalidParameter(
                "stability window must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// State of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassState {
    /// Population per vertex.
    pub population: Vec<f64>,
    /// Flow of the last iteration per directed slot.
    pub flow: Vec<f64>,
    /// Cumulative domination per directed slot.
    pub domination: Vec<f64>,
    /// Total population at `t = 0`.
    pub initial_total: f64,
}

impl ClassState {
    pub fn total_population(&self) -> f64 {
        self.population.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub t: usize,
    /// Index `c - 1` holds class `c`.
    pub classes: Vec<ClassState>,
}

impl SystemState {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// State of class `c` (1-based).
    pub fn class(&self, c: usize) -> &ClassState {
        &self.classes[c - 1]
    }
}

/// Per-edge flow totals of every class at one instant, from which the
/// subordination and survival factors are derived.
pub(crate) struct EdgeShares {
    num_classes: usize,
    /// `pair[e * C + q]`: flow of class `q` over edge `e`, both directions.
    pair: Vec<f64>,
    total: Vec<f64>,
}

impl EdgeShares {
    /// `flow(q, slot)` is the flow of class index `q` through `slot`.
    pub(crate) fn new(g: &Graph, num_classes: usize, flow: impl Fn(usize, usize) -> f64) -> Self {
        let m = g.num_edges();
        let mut pair = vec![0.0; m * num_classes];
        let mut total = vec![0.0; m];
        for i in 0..g.num_vertices() {
            for slot in g.slots(i) {
                if g.target(slot) < i {
                    continue;
                }
                let e = g.edge_id(slot);
                let back = g.reverse_slot(slot);
                let mut s = 0.0;
                for q in 0..num_classes {
                    let v = flow(q, slot) + flow(q, back);
                    pair[e * num_classes + q] = v;
                    s += v;
                }
                total[e] = s;
            }
        }
        EdgeShares {
            num_classes,
            pair,
            total,
        }
    }

    pub(crate) fn from_state(g: &Graph, state: &SystemState) -> Self {
        Self::new(g, state.num_classes(), |q, slot| state.classes[q].flow[slot])
    }

    fn rival(&self, e: usize, q: usize) -> f64 {
        let row = &self.pair[e * self.num_classes..(e + 1) * self.num_classes];
        row.iter()
            .enumerate()
            .filter(|&(r, _)| r != q)
            .map(|(_, v)| v)
            .sum()
    }

    /// Rival share of the flow over edge `e`, for class index `q`.
    pub(crate) fn subordination(&self, e: usize, q: usize) -> f64 {
        if self.total[e] > 0.0 {
            self.rival(e, q) / self.total[e]
        } else {
            1.0 - 1.0 / self.num_classes as f64
        }
    }

    /// `1 - lambda * subordination`, evaluated without cancellation.
    pub(crate) fn survival(&self, e: usize, q: usize, lambda: f64) -> f64 {
        let s = self.total[e];
        if s > 0.0 {
            let own = self.pair[e * self.num_classes + q];
            (own + (1.0 - lambda) * self.rival(e, q)) / s
        } else {
            1.0 - lambda * (1.0 - 1.0 / self.num_classes as f64)
        }
    }
}

/// Generation share of every source of `class`: `deg(i) / sum of source degrees`.
pub(crate) fn source_weights(g: &Graph, class: usize) -> Vec<(usize, f64)> {
    let sources = g.sources(class);
    let total: usize = sources.iter().map(|&i| g.degree(i)).sum();
    sources
        .into_iter()
        .map(|i| (i, g.degree(i) as f64 / total as f64))
        .collect()
}

/// Initial state: populations per `params.init`, zero flow and domination.
pub fn init_state(g: &Graph, params: &SystemParams) -> Result<SystemState> {
    validate_graph(g)?;
    params.validate()?;
    let n = g.num_vertices();
    let c_count = g.num_classes();
    let populations: Vec<Vec<f64>> = match &params.init {
        InitScheme::DegreeAllClasses => {
            let deg: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
            vec![deg; c_count]
        }
        InitScheme::DegreeSourcesOnly => (1..=c_count)
            .map(|c| {
                (0..n)
                    .map(|i| if g.label(i) == c { g.degree(i) as f64 } else { 0.0 })
                    .collect()
            })
            .collect(),
        InitScheme::Custom(vectors) => {
            if vectors.len() != c_count {
                return Err(LcuError::InvalidParameter(format!(
                    "{} initial vectors for {c_count} classes",
                    vectors.len()
                )));
            }
            for (q, v) in vectors.iter().enumerate() {
                if v.len() != n {
                    return Err(LcuError::InvalidParameter(format!(
                        "initial vector of class {} has length {}, expected {n}",
                        q + 1,
                        v.len()
                    )));
                }
                if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return Err(LcuError::InvalidParameter(format!(
                        "initial vector of class {} has negative or non-finite entries",
                        q + 1
                    )));
                }
                if v.iter().sum::<f64>() <= 0.0 {
                    return Err(LcuError::InvalidParameter(format!(
                        "initial vector of class {} has zero total",
                        q + 1
                    )));
                }
            }
            vectors.clone()
        }
    };
    let slots = g.num_slots();
    let classes = populations
        .into_iter()
        .map(|population| ClassState {
            initial_total: population.iter().sum(),
            population,
            flow: vec![0.0; slots],
            domination: vec![0.0; slots],
        })
        .collect();
    Ok(SystemState { t: 0, classes })
}

/// Rival share `sigma_c(i, j)` of the current flow over edge `{i, j}`.
pub fn subordination(g: &Graph, state: &SystemState, c: usize, i: usize, j: usize) -> Result<f64> {
    check_class(state, c)?;
    let slot = g
        .slot(i, j)
        .ok_or_else(|| LcuError::InvalidParameter(format!("no edge between {i} and {j}")))?;
    Ok(EdgeShares::from_state(g, state).subordination(g.edge_id(slot), c - 1))
}

/// Subordination of every class on every edge: `out[c - 1][edge id]`.
pub fn edge_subordination(g: &Graph, state: &SystemState) -> Vec<Vec<f64>> {
    let shares = EdgeShares::from_state(g, state);
    (0..state.num_classes())
        .map(|q| (0..g.num_edges()).map(|e| shares.subordination(e, q)).collect())
        .collect()
}

/// Transition matrix `P_c` of the current state, one entry per directed slot.
pub fn transition_matrix(g: &Graph, state: &SystemState, c: usize, lambda: f64) -> Result<Vec<f64>> {
    check_class(state, c)?;
    let shares = EdgeShares::from_state(g, state);
    let mut p = vec![0.0; g.num_slots()];
    for i in 0..g.num_vertices() {
        let deg = g.degree(i) as f64;
        for slot in g.slots(i) {
            let j = g.target(slot);
            if !g.is_rival_sink(j, c) {
                p[slot] = shares.survival(g.edge_id(slot), c - 1, lambda) / deg;
            }
        }
    }
    Ok(p)
}

/// Particles generated for class `c` in the next iteration, per vertex.
pub fn generation_vector(g: &Graph, state: &SystemState, c: usize) -> Result<Vec<f64>> {
    check_class(state, c)?;
    let cls = state.class(c);
    let deficit = (cls.initial_total - cls.total_population()).max(0.0);
    let mut out = vec![0.0; g.num_vertices()];
    for (i, rho) in source_weights(g, c) {
        out[i] = rho * deficit;
    }
    Ok(out)
}

fn check_class(state: &SystemState, c: usize) -> Result<()> {
    if c == 0 || c > state.num_classes() {
        return Err(LcuError::InvalidParameter(format!(
            "class {c} outside 1..={}",
            state.num_classes()
        )));
    }
    Ok(())
}

/// Advances class index `q` by one iteration against `shares`.
fn advance_class(
    g: &Graph,
    cls: &mut ClassState,
    q: usize,
    shares: &EdgeShares,
    lambda: f64,
    weights: &[(usize, f64)],
) {
    let class = q + 1;
    let deficit = (cls.initial_total - cls.total_population()).max(0.0);
    let floor = FLOW_FLOOR * cls.initial_total;
    for i in 0..g.num_vertices() {
        let deg = g.degree(i) as f64;
        let n_i = cls.population[i];
        for slot in g.slots(i) {
            let j = g.target(slot);
            let f = if g.is_rival_sink(j, class) {
                0.0
            } else {
                n_i * (shares.survival(g.edge_id(slot), q, lambda) / deg)
            };
            let f = if f < floor { 0.0 } else { f };
            cls.flow[slot] = f;
            cls.domination[slot] += f;
        }
    }
    let mut next: Vec<f64> = (0..g.num_vertices())
        .map(|j| g.slots(j).map(|slot| cls.flow[g.reverse_slot(slot)]).sum())
        .collect();
    for &(i, rho) in weights {
        next[i] += rho * deficit;
    }
    cls.population = next;
}

fn step_with(g: &Graph, state: &mut SystemState, params: &SystemParams, weights: &[Vec<(usize, f64)>]) {
    match params.order {
        UpdateOrder::Synchronous => {
            let shares = EdgeShares::from_state(g, state);
            state
                .classes
                .par_iter_mut()
                .enumerate()
                .for_each(|(q, cls)| advance_class(g, cls, q, &shares, params.lambda, &weights[q]));
        }
        UpdateOrder::Sequential => {
            for q in 0..state.num_classes() {
                let shares = EdgeShares::from_state(g, state);
                advance_class(g, &mut state.classes[q], q, &shares, params.lambda, &weights[q]);
            }
        }
    }
    state.t += 1;
}

fn all_source_weights(g: &Graph, num_classes: usize) -> Vec<Vec<(usize, f64)>> {
    (1..=num_classes).map(|c| source_weights(g, c)).collect()
}

/// One iteration of the system.
pub fn step(g: &Graph, state: &SystemState, params: &SystemParams) -> SystemState {
    let mut next = state.clone();
    step_in_place(g, &mut next, params);
    next
}

/// One iteration of the system, updating `state`.
pub fn step_in_place(g: &Graph, state: &mut SystemState, params: &SystemParams) {
    let weights = all_source_weights(g, state.num_classes());
    step_with(g, state, params, &weights);
}

/// Runs `params.tau` iterations from [`init_state`].
pub fn run(g: &Graph, params: &SystemParams) -> Result<SystemState> {
    run_with(g, params, |_| {})
}

/// Like [`run`], calling `observe` after every iteration.
pub fn run_with<F>(g: &Graph, params: &SystemParams, mut observe: F) -> Result<SystemState>
where
    F: FnMut(&SystemState),
{
    let mut state = init_state(g, params)?;
    let weights = all_source_weights(g, state.num_classes());
    let mut previous: Option<Vec<usize>> = None;
    let mut unchanged = 0;
    for _ in 0..params.tau {
        step_with(g, &mut state, params, &weights);
        observe(&state);
        if let Some(window) = params.stop_when_stable {
            let owners = unfold(g, &state).owners().to_vec();
            if previous.as_ref() == Some(&owners) {
                unchanged += 1;
                if unchanged >= window {
                    break;
                }
            } else {
                unchanged = 0;
            }
            previous = Some(owners);
        }
    }
    Ok(state)
}
