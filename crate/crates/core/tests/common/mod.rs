//! Shared test helpers: a dense-matrix reference implementation of one
//! iteration of the deterministic system, and enumeration of small labeled
//! graphs.

#![allow(dead_code)]

use std::collections::HashSet;

use lcu::{Graph, SystemState};

/// Dense state: `pop[c][i]`, `flow[c][i][j]`, `dom[c][i][j]`, class index `c - 1`.
#[derive(Debug, Clone)]
pub struct DenseState {
    pub pop: Vec<Vec<f64>>,
    pub flow: Vec<Vec<Vec<f64>>>,
    pub dom: Vec<Vec<Vec<f64>>>,
    pub initial: Vec<f64>,
}

pub struct DenseGraph {
    pub n: usize,
    pub adj: Vec<Vec<bool>>,
    pub labels: Vec<usize>,
    pub classes: usize,
}

impl DenseGraph {
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.num_vertices();
        let mut adj = vec![vec![false; n]; n];
        for &(i, j) in g.edges() {
            adj[i][j] = true;
            adj[j][i] = true;
        }
        DenseGraph { n, adj, labels: g.labels().to_vec(), classes: g.num_classes() }
    }

    fn degree(&self, i: usize) -> f64 {
        self.adj[i].iter().filter(|&&a| a).count() as f64
    }
}

pub fn dense_from_state(g: &Graph, s: &SystemState) -> DenseState {
    let n = g.num_vertices();
    let mut out = DenseState {
        pop: vec![],
        flow: vec![],
        dom: vec![],
        initial: vec![],
    };
    for c in &s.classes {
        let mut flow = vec![vec![0.0; n]; n];
        let mut dom = vec![vec![0.0; n]; n];
        for i in 0..n {
            for slot in g.slots(i) {
                let j = g.target(slot);
                flow[i][j] = c.flow[slot];
                dom[i][j] = c.domination[slot];
            }
        }
        out.pop.push(c.population.clone());
        out.flow.push(flow);
        out.dom.push(dom);
        out.initial.push(c.initial_total);
    }
    out
}

/// `1 - (own flow over {i, j}) / (all flow over {i, j})`, or `1 - 1/C` without flow.
pub fn dense_sigma(g: &DenseGraph, s: &DenseState, c: usize, i: usize, j: usize) -> f64 {
    let total: f64 = (0..g.classes).map(|q| s.flow[q][i][j] + s.flow[q][j][i]).sum();
    if total == 0.0 {
        1.0 - 1.0 / g.classes as f64
    } else {
        1.0 - (s.flow[c][i][j] + s.flow[c][j][i]) / total
    }
}

pub fn dense_transition(g: &DenseGraph, s: &DenseState, c: usize, lambda: f64) -> Vec<Vec<f64>> {
    let class = c + 1;
    let mut p = vec![vec![0.0; g.n]; g.n];
    for i in 0..g.n {
        for j in 0..g.n {
            if !g.adj[i][j] || (g.labels[j] != 0 && g.labels[j] != class) {
                continue;
            }
            p[i][j] = (1.0 - lambda * dense_sigma(g, s, c, i, j)) / g.degree(i);
        }
    }
    p
}

pub fn dense_generation(g: &DenseGraph, s: &DenseState, c: usize) -> Vec<f64> {
    let class = c + 1;
    let source_degree: f64 = (0..g.n).filter(|&i| g.labels[i] == class).map(|i| g.degree(i)).sum();
    let total: f64 = s.pop[c].iter().sum();
    let deficit = (s.initial[c] - total).max(0.0);
    (0..g.n)
        .map(|i| {
            if g.labels[i] == class {
                g.degree(i) / source_degree * deficit
            } else {
                0.0
            }
        })
        .collect()
}

/// One synchronous iteration by explicit matrix products.
pub fn dense_step(g: &DenseGraph, s: &DenseState, lambda: f64) -> DenseState {
    let mut next = s.clone();
    for c in 0..g.classes {
        let p = dense_transition(g, s, c, lambda);
        let gen = dense_generation(g, s, c);
        for i in 0..g.n {
            for j in 0..g.n {
                next.flow[c][i][j] = s.pop[c][i] * p[i][j];
                next.dom[c][i][j] = s.dom[c][i][j] + next.flow[c][i][j];
            }
        }
        for j in 0..g.n {
            next.pop[c][j] = (0..g.n).map(|i| s.pop[c][i] * p[i][j]).sum::<f64>() + gen[j];
        }
    }
    next
}

/// Largest absolute difference scaled by `max(1, |reference|)`.
pub fn dense_distance(a: &DenseState, b: &DenseState) -> f64 {
    let mut worst: f64 = 0.0;
    let mut cmp = |x: f64, y: f64| worst = worst.max((x - y).abs() / y.abs().max(1.0));
    for c in 0..a.pop.len() {
        for (x, y) in a.pop[c].iter().zip(&b.pop[c]) {
            cmp(*x, *y);
        }
        for i in 0..a.flow[c].len() {
            for j in 0..a.flow[c].len() {
                cmp(a.flow[c][i][j], b.flow[c][i][j]);
                cmp(a.dom[c][i][j], b.dom[c][i][j]);
            }
        }
    }
    worst
}

/// Every vertex pair of an `n`-vertex graph, in a fixed order.
fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut parts = n;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            parts -= 1;
        }
    }
    parts == 1
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// A labeled graph on at most 5 vertices.
#[derive(Debug, Clone)]
pub struct SmallGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub labels: Vec<usize>,
}

impl SmallGraph {
    pub fn to_graph(&self, classes: usize) -> Graph {
        Graph::from_edges(self.n, self.edges.iter().copied())
            .unwrap()
            .with_labels(self.labels.clone(), classes)
            .unwrap()
    }
}

/// All connected graphs on `2..=max_n` vertices with labels in `0..=classes`
/// using every class at least once. With `orbits`, only one representative
/// per isomorphism class (vertex relabelings preserving edges and labels).
pub fn enumerate_labeled(max_n: usize, classes: usize, orbits: bool) -> Vec<SmallGraph> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        let all_pairs = pairs(n);
        let perms = permutations(n);
        let mut seen = HashSet::new();
        for mask in 0u32..(1 << all_pairs.len()) {
            let edges: Vec<(usize, usize)> = all_pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            if !connected(n, &edges) {
                continue;
            }
            let labelings = (classes as u32 + 1).pow(n as u32);
            for code in 0..labelings {
                let mut labels = Vec::with_capacity(n);
                let mut x = code;
                for _ in 0..n {
                    labels.push((x % (classes as u32 + 1)) as usize);
                    x /= classes as u32 + 1;
                }
                if (1..=classes).any(|c| !labels.contains(&c)) {
                    continue;
                }
                if orbits {
                    let key = perms
                        .iter()
                        .map(|p| canonical_key(&all_pairs, &edges, &labels, p, classes))
                        .min()
                        .unwrap();
                    if !seen.insert(key) {
                        continue;
                    }
                }
                out.push(SmallGraph { n, edges: edges.clone(), labels });
            }
        }
    }
    out
}

fn canonical_key(
    all_pairs: &[(usize, usize)],
    edges: &[(usize, usize)],
    labels: &[usize],
    perm: &[usize],
    classes: usize,
) -> (u32, u32) {
    let mut mask = 0u32;
    for &(a, b) in edges {
        let (x, y) = (perm[a].min(perm[b]), perm[a].max(perm[b]));
        let k = all_pairs.iter().position(|&e| e == (x, y)).unwrap();
        mask |= 1 << k;
    }
    let mut permuted = vec![0; labels.len()];
    for (v, &l) in labels.iter().enumerate() {
        permuted[perm[v]] = l;
    }
    let code = permuted.iter().rev().fold(0u32, |acc, &l| acc * (classes as u32 + 1) + l as u32);
    (mask, code)
}

/// Agreement between the stochastic ensemble mean and the deterministic
/// trajectory started from the same integer populations.
#[derive(Debug, Clone, Default)]
pub struct EnsembleComparison {
    /// Per iteration `t = 1..`: (comparisons, |z| > 3, max |z|).
    pub by_step: Vec<(usize, usize, f64)>,
    /// Zero-variance quantities whose deterministic value differs from the mean.
    pub degenerate_mismatches: usize,
}

/// Runs `runs` stochastic trajectories of `steps` iterations with
/// `particles` per class and compares every vertex population, flow and
/// cumulative domination with the deterministic system.
pub fn compare_ensemble(g: &Graph, lambda: f64, particles: u64, runs: usize, steps: usize, seed: u64) -> EnsembleComparison {
    use lcu::deterministic::{run_with, InitScheme, SystemParams};
    use lcu::stochastic::{init_particles, stoch_step};

    let initial = init_particles(g, particles).unwrap();
    let custom = initial
        .classes
        .iter()
        .map(|c| c.counts.iter().map(|&x| x as f64).collect())
        .collect();
    let params = SystemParams::new(lambda, steps).with_init(InitScheme::Custom(custom));
    let mut det: Vec<Vec<f64>> = Vec::new();
    // Cumulative domination equals the flow after one iteration, so it is
    // compared from the second iteration on.
    run_with(g, &params, |s| {
        let mut v = Vec::new();
        for c in &s.classes {
            v.extend(&c.population);
            v.extend(&c.flow);
            if s.t > 1 {
                v.extend(&c.domination);
            }
        }
        det.push(v);
    })
    .unwrap();

    let mut sum: Vec<Vec<f64>> = det.iter().map(|v| vec![0.0; v.len()]).collect();
    let mut sq = sum.clone();
    let mut rng = lcu::rng::stream(seed, 0);
    let mut ens = initial.clone();
    for _ in 0..runs {
        ens.clone_from(&initial);
        for t in 0..steps {
            stoch_step(g, &mut ens, lambda, &mut rng);
            let mut k = 0;
            for c in &ens.classes {
                let dom: &[u64] = if t == 0 { &[] } else { &c.cumulative };
                for &x in c.counts.iter().chain(&c.flow).chain(dom) {
                    let x = x as f64;
                    sum[t][k] += x;
                    sq[t][k] += x * x;
                    k += 1;
                }
            }
        }
    }

    let r = runs as f64;
    let mut out = EnsembleComparison::default();
    for t in 0..steps {
        let (mut count, mut exceed, mut max_z) = (0, 0, 0.0f64);
        for k in 0..det[t].len() {
            let mean = sum[t][k] / r;
            let var = ((sq[t][k] - r * mean * mean) / (r - 1.0)).max(0.0);
            let se = (var / r).sqrt();
            let diff = mean - det[t][k];
            if se == 0.0 {
                if diff.abs() > 1e-9 * det[t][k].abs().max(1.0) {
                    out.degenerate_mismatches += 1;
                }
                continue;
            }
            let z = diff / se;
            count += 1;
            if z.abs() > 3.0 {
                exceed += 1;
            }
            max_z = max_z.max(z.abs());
        }
        out.by_step.push((count, exceed, max_z));
    }
    out
}
