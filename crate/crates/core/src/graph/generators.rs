//! Synthetic networks and datasets used by the experiments.

use std::collections::HashSet;
use std::f64::consts::TAU;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{Dataset, Graph};
use crate::error::{LcuError, Result};
use crate::rng;

pub const DEFAULT_RETRY_BUDGET: usize = 100;

/// Class-assortative network `G(y, m, p)` with the default retry budget.
pub fn gen_class_network(y: &[usize], m: usize, p: f64, seed: u64) -> Result<Graph> {
    gen_class_network_with_budget(y, m, p, seed, DEFAULT_RETRY_BUDGET)
}

/// Class-assortative network `G(y, m, p)`.
///
/// Vertex `i` draws `m` targets with replacement, each `j != i` weighted by
/// `w(i, j) * (deg(j) + 1)` where `w = 1 - p` within a class and `p` across
/// classes; degrees are those before `i` draws. Repeated draws collapse into a
/// single edge. Disconnected draws are discarded and regenerated until
/// `budget` attempts are used up. The returned graph carries `y` as labels.
pub fn gen_class_network_with_budget(
    y: &[usize],
    m: usize,
    p: f64,
    seed: u64,
    budget: usize,
) -> Result<Graph> {
    let n = y.len();
    if n < 2 {
        return Err(LcuError::InvalidParameter("need at least two vertices".into()));
    }
    if m == 0 {
        return Err(LcuError::InvalidParameter("m must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(LcuError::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    let num_classes = y.iter().copied().max().unwrap_or(0);
    let mut present = vec![false; num_classes + 1];
    for &c in y {
        present[c] = true;
    }
    if present[0] || present.iter().skip(1).any(|&seen| !seen) {
        return Err(LcuError::InvalidParameter(
            "labels must cover every class 1..=C and contain no zeros".into(),
        ));
    }
    if p == 0.0 && num_classes > 1 {
        return Err(LcuError::GenerationFailed(
            "p = 0 never links different classes".into(),
        ));
    }

    let mut rng = rng::stream(seed, 0);
    for _ in 0..budget {
        let mut degree = vec![0usize; n];
        let mut edges = HashSet::new();
        let mut cumulative = vec![0.0f64; n];
        for i in 0..n {
            let mut total = 0.0;
            for j in 0..n {
                if j != i {
                    let w = if y[i] == y[j] { 1.0 - p } else { p };
                    total += w * (degree[j] + 1) as f64;
                }
                cumulative[j] = total;
            }
            if total <= 0.0 {
                return Err(LcuError::GenerationFailed(format!(
                    "vertex {i} has no admissible target"
                )));
            }
            let mut added = Vec::with_capacity(m);
            for _ in 0..m {
                let u = rng.random::<f64>() * total;
                let mut j = cumulative.partition_point(|&c| c <= u);
                if j == n {
                    // u rounded up to the total: take the last positive-weight target.
                    j = cumulative.partition_point(|&c| c < total);
                }
                let key = (i.min(j), i.max(j));
                if edges.insert(key) {
                    added.push(j);
                }
            }
            for j in added {
                degree[i] += 1;
                degree[j] += 1;
            }
        }
        let mut list: Vec<_> = edges.into_iter().collect();
        list.sort_unstable();
        let g = Graph::from_edges(n, list)?.with_labels(y.to_vec(), num_classes)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(LcuError::GenerationFailed(format!(
        "no connected network after {budget} attempts"
    )))
}

/// Point on the torus knot `r(t) (cos 3t, sin 3t)`, `z = -sin 4t`, `r = 2 + cos 4t`.
pub fn torus_knot_point(theta: f64) -> [f64; 3] {
    let r = 2.0 + (4.0 * theta).cos();
    [
        r * (3.0 * theta).cos(),
        r * (3.0 * theta).sin(),
        -(4.0 * theta).sin(),
    ]
}

/// Samples along the torus knot, split into `num_classes` contiguous arcs.
///
/// Angles are uniform on `[0, 2pi)`. The arcs start at a random angle and
/// hold `floor(n / C)` or `ceil(n / C)` consecutive samples each. Gaussian
/// noise with standard deviation `sigma` is added to every coordinate.
pub fn gen_torus_knot(n: usize, num_classes: usize, sigma: f64, seed: u64) -> Result<Dataset> {
    if !(2..=10).contains(&num_classes) {
        return Err(LcuError::InvalidParameter(format!(
            "torus knot supports 2..=10 classes, got {num_classes}"
        )));
    }
    if n < num_classes {
        return Err(LcuError::InvalidParameter(format!(
            "{n} samples cannot cover {num_classes} classes"
        )));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(LcuError::InvalidParameter(format!("sigma = {sigma}")));
    }
    let mut rng = rng::stream(seed, 0);
    let theta: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
    let start = rng.random::<f64>() * TAU;

    let mut order: Vec<usize> = (0..n).collect();
    let shifted = |i: usize| (theta[i] - start).rem_euclid(TAU);
    order.sort_by(|&a, &b| shifted(a).total_cmp(&shifted(b)).then(a.cmp(&b)));
    let mut labels = vec![0usize; n];
    let (base, extra) = (n / num_classes, n % num_classes);
    let mut pos = 0;
    for class in 1..=num_classes {
        let size = base + usize::from(class <= extra);
        for &i in &order[pos..pos + size] {
            labels[i] = class;
        }
        pos += size;
    }

    let noise = Normal::new(0.0, sigma).map_err(|e| LcuError::InvalidParameter(e.to_string()))?;
    let rows = theta
        .iter()
        .map(|&t| {
            let mut p = torus_knot_point(t);
            if sigma > 0.0 {
                for x in &mut p {
                    *x += noise.sample(&mut rng);
                }
            }
            p.to_vec()
        })
        .collect();
    Dataset::new(rows, labels)
}

/// Two isotropic 2-D Gaussian blobs centred at `(-separation / 2, 0)` and
/// `(separation / 2, 0)`, labeled 1 and 2.
pub fn gen_two_gaussians(
    per_class: usize,
    separation: f64,
    sigma: f64,
    seed: u64,
) -> Result<Dataset> {
    let noise = Normal::new(0.0, sigma).map_err(|e| LcuError::InvalidParameter(e.to_string()))?;
    let mut rng = rng::stream(seed, 0);
    let mut rows = Vec::with_capacity(2 * per_class);
    let mut labels = Vec::with_capacity(2 * per_class);
    for (class, cx) in [(1, -separation / 2.0), (2, separation / 2.0)] {
        for _ in 0..per_class {
            rows.push(vec![cx + noise.sample(&mut rng), noise.sample(&mut rng)]);
            labels.push(class);
        }
    }
    Dataset::new(rows, labels)
}

/// Connected unlabeled graph with exactly `num_edges` edges: a random
/// recursive tree plus uniformly drawn extra edges.
pub fn random_connected_graph(num_vertices: usize, num_edges: usize, seed: u64) -> Result<Graph> {
    let n = num_vertices;
    let max_edges = n * n.saturating_sub(1) / 2;
    if n < 2 || num_edges + 1 < n || num_edges > max_edges {
        return Err(LcuError::InvalidParameter(format!(
            "cannot build a connected simple graph with {n} vertices and {num_edges} edges"
        )));
    }
    let mut rng = rng::stream(seed, 0);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut edges = HashSet::with_capacity(num_edges);
    for v in 1..n {
        let u = rng.random_range(0..v);
        let (a, b) = (perm[u], perm[v]);
        edges.insert((a.min(b), a.max(b)));
    }
    while edges.len() < num_edges {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let mut list: Vec<_> = edges.into_iter().collect();
    list.sort_unstable();
    Graph::from_edges(n, list)
}

/// Hides all but a random `fraction` of the labels in `truth`.
///
/// At least one vertex of every class stays labeled. Returns the observed
/// label vector, with 0 for hidden labels.
pub fn reveal_labels(truth: &[usize], num_classes: usize, fraction: f64, seed: u64) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(LcuError::InvalidParameter(format!("fraction = {fraction}")));
    }
    let n = truth.len();
    let mut rng = rng::stream(seed, 1);
    let mut observed = vec![0usize; n];
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); num_classes + 1];
    for (i, &c) in truth.iter().enumerate() {
        if c > num_classes {
            return Err(LcuError::InvalidParameter(format!("label {c} at {i}")));
        }
        by_class[c].push(i);
    }
    let mut revealed = 0;
    for (c, members) in by_class.iter().enumerate().skip(1) {
        let Some(&i) = members.choose(&mut rng) else {
            return Err(LcuError::MissingClasses(vec![c]));
        };
        observed[i] = c;
        revealed += 1;
    }
    let target = ((fraction * n as f64).round() as usize).max(revealed);
    let mut rest: Vec<usize> = (0..n)
        .filter(|&i| observed[i] == 0 && truth[i] != 0)
        .collect();
    rest.shuffle(&mut rng);
    for &i in rest.iter().take(target - revealed) {
        observed[i] = truth[i];
    }
    Ok(observed)
}
