//! Sparse undirected graphs with per-vertex class labels.
//!
//! Adjacency is stored in CSR form. Each undirected edge `{i, j}` appears
//! twice, once in the row of `i` and once in the row of `j`; a position in
//! the neighbor array is called a *directed slot* and identifies the ordered
//! pair `(i, j)`. Per-class flow and domination matrices of the dynamical
//! systems are plain vectors indexed by directed slot.

mod generators;
mod knn;

use std::collections::VecDeque;
use std::ops::Range;

use rayon::prelude::*;

use crate::error::{LcuError, Result};

pub use generators::{
    gen_class_network, gen_class_network_with_budget, gen_torus_knot, gen_two_gaussians,
    random_connected_graph, reveal_labels, torus_knot_point, DEFAULT_RETRY_BUDGET,
};
pub use knn::{build_knn_graph, build_knn_graph_auto};

/// Label value of an unlabeled vertex.
pub const UNLABELED: usize = 0;

/// Simple undirected graph in CSR form, with labels in `0..=num_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    /// Slot of `(j, i)` for the slot of `(i, j)`.
    reverse: Vec<usize>,
    /// Undirected edge id of every slot.
    edge_ids: Vec<usize>,
    /// Undirected edges `(i, j)` with `i < j`, sorted.
    edges: Vec<(usize, usize)>,
    labels: Vec<usize>,
    num_classes: usize,
}

impl Graph {
    /// Builds an unlabeled graph on `num_vertices` vertices.
    ///
    /// Duplicate edges (in either orientation) collapse into one; self-loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges<I>(num_vertices: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs = Vec::new();
        for (i, j) in edges {
            if i == j {
                return Err(LcuError::SelfLoop { vertex: i });
            }
            if i >= num_vertices || j >= num_vertices {
                return Err(LcuError::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for {num_vertices} vertices"
                )));
            }
            pairs.push((i, j));
            pairs.push((j, i));
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; num_vertices + 1];
        for &(i, _) in &pairs {
            offsets[i + 1] += 1;
        }
        for i in 0..num_vertices {
            offsets[i + 1] += offsets[i];
        }
        let neighbors: Vec<usize> = pairs.iter().map(|&(_, j)| j).collect();

        let mut reverse = vec![0usize; neighbors.len()];
        let mut edge_ids = vec![0usize; neighbors.len()];
        let mut undirected = Vec::with_capacity(neighbors.len() / 2);
        for i in 0..num_vertices {
            for slot in offsets[i]..offsets[i + 1] {
                let j = neighbors[slot];
                let row = &neighbors[offsets[j]..offsets[j + 1]];
                let back = offsets[j] + row.binary_search(&i).expect("adjacency is symmetric");
                reverse[slot] = back;
                if i < j {
                    edge_ids[slot] = undirected.len();
                    edge_ids[back] = undirected.len();
                    undirected.push((i, j));
                }
            }
        }

        Ok(Graph {
            offsets,
            neighbors,
            reverse,
            edge_ids,
            edges: undirected,
            labels: vec![UNLABELED; num_vertices],
            num_classes: 0,
        })
    }

    /// Attaches labels; every label must lie in `0..=num_classes`.
    pub fn with_labels(mut self, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if labels.len() != self.num_vertices() {
            return Err(LcuError::InvalidParameter(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.num_vertices()
            )));
        }
        if let Some((v, &l)) = labels.iter().enumerate().find(|(_, &l)| l > num_classes) {
            return Err(LcuError::InvalidParameter(format!(
                "vertex {v} has label {l} outside 0..={num_classes}"
            )));
        }
        self.labels = labels;
        self.num_classes = num_classes;
        Ok(self)
    }

    /// Copy of this graph carrying a different labeling.
    pub fn relabeled(&self, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        self.clone().with_labels(labels, num_classes)
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of directed slots, `2 |E|`.
    pub fn num_slots(&self) -> usize {
        self.neighbors.len()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.num_vertices()).map(|i| self.degree(i)).collect()
    }

    /// Sorted neighbor list of `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Directed slots of row `i`.
    pub fn slots(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Head vertex `j` of slot `(i, j)`.
    pub fn target(&self, slot: usize) -> usize {
        self.neighbors[slot]
    }

    pub fn reverse_slot(&self, slot: usize) -> usize {
        self.reverse[slot]
    }

    pub fn edge_id(&self, slot: usize) -> usize {
        self.edge_ids[slot]
    }

    /// Slot of `(i, j)`, if the edge exists.
    pub fn slot(&self, i: usize, j: usize) -> Option<usize> {
        self.neighbors(i)
            .binary_search(&j)
            .ok()
            .map(|k| self.offsets[i] + k)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.slot(i, j).is_some()
    }

    /// Undirected edges `(i, j)`, `i < j`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// True when `j` absorbs particles of `class` (labeled with another class).
    pub fn is_rival_sink(&self, j: usize, class: usize) -> bool {
        let l = self.labels[j];
        l != UNLABELED && l != class
    }

    /// Vertices labeled with `class`.
    pub fn sources(&self, class: usize) -> Vec<usize> {
        (0..self.num_vertices())
            .filter(|&i| self.labels[i] == class)
            .collect()
    }

    /// Number of connected components.
    pub fn num_components(&self) -> usize {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        let mut components = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() == 1
    }

    /// Hop distances from `source`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_vertices()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Checks every invariant the dynamical systems rely on.
    pub fn validate(&self) -> Result<()> {
        validate_graph(self)
    }
}

/// Ok iff the graph is simple, symmetric, connected and has at least one
/// labeled vertex per class. Reports the first violation found.
pub fn validate_graph(g: &Graph) -> Result<()> {
    let n = g.num_vertices();
    if n < 2 {
        return Err(LcuError::InvalidGraph(format!(
            "need at least two vertices, got {n}"
        )));
    }
    for i in 0..n {
        let row = g.neighbors(i);
        if row.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LcuError::InvalidGraph(format!(
                "neighbor list of {i} is not strictly increasing"
            )));
        }
        if row.contains(&i) {
            return Err(LcuError::SelfLoop { vertex: i });
        }
        for slot in g.slots(i) {
            let back = g.reverse_slot(slot);
            if g.target(back) != i || g.target(slot) >= n {
                return Err(LcuError::InvalidGraph(format!(
                    "adjacency not symmetric at ({i}, {})",
                    g.target(slot)
                )));
            }
        }
    }
    let components = g.num_components();
    if components != 1 {
        return Err(LcuError::Disconnected { components });
    }
    if g.num_classes() == 0 {
        return Err(LcuError::InvalidGraph("no classes declared".into()));
    }
    let mut present = vec![false; g.num_classes() + 1];
    for &l in g.labels() {
        present[l] = true;
    }
    let missing: Vec<usize> = (1..=g.num_classes()).filter(|&c| !present[c]).collect();
    if !missing.is_empty() {
        return Err(LcuError::MissingClasses(missing));
    }
    Ok(())
}

/// Exact hop diameter by breadth-first search from every vertex.
pub fn diameter(g: &Graph) -> Result<usize> {
    let components = g.num_components();
    if components != 1 {
        return Err(LcuError::Disconnected { components });
    }
    Ok((0..g.num_vertices())
        .into_par_iter()
        .map(|s| g.bfs_distances(s).into_iter().max().unwrap_or(0))
        .max()
        .unwrap_or(0))
}

/// Double-sweep lower bound on the diameter; exact on trees.
pub fn diameter_lower_bound(g: &Graph) -> Result<usize> {
    let components = g.num_components();
    if components != 1 {
        return Err(LcuError::Disconnected { components });
    }
    if g.num_vertices() == 0 {
        return Ok(0);
    }
    let first = g.bfs_distances(0);
    let far = argmax(&first);
    Ok(g.bfs_distances(far).into_iter().max().unwrap_or(0))
}

fn argmax(values: &[usize]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Feature vectors with optional labels (0 = unlabeled).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    values: Vec<f64>,
    labels: Vec<usize>,
}

impl Dataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(LcuError::InvalidParameter(format!(
                "{} points but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 && !rows.is_empty() {
            return Err(LcuError::InvalidParameter("points have dimension 0".into()));
        }
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(LcuError::InvalidParameter(format!(
                    "point {r} has dimension {} instead of {dim}",
                    row.len()
                )));
            }
            values.extend(row);
        }
        Ok(Dataset {
            dim,
            values,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Largest label present.
    pub fn num_classes(&self) -> usize {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(LcuError::InvalidParameter(format!(
                "{} labels for {} points",
                labels.len(),
                self.len()
            )));
        }
        self.labels = labels;
        Ok(self)
    }
}
