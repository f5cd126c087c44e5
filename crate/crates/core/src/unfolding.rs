//! Per-class unfoldings of the network and vertex classification.
//!
//! Edge `{i, j}` belongs to the unfolding of class `c` when the symmetric
//! cumulative domination `D_c[i, j] + D_c[j, i]` strictly exceeds that of
//! every other class. Ties, including edges never visited, stay unassigned.
//!
//! An unlabeled vertex is classified by counting, per class, the edges of that
//! class's unfolding with at least one endpoint in its closed neighborhood.
//! When no class owns any such edge the neighborhood grows one BFS layer at a
//! time.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deterministic::SystemState;
use crate::graph::{Graph, UNLABELED};
use crate::stochastic::ParticleEnsemble;

/// Relative gap below which two dominations count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Anything holding per-class cumulative domination over directed slots.
pub trait CumulativeDomination {
    fn num_classes(&self) -> usize;
    /// Cumulative domination of class index `q` (class `q + 1`) through `slot`.
    fn domination(&self, q: usize, slot: usize) -> f64;
}

impl CumulativeDomination for SystemState {
    fn num_classes(&self) -> usize {
        self.classes.len()
    }

    fn domination(&self, q: usize, slot: usize) -> f64 {
        self.classes[q].domination[slot]
    }
}

impl CumulativeDomination for ParticleEnsemble {
    fn num_classes(&self) -> usize {
        self.classes.len()
    }

    fn domination(&self, q: usize, slot: usize) -> f64 {
        self.classes[q].cumulative[slot] as f64
    }
}

/// Plain per-class matrices, e.g. stochastic domination averaged over runs.
impl CumulativeDomination for Vec<Vec<f64>> {
    fn num_classes(&self) -> usize {
        self.len()
    }

    fn domination(&self, q: usize, slot: usize) -> f64 {
        self[q][slot]
    }
}

/// `D_q[i, j] + D_q[j, i]` per class index and undirected edge id.
pub fn symmetric_domination<D: CumulativeDomination + ?Sized>(g: &Graph, dom: &D) -> Vec<Vec<f64>> {
    (0..dom.num_classes())
        .map(|q| {
            let mut out = vec![0.0; g.num_edges()];
            for i in 0..g.num_vertices() {
                for slot in g.slots(i) {
                    if g.target(slot) > i {
                        out[g.edge_id(slot)] = dom.domination(q, slot) + dom.domination(q, g.reverse_slot(slot));
                    }
                }
            }
            out
        })
        .collect()
}

/// Owner class of every undirected edge (0 = unassigned).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unfolding {
    num_classes: usize,
    owners: Vec<usize>,
}

impl Unfolding {
    pub fn from_owners(num_classes: usize, owners: Vec<usize>) -> Self {
        Unfolding { num_classes, owners }
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Owner per undirected edge id, 0 when unassigned.
    pub fn owners(&self) -> &[usize] {
        &self.owners
    }

    pub fn owner(&self, edge: usize) -> usize {
        self.owners[edge]
    }

    /// Edges of the unfolding of class `c`; `c = 0` gives the unassigned set.
    pub fn edges<'g>(&'g self, g: &'g Graph, c: usize) -> impl Iterator<Item = (usize, usize)> + 'g {
        g.edges()
            .iter()
            .zip(&self.owners)
            .filter(move |(_, &o)| o == c)
            .map(|(&e, _)| e)
    }

    /// Number of edges per owner, index 0 being the unassigned edges.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_classes + 1];
        for &o in &self.owners {
            sizes[o] += 1;
        }
        sizes
    }
}

/// Splits the edges of `g` by dominating class.
pub fn unfold<D: CumulativeDomination + ?Sized>(g: &Graph, dom: &D) -> Unfolding {
    let sym = symmetric_domination(g, dom);
    let owners = (0..g.num_edges())
        .map(|e| {
            let mut best = 0;
            for q in 1..sym.len() {
                if sym[q][e] > sym[best][e] {
                    best = q;
                }
            }
            let top = sym[best][e];
            if top <= 0.0 {
                return 0;
            }
            let tied = (0..sym.len()).any(|q| q != best && top - sym[q][e] <= TIE_TOLERANCE * top);
            if tied {
                0
            } else {
                best + 1
            }
        })
        .collect();
    Unfolding {
        num_classes: dom.num_classes(),
        owners,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexPrediction {
    /// Predicted class, 0 when no class owns any reachable edge.
    pub class: usize,
    /// Per-class edge counts at `bfs_depth_used` (class 1 first).
    pub scores: Vec<u64>,
    /// Neighborhood depth that decided the class; 0 for labeled vertices.
    pub bfs_depth_used: usize,
    /// More than one class owns edges around the vertex at depth 1.
    pub overlapping: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub vertices: Vec<VertexPrediction>,
}

impl Prediction {
    pub fn classes(&self) -> Vec<usize> {
        self.vertices.iter().map(|v| v.class).collect()
    }

    /// Fraction of `vertices` whose predicted class differs from `truth`.
    pub fn error_rate(&self, truth: &[usize], vertices: &[usize]) -> f64 {
        if vertices.is_empty() {
            return 0.0;
        }
        let wrong = vertices
            .iter()
            .filter(|&&i| self.vertices[i].class != truth[i])
            .count();
        wrong as f64 / vertices.len() as f64
    }
}

/// Reusable BFS scratch space.
struct Ball {
    stamp: Vec<u32>,
    epoch: u32,
    members: Vec<usize>,
    frontier_start: usize,
}

impl Ball {
    fn new(n: usize) -> Self {
        Ball {
            stamp: vec![0; n],
            epoch: 0,
            members: Vec::new(),
            frontier_start: 0,
        }
    }

    fn reset(&mut self, center: usize) {
        self.epoch += 1;
        if self.epoch == u32::MAX {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.members.clear();
        self.members.push(center);
        self.stamp[center] = self.epoch;
        self.frontier_start = 0;
    }

    fn contains(&self, v: usize) -> bool {
        self.stamp[v] == self.epoch
    }

    /// Adds the next BFS layer; false when nothing new was reached.
    fn grow(&mut self, g: &Graph) -> bool {
        let end = self.members.len();
        for k in self.frontier_start..end {
            let v = self.members[k];
            for &w in g.neighbors(v) {
                if self.stamp[w] != self.epoch {
                    self.stamp[w] = self.epoch;
                    self.members.push(w);
                }
            }
        }
        self.frontier_start = end;
        self.members.len() > end
    }

    /// Per-class count of owned edges with at least one endpoint in the ball.
    fn scores(&self, g: &Graph, u: &Unfolding) -> Vec<u64> {
        let mut scores = vec![0u64; u.num_classes()];
        for &v in &self.members {
            for slot in g.slots(v) {
                let w = g.target(slot);
                let owner = u.owner(g.edge_id(slot));
                if owner != 0 && (!self.contains(w) || v < w) {
                    scores[owner - 1] += 1;
                }
            }
        }
        scores
    }
}

fn argmax_lowest(scores: &[u64]) -> usize {
    let mut best = 0;
    for (q, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = q;
        }
    }
    if scores.get(best).copied().unwrap_or(0) == 0 {
        0
    } else {
        best + 1
    }
}

fn is_overlapping(scores: &[u64]) -> bool {
    scores.iter().filter(|&&s| s > 0).count() >= 2
}

/// Depth-1 per-class edge counts around vertex `i`.
pub fn overlap_profile(g: &Graph, u: &Unfolding, i: usize) -> Vec<u64> {
    let mut ball = Ball::new(g.num_vertices());
    ball.reset(i);
    ball.grow(g);
    ball.scores(g, u)
}

/// Labels every vertex from the unfolding. Labeled vertices keep their label.
pub fn classify(g: &Graph, u: &Unfolding) -> Prediction {
    let vertices = (0..g.num_vertices())
        .into_par_iter()
        .map_init(
            || Ball::new(g.num_vertices()),
            |ball, i| {
                ball.reset(i);
                ball.grow(g);
                let profile = ball.scores(g, u);
                let overlapping = is_overlapping(&profile);
                if g.label(i) != UNLABELED {
                    return VertexPrediction {
                        class: g.label(i),
                        scores: profile,
                        bfs_depth_used: 0,
                        overlapping,
                    };
                }
                let mut depth = 1;
                let mut scores = profile;
                while scores.iter().all(|&s| s == 0) {
                    if !ball.grow(g) {
                        break;
                    }
                    depth += 1;
                    scores = ball.scores(g, u);
                }
                VertexPrediction {
                    class: argmax_lowest(&scores),
                    scores,
                    bfs_depth_used: depth,
                    overlapping,
                }
            },
        )
        .collect();
    Prediction { vertices }
}
