use rayon::prelude::*;

use super::{validate_graph, Dataset, Graph};
use crate::error::{LcuError, Result};

/// Symmetrized k-nearest-neighbor graph under Euclidean distance.
///
/// `{i, j}` is an edge when either endpoint is among the `k` nearest of the
/// other. Equal distances are ordered by vertex index. Brute force,
/// `O(n^2 D)`. The graph carries the dataset's labels; connectivity is not
/// checked.
pub fn build_knn_graph(data: &Dataset, k: usize) -> Result<Graph> {
    let n = data.len();
    if k == 0 {
        return Err(LcuError::InvalidParameter("k must be at least 1".into()));
    }
    if k >= n {
        return Err(LcuError::InvalidParameter(format!(
            "k = {k} needs at least {} points, got {n}",
            k + 1
        )));
    }

    let nearest: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = data.point(i);
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (squared_distance(p, data.point(j)), j))
                .collect();
            let by_distance =
                |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < cand.len() {
                cand.select_nth_unstable_by(k - 1, by_distance);
                cand.truncate(k);
            }
            cand.into_iter().map(|(_, j)| j).collect()
        })
        .collect();

    let edges = nearest
        .iter()
        .enumerate()
        .flat_map(|(i, js)| js.iter().map(move |&j| (i, j)));
    Graph::from_edges(n, edges)?.with_labels(data.labels().to_vec(), data.num_classes())
}

/// Smallest `k` in `1..=max_k` whose kNN graph passes [`validate_graph`].
pub fn build_knn_graph_auto(data: &Dataset, max_k: usize) -> Result<(Graph, usize)> {
    let mut last = None;
    for k in 1..=max_k.min(data.len().saturating_sub(1)) {
        let g = build_knn_graph(data, k)?;
        match validate_graph(&g) {
            Ok(()) => return Ok((g, k)),
            Err(err @ LcuError::Disconnected { .. }) => last = Some(err),
            Err(err) => return Err(err),
        }
    }
    Err(last.unwrap_or_else(|| {
        LcuError::InvalidParameter(format!("no k in 1..={max_k} is usable"))
    }))
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
