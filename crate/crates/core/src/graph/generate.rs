//! Random graph generators for fixtures and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{DataGraph, VertexId};
use crate::pattern::Label;

/// G(n, p): every pair is an edge independently with probability `p`.
pub fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Vec<(VertexId, VertexId)> {
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Preferential attachment: each new vertex links to `m` distinct earlier
/// vertices chosen proportionally to degree. Produces a power-law degree
/// distribution.
pub fn barabasi_albert<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<(VertexId, VertexId)> {
    assert!(m >= 1 && n > m);
    let mut edges = Vec::with_capacity(n * m);
    // every edge endpoint, so uniform sampling is degree-proportional
    let mut endpoints: Vec<VertexId> = Vec::with_capacity(2 * n * m);
    for u in 0..=m as VertexId {
        for v in u + 1..=m as VertexId {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for v in (m + 1) as VertexId..n as VertexId {
        targets.clear();
        while targets.len() < m {
            let t = *endpoints.choose(rng).expect("seed clique is non-empty");
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v));
            endpoints.extend([t, v]);
        }
    }
    edges
}

pub fn random_labels<R: Rng>(n: usize, label_count: Label, rng: &mut R) -> Vec<Label> {
    (0..n).map(|_| rng.gen_range(0..label_count)).collect()
}

/// Convenience: an Erdős–Rényi graph, optionally labeled uniformly at random.
pub fn random_graph<R: Rng>(n: usize, p: f64, labels: Option<Label>, rng: &mut R) -> DataGraph {
    let edges = erdos_renyi(n, p, rng);
    let labels = labels.map(|k| random_labels(n, k, rng));
    DataGraph::from_edges(n, &edges, labels).expect("generated edges are in range")
}
