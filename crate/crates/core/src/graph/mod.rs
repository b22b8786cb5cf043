//! The data graph: an immutable, undirected, simple, vertex-labeled graph in
//! compressed sparse row form with sorted adjacency lists.

pub mod generate;
mod io;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::pattern::Label;

pub use io::{load_graph, load_graph_files, write_edge_list, write_labels, LoadReport};

pub type VertexId = u32;

/// Label carried by vertices that have none; unlabeled graphs are single-label
/// graphs over this sentinel.
pub const UNLABELED: Label = Label::MAX;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{file} line {line}: {message}")]
    Parse { file: &'static str, line: usize, message: String },
    #[error("vertex {vertex} out of range (graph has {count} vertices)")]
    VertexOutOfRange { vertex: u64, count: usize },
    #[error("graph too large: {0} vertices")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub max_degree: usize,
    pub mean_degree: f64,
    /// `degree_histogram[d]` = number of vertices with degree `d`.
    pub degree_histogram: Vec<usize>,
    pub label_histogram: BTreeMap<Label, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataGraph {
    offsets: Vec<usize>,
    adjacency: Vec<VertexId>,
    labels: Vec<Label>,
    labeled: bool,
    original_ids: Vec<u64>,
    by_label: BTreeMap<Label, Vec<VertexId>>,
    stats: GraphStats,
}

impl DataGraph {
    /// Builds a graph on vertices `0..n`. Self-loops are dropped, duplicate
    /// and reversed edges collapsed.
    pub fn from_edges(
        n: usize,
        edges: &[(VertexId, VertexId)],
        labels: Option<Vec<Label>>,
    ) -> Result<Self, GraphError> {
        let original_ids = (0..n as u64).collect();
        Self::build(n, edges.iter().copied(), labels, original_ids).map(|(g, _)| g)
    }

    pub(crate) fn build(
        n: usize,
        edges: impl Iterator<Item = (VertexId, VertexId)>,
        labels: Option<Vec<Label>>,
        original_ids: Vec<u64>,
    ) -> Result<(Self, usize), GraphError> {
        if n >= VertexId::MAX as usize {
            return Err(GraphError::TooLarge(n));
        }
        let mut lists: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        let mut self_loops = 0;
        for (u, v) in edges {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w as u64, count: n });
                }
            }
            if u == v {
                self_loops += 1;
                continue;
            }
            lists[u as usize].push(v);
            lists[v as usize].push(u);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut adjacency = Vec::new();
        offsets.push(0);
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
            adjacency.extend_from_slice(list);
            offsets.push(adjacency.len());
        }
        drop(lists);

        let labeled = labels.is_some();
        let labels = labels.unwrap_or_else(|| vec![UNLABELED; n]);
        if labels.len() != n {
            return Err(GraphError::VertexOutOfRange { vertex: labels.len() as u64, count: n });
        }
        let mut by_label: BTreeMap<Label, Vec<VertexId>> = BTreeMap::new();
        for (v, &l) in labels.iter().enumerate() {
            by_label.entry(l).or_default().push(v as VertexId);
        }

        let degree = |v: usize| offsets[v + 1] - offsets[v];
        let max_degree = (0..n).map(degree).max().unwrap_or(0);
        let mut degree_histogram = vec![0; max_degree + 1];
        for v in 0..n {
            degree_histogram[degree(v)] += 1;
        }
        let stats = GraphStats {
            vertex_count: n,
            edge_count: adjacency.len() / 2,
            max_degree,
            mean_degree: if n == 0 { 0.0 } else { adjacency.len() as f64 / n as f64 },
            degree_histogram,
            label_histogram: by_label.iter().map(|(&l, vs)| (l, vs.len())).collect(),
        };
        Ok((DataGraph { offsets, adjacency, labels, labeled, original_ids, by_label, stats }, self_loops))
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.stats.edge_count
    }

    pub fn stats(&self) -> &GraphStats {
        &self.stats
    }

    /// Sorted neighbors of `v`. Panics when `v` is out of range.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn try_neighbors(&self, v: VertexId) -> Result<&[VertexId], GraphError> {
        self.check(v)?;
        Ok(self.neighbors(v))
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Binary search in the shorter of the two adjacency lists.
    #[inline]
    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn try_has_edge(&self, u: VertexId, v: VertexId) -> Result<bool, GraphError> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.has_edge(u, v))
    }

    #[inline]
    pub fn label(&self, v: VertexId) -> Label {
        self.labels[v as usize]
    }

    pub fn try_label(&self, v: VertexId) -> Result<Label, GraphError> {
        self.check(v)?;
        Ok(self.label(v))
    }

    /// Whether labels were supplied at construction.
    pub fn is_labeled(&self) -> bool {
        self.labeled
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Sorted vertices carrying `label`.
    pub fn vertices_with_label(&self, label: Label) -> &[VertexId] {
        self.by_label.get(&label).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Distinct labels in ascending order.
    pub fn label_set(&self) -> impl Iterator<Item = Label> + '_ {
        self.by_label.keys().copied()
    }

    /// Identifier of `v` in the source file.
    pub fn original_id(&self, v: VertexId) -> u64 {
        self.original_ids[v as usize]
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.vertex_count() as VertexId)
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    fn check(&self, v: VertexId) -> Result<(), GraphError> {
        if (v as usize) < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v as u64, count: self.vertex_count() })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> DataGraph {
        DataGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], None).unwrap()
    }

    #[test]
    fn collapses_duplicates() {
        let g = DataGraph::from_edges(3, &[(0, 1), (1, 0), (1, 2)], None).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn clique_stats() {
        let g = k4();
        assert_eq!(g.stats().max_degree, 3);
        assert_eq!(g.stats().mean_degree, 3.0);
        assert_eq!(g.stats().degree_histogram, vec![0, 0, 0, 4]);
        assert!(g.has_edge(0, 3) && g.has_edge(3, 0));
        let degree_sum: usize = (0..4).map(|v| g.degree(v)).sum();
        assert_eq!(degree_sum, 2 * g.edge_count());
    }

    #[test]
    fn path_lookups() {
        let g = DataGraph::from_edges(3, &[(0, 1), (1, 2)], None).unwrap();
        assert!(!g.has_edge(0, 2));
        assert!(g.try_has_edge(0, 5).is_err());
        assert!(g.try_neighbors(3).is_err());
        assert!(g.try_label(7).is_err());
        assert_eq!(g.label(0), UNLABELED);
        assert!(!g.is_labeled());
    }

    #[test]
    fn self_loops_dropped_and_out_of_range_rejected() {
        let g = DataGraph::from_edges(2, &[(0, 0), (0, 1)], None).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(DataGraph::from_edges(2, &[(0, 2)], None).is_err());
    }

    #[test]
    fn label_index() {
        let g = DataGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)], Some(vec![5, 6, 5, 7])).unwrap();
        assert_eq!(g.vertices_with_label(5), &[0, 2]);
        assert_eq!(g.vertices_with_label(9), &[] as &[VertexId]);
        assert_eq!(g.label_set().collect::<Vec<_>>(), vec![5, 6, 7]);
        assert_eq!(g.stats().label_histogram.values().sum::<usize>(), g.vertex_count());
    }
}
