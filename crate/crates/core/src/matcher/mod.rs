//! Backtracking subgraph matcher. Every match of a pattern is reported
//! exactly once per automorphism class; edges, anti-edges and labels are all
//! enforced.

mod plan;
mod search;

use std::ops::AddAssign;

use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{DataGraph, VertexId};
use crate::pattern::Pattern;

pub use plan::MatchingPlan;
use search::Explorer;

/// `m[i]` is the data vertex bound to pattern vertex `i`.
pub type Match = Vec<VertexId>;

/// Exploration counters. `nodes` counts bound partial matches (search tree
/// nodes); `scanned` counts adjacency entries and search steps touched while
/// generating candidates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MatchStats {
    pub nodes: u64,
    pub scanned: u64,
    pub nodes_per_depth: Vec<u64>,
}

impl MatchStats {
    pub fn new(depth: usize) -> Self {
        MatchStats { nodes: 0, scanned: 0, nodes_per_depth: vec![0; depth] }
    }

    /// Nodes plus scanned entries: the total exploration work.
    pub fn work(&self) -> u64 {
        self.nodes + self.scanned
    }

    fn finish(mut self) -> Self {
        self.nodes = self.nodes_per_depth.iter().sum();
        self
    }
}

impl AddAssign<&MatchStats> for MatchStats {
    fn add_assign(&mut self, other: &MatchStats) {
        self.nodes += other.nodes;
        self.scanned += other.scanned;
        if self.nodes_per_depth.len() < other.nodes_per_depth.len() {
            self.nodes_per_depth.resize(other.nodes_per_depth.len(), 0);
        }
        for (a, b) in self.nodes_per_depth.iter_mut().zip(&other.nodes_per_depth) {
            *a += b;
        }
    }
}

/// Data vertices that may be bound to the first vertex of the plan's order.
pub fn root_candidates(plan: &MatchingPlan, g: &DataGraph) -> Vec<VertexId> {
    let first = plan.order()[0];
    match plan.pattern().label(first) {
        Some(l) => g.vertices_with_label(l).to_vec(),
        None => (0..g.vertex_count() as VertexId).collect(),
    }
}

/// Calls `consumer` once per unique match, sequentially in a deterministic
/// order.
pub fn match_all<F: FnMut(&[VertexId])>(p: &Pattern, g: &DataGraph, mut consumer: F) -> MatchStats {
    let plan = MatchingPlan::new(p);
    let mut explorer = Explorer::new(g, &plan);
    for root in root_candidates(&plan, g) {
        explorer.explore_root(root, &mut consumer);
    }
    explorer.stats.finish()
}

/// Parallel fold over all matches, partitioned by the data vertex bound to
/// the first pattern vertex. `roots` restricts exploration to a subset of
/// root vertices (the sampling used by cost estimation). `combine` must be
/// commutative and associative for the result to be partition independent.
pub fn fold_matches<T, I, F, C>(
    plan: &MatchingPlan,
    g: &DataGraph,
    roots: Option<&[VertexId]>,
    identity: I,
    fold: F,
    combine: C,
) -> (T, MatchStats)
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(&mut T, &[VertexId]) + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    let owned;
    let roots = match roots {
        Some(r) => r,
        None => {
            owned = root_candidates(plan, g);
            &owned
        }
    };
    let (value, stats) = roots
        .par_iter()
        .fold(
            || (Explorer::new(g, plan), identity()),
            |(mut explorer, mut acc), &root| {
                explorer.explore_root(root, &mut |m: &[VertexId]| fold(&mut acc, m));
                (explorer, acc)
            },
        )
        .map(|(explorer, acc)| (acc, explorer.stats))
        .reduce(
            || (identity(), MatchStats::new(plan.order().len())),
            |(a, mut sa), (b, sb)| {
                sa += &sb;
                (combine(a, b), sa)
            },
        );
    (value, stats.finish())
}

/// Number of unique matches of `p` in `g`.
pub fn count(p: &Pattern, g: &DataGraph) -> u64 {
    count_with_stats(p, g).0
}

pub fn count_with_stats(p: &Pattern, g: &DataGraph) -> (u64, MatchStats) {
    let plan = MatchingPlan::new(p);
    fold_matches(&plan, g, None, || 0u64, |acc, _| *acc += 1, |a, b| a + b)
}

/// Every unique match, sorted.
pub fn collect_matches(p: &Pattern, g: &DataGraph) -> Vec<Match> {
    let mut out = Vec::new();
    match_all(p, g, |m| out.push(m.to_vec()));
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> DataGraph {
        DataGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], None).unwrap()
    }

    #[test]
    fn cycle_on_clique() {
        let g = k4();
        let c4 = Pattern::cycle(4);
        assert_eq!(count(&c4, &g), 3);
        assert_eq!(count(&c4.vertex_variant(), &g), 0);
        assert_eq!(count(&Pattern::clique(3), &g), 4);
        assert_eq!(count(&Pattern::clique(4), &g), 1);
    }

    #[test]
    fn wedges_in_square() {
        let g = DataGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], None).unwrap();
        assert_eq!(count(&Pattern::path(3), &g), 4);
    }

    #[test]
    fn matches_respect_constraints() {
        let g = k4();
        for m in collect_matches(&Pattern::cycle(4), &g) {
            let p = Pattern::cycle(4);
            for (u, v) in p.edges() {
                assert!(g.has_edge(m[u], m[v]));
            }
        }
    }

    #[test]
    fn single_vertex_matches_label_compatible_vertices() {
        let g = DataGraph::from_edges(3, &[(0, 1)], Some(vec![1, 2, 1])).unwrap();
        let p = Pattern::new(1, &[], &[], Some(vec![1])).unwrap();
        assert_eq!(collect_matches(&p, &g), vec![vec![0], vec![2]]);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = crate::graph::generate::random_graph(60, 0.2, None, &mut rng);
        for p in crate::pattern::connected_patterns(4) {
            let mut seq = 0u64;
            let s1 = match_all(&p, &g, |_| seq += 1);
            let (par, s2) = count_with_stats(&p, &g);
            assert_eq!(seq, par);
            assert_eq!(s1, s2);
        }
    }
}
