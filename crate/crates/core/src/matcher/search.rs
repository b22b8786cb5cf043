use super::plan::MatchingPlan;
use super::MatchStats;
use crate::graph::{DataGraph, VertexId};

/// Past this size ratio a sorted-list operation switches from merging to
/// binary searching the longer list.
const GALLOP_RATIO: usize = 16;

#[inline]
fn log2_ceil(n: usize) -> u64 {
    (usize::BITS - n.leading_zeros()) as u64
}

/// Sub-slice of a sorted list restricted to `[lo, hi)`.
#[inline]
fn window<'a>(list: &'a [VertexId], lo: VertexId, hi: VertexId, work: &mut u64) -> &'a [VertexId] {
    if lo == 0 && hi == VertexId::MAX {
        return list;
    }
    *work += 2 * log2_ceil(list.len());
    let start = list.partition_point(|&x| x < lo);
    let end = start + list[start..].partition_point(|&x| x < hi);
    &list[start..end]
}

/// Keeps the elements of `buf` that are (`keep_common`) or are not in `other`.
fn filter_sorted(buf: &mut Vec<VertexId>, other: &[VertexId], keep_common: bool, work: &mut u64) {
    if buf.is_empty() {
        return;
    }
    if other.is_empty() {
        if keep_common {
            buf.clear();
        }
        return;
    }
    if other.len() > GALLOP_RATIO * buf.len() {
        *work += buf.len() as u64 * log2_ceil(other.len());
        buf.retain(|x| other.binary_search(x).is_ok() == keep_common);
        return;
    }
    let (mut i, mut j, mut w) = (0, 0, 0);
    while i < buf.len() && j < other.len() {
        let (a, b) = (buf[i], other[j]);
        if a < b {
            if !keep_common {
                buf[w] = a;
                w += 1;
            }
            i += 1;
        } else if a > b {
            j += 1;
        } else {
            if keep_common {
                buf[w] = a;
                w += 1;
            }
            i += 1;
            j += 1;
        }
    }
    *work += (i + j) as u64;
    if !keep_common {
        while i < buf.len() {
            buf[w] = buf[i];
            w += 1;
            i += 1;
        }
    }
    buf.truncate(w);
}

/// Backtracking state for one worker.
pub(crate) struct Explorer<'a> {
    graph: &'a DataGraph,
    plan: &'a MatchingPlan,
    bound: Vec<VertexId>,
    matched: Vec<VertexId>,
    candidates: Vec<Vec<VertexId>>,
    pub stats: MatchStats,
}

impl<'a> Explorer<'a> {
    pub fn new(graph: &'a DataGraph, plan: &'a MatchingPlan) -> Self {
        let n = plan.steps.len();
        Explorer {
            graph,
            plan,
            bound: vec![0; n],
            matched: vec![0; n],
            candidates: vec![Vec::new(); n],
            stats: MatchStats::new(n),
        }
    }

    pub fn root_accepts(&self, v: VertexId) -> bool {
        match self.plan.steps[0].label {
            Some(l) => self.graph.label(v) == l,
            None => true,
        }
    }

    /// Explores every match whose first-order vertex is bound to `root`.
    pub fn explore_root<F: FnMut(&[VertexId])>(&mut self, root: VertexId, sink: &mut F) {
        if !self.root_accepts(root) {
            return;
        }
        self.stats.nodes_per_depth[0] += 1;
        self.bound[0] = root;
        self.matched[self.plan.steps[0].vertex] = root;
        if self.plan.steps.len() == 1 {
            sink(&self.matched);
        } else {
            self.descend(1, sink);
        }
    }

    fn descend<F: FnMut(&[VertexId])>(&mut self, depth: usize, sink: &mut F) {
        let mut buf = std::mem::take(&mut self.candidates[depth]);
        self.generate(depth, &mut buf);
        let last = depth + 1 == self.plan.steps.len();
        let vertex = self.plan.steps[depth].vertex;
        self.stats.nodes_per_depth[depth] += buf.len() as u64;
        for &c in &buf {
            self.bound[depth] = c;
            self.matched[vertex] = c;
            if last {
                sink(&self.matched);
            } else {
                self.descend(depth + 1, sink);
            }
        }
        self.candidates[depth] = buf;
    }

    /// Candidate data vertices for the pattern vertex at `depth`: the
    /// intersection of the bound neighbors' adjacency lists minus the bound
    /// anti-neighbors' lists, within the symmetry bounds, label-filtered and
    /// excluding vertices already used.
    fn generate(&mut self, depth: usize, buf: &mut Vec<VertexId>) {
        let step = &self.plan.steps[depth];
        let g = self.graph;
        let bound = &self.bound;
        let work = &mut self.stats.scanned;
        let lo = step.above.iter().map(|&d| bound[d] + 1).max().unwrap_or(0);
        let hi = step.below.iter().map(|&d| bound[d]).min().unwrap_or(VertexId::MAX);
        buf.clear();
        if lo >= hi {
            return;
        }

        let (first, rest) = {
            let smallest = step
                .neighbors
                .iter()
                .copied()
                .min_by_key(|&d| g.degree(bound[d]))
                .expect("every step after the first has a bound neighbor");
            (smallest, step.neighbors.iter().copied().filter(move |&d| d != smallest))
        };
        let base = window(g.neighbors(bound[first]), lo, hi, work);
        *work += base.len() as u64;
        buf.extend_from_slice(base);
        for d in rest {
            let other = window(g.neighbors(bound[d]), lo, hi, work);
            filter_sorted(buf, other, true, work);
        }
        for &d in &step.anti {
            let other = window(g.neighbors(bound[d]), lo, hi, work);
            filter_sorted(buf, other, false, work);
        }
        let used = &bound[..depth];
        match step.label {
            Some(l) => buf.retain(|&c| g.label(c) == l && !used.contains(&c)),
            None => buf.retain(|&c| !used.contains(&c)),
        }
    }
}
