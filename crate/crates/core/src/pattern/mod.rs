//! Query patterns with regular edges, anti-edges and optional vertex labels.
//!
//! A pattern is a small simple connected graph. Besides its edges it may carry
//! anti-edges: vertex pairs that must *not* be adjacent in a match. A pattern
//! without anti-edges is edge-induced; a pattern whose anti-edges cover every
//! non-adjacent pair is vertex-induced. Cliques are both.
//!
//! Vertices are 0-based internally. The text format (see [`text`]) is 1-based.

mod canonical;
mod iso;
pub mod text;

use std::fmt;

use thiserror::Error;

pub use canonical::{automorphisms, canonical_labeling, canonicalize, find_isomorphism, orbits, CanonicalForm};
pub use iso::{enumerate_subiso, enumerate_subiso_raw, superpatterns, PatternIso};

/// Vertex label identifier shared by patterns and data graphs.
pub type Label = u32;

/// Largest pattern size supported. Canonical labeling is exhaustive over all
/// vertex permutations, so this stays small.
pub const MAX_PATTERN_VERTICES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("pattern must have between 1 and {MAX_PATTERN_VERTICES} vertices, got {0}")]
    VertexCount(usize),
    #[error("vertex {vertex} out of range for a pattern with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("pair ({0}, {1}) is both an edge and an anti-edge")]
    EdgeAntiEdgeOverlap(usize, usize),
    #[error("pattern is not connected")]
    Disconnected,
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
}

/// A query pattern. Equality is structural on this exact vertex numbering;
/// use [`canonicalize`] to compare up to isomorphism.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    n: usize,
    edges: Vec<u16>,
    anti: Vec<u16>,
    labels: Option<Vec<Label>>,
}

impl Pattern {
    /// Builds a pattern from 0-based edge and anti-edge lists. Duplicate pairs
    /// are collapsed.
    pub fn new(
        n: usize,
        edges: &[(usize, usize)],
        anti_edges: &[(usize, usize)],
        labels: Option<Vec<Label>>,
    ) -> Result<Self, PatternError> {
        if n == 0 || n > MAX_PATTERN_VERTICES {
            return Err(PatternError::VertexCount(n));
        }
        let mut e = vec![0u16; n];
        let mut a = vec![0u16; n];
        for (masks, pairs) in [(&mut e, edges), (&mut a, anti_edges)] {
            for &(u, v) in pairs {
                for w in [u, v] {
                    if w >= n {
                        return Err(PatternError::VertexOutOfRange { vertex: w, count: n });
                    }
                }
                if u == v {
                    return Err(PatternError::SelfLoop(u));
                }
                masks[u] |= 1 << v;
                masks[v] |= 1 << u;
            }
        }
        Self::from_masks(n, e, a, labels)
    }

    pub(crate) fn from_masks(
        n: usize,
        edges: Vec<u16>,
        anti: Vec<u16>,
        labels: Option<Vec<Label>>,
    ) -> Result<Self, PatternError> {
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(PatternError::LabelCount { expected: n, got: l.len() });
            }
        }
        for u in 0..n {
            let both = edges[u] & anti[u];
            if both != 0 {
                return Err(PatternError::EdgeAntiEdgeOverlap(u, both.trailing_zeros() as usize));
            }
        }
        let p = Pattern { n, edges, anti, labels };
        if !p.is_connected() {
            return Err(PatternError::Disconnected);
        }
        Ok(p)
    }

    pub fn clique(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::new(n, &edges, &[], None).expect("clique is a valid pattern")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::new(n, &edges, &[], None).expect("path is a valid pattern")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        Self::new(n, &edges, &[], None).expect("cycle is a valid pattern")
    }

    /// Star with center 0 and `n - 1` leaves.
    pub fn star(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
        Self::new(n, &edges, &[], None).expect("star is a valid pattern")
    }

    pub fn with_labels(&self, labels: Vec<Label>) -> Result<Self, PatternError> {
        Self::from_masks(self.n, self.edges.clone(), self.anti.clone(), Some(labels))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn anti_edge_count(&self) -> usize {
        self.anti.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges[u] & (1 << v) != 0
    }

    pub fn has_anti_edge(&self, u: usize, v: usize) -> bool {
        self.anti[u] & (1 << v) != 0
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges[v].count_ones() as usize
    }

    pub(crate) fn edge_mask(&self, v: usize) -> u16 {
        self.edges[v]
    }

    pub(crate) fn anti_mask(&self, v: usize) -> u16 {
        self.anti[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.has_edge(v, u))
    }

    /// Edges as 0-based `(u, v)` pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.pairs(|u, v| self.has_edge(u, v))
    }

    pub fn anti_edges(&self) -> Vec<(usize, usize)> {
        self.pairs(|u, v| self.has_anti_edge(u, v))
    }

    fn pairs(&self, keep: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if keep(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> Option<Label> {
        self.labels.as_ref().map(|l| l[v])
    }

    pub fn is_labeled(&self) -> bool {
        self.labels.is_some()
    }

    pub fn is_edge_induced(&self) -> bool {
        self.anti.iter().all(|&m| m == 0)
    }

    pub fn is_vertex_induced(&self) -> bool {
        let full = self.full_mask();
        (0..self.n).all(|v| self.edges[v] | self.anti[v] | (1 << v) == full)
    }

    pub fn is_clique(&self) -> bool {
        self.edge_count() == self.n * (self.n - 1) / 2
    }

    fn full_mask(&self) -> u16 {
        ((1u32 << self.n) - 1) as u16
    }

    /// Same edges, no anti-edges.
    pub fn edge_variant(&self) -> Pattern {
        Pattern { n: self.n, edges: self.edges.clone(), anti: vec![0; self.n], labels: self.labels.clone() }
    }

    /// Same edges, anti-edges on every non-adjacent pair.
    pub fn vertex_variant(&self) -> Pattern {
        let full = self.full_mask();
        let anti = (0..self.n).map(|v| full & !self.edges[v] & !(1 << v)).collect();
        Pattern { n: self.n, edges: self.edges.clone(), anti, labels: self.labels.clone() }
    }

    /// Relabels vertices: old vertex `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Pattern {
        debug_assert_eq!(perm.len(), self.n);
        let remap = |mask: u16| -> u16 {
            let mut out = 0u16;
            for (i, &to) in perm.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    out |= 1 << to;
                }
            }
            out
        };
        let mut edges = vec![0; self.n];
        let mut anti = vec![0; self.n];
        let mut labels = self.labels.as_ref().map(|_| vec![0; self.n]);
        for (i, &to) in perm.iter().enumerate() {
            edges[to] = remap(self.edges[i]);
            anti[to] = remap(self.anti[i]);
            if let (Some(out), Some(src)) = (labels.as_mut(), self.labels.as_ref()) {
                out[to] = src[i];
            }
        }
        Pattern { n: self.n, edges, anti, labels }
    }

    /// Adds a regular edge between two existing vertices, removing any
    /// anti-edge on that pair.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Pattern, PatternError> {
        for w in [u, v] {
            if w >= self.n {
                return Err(PatternError::VertexOutOfRange { vertex: w, count: self.n });
            }
        }
        if u == v {
            return Err(PatternError::SelfLoop(u));
        }
        let mut p = self.clone();
        p.edges[u] |= 1 << v;
        p.edges[v] |= 1 << u;
        p.anti[u] &= !(1 << v);
        p.anti[v] &= !(1 << u);
        Ok(p)
    }

    /// Adds a new vertex joined to `attach` by a regular edge. `label` must be
    /// given exactly when the pattern is labeled.
    pub fn with_pendant(&self, attach: usize, label: Option<Label>) -> Result<Pattern, PatternError> {
        if attach >= self.n {
            return Err(PatternError::VertexOutOfRange { vertex: attach, count: self.n });
        }
        let n = self.n + 1;
        if n > MAX_PATTERN_VERTICES {
            return Err(PatternError::VertexCount(n));
        }
        let mut edges = self.edges.clone();
        let mut anti = self.anti.clone();
        edges.push(1 << attach);
        anti.push(0);
        edges[attach] |= 1 << self.n;
        let labels = match (&self.labels, label) {
            (Some(l), Some(new)) => {
                let mut l = l.clone();
                l.push(new);
                Some(l)
            }
            (None, None) => None,
            (Some(_), None) => return Err(PatternError::LabelCount { expected: n, got: self.n }),
            (None, Some(_)) => return Err(PatternError::LabelCount { expected: 0, got: 1 }),
        };
        Self::from_masks(n, edges, anti, labels)
    }

    fn is_connected(&self) -> bool {
        let mut seen = 1u16;
        let mut frontier = 1u16;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = self.edges[v] & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        seen == self.full_mask()
    }

    /// Removes the edge `u`-`v` (and any anti-edges) and drops an endpoint
    /// left without edges. `None` when the result would be disconnected or
    /// empty.
    pub fn without_edge(&self, u: usize, v: usize) -> Option<Pattern> {
        if u >= self.n || v >= self.n || !self.has_edge(u, v) {
            return None;
        }
        let edges: Vec<(usize, usize)> = self.edges().into_iter().filter(|&e| e != (u.min(v), u.max(v))).collect();
        let keep: Vec<usize> = (0..self.n).filter(|&w| edges.iter().any(|&(a, b)| a == w || b == w)).collect();
        if keep.is_empty() || keep.len() + 1 < self.n {
            return None;
        }
        let index = |w: usize| keep.iter().position(|&k| k == w).expect("kept endpoint");
        let edges: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (index(a), index(b))).collect();
        let labels = self.labels.as_ref().map(|l| keep.iter().map(|&w| l[w]).collect());
        Pattern::new(keep.len(), &edges, &[], labels).ok()
    }

    /// Short human-readable description, e.g. `cycle4/vertex`.
    pub fn describe(&self) -> String {
        let shape = shape_name(self);
        let mode = if self.is_clique() {
            "clique"
        } else if self.is_edge_induced() {
            "edge"
        } else if self.is_vertex_induced() {
            "vertex"
        } else {
            "mixed"
        };
        match &self.labels {
            Some(l) => {
                let l: Vec<String> = l.iter().map(|x| x.to_string()).collect();
                format!("{shape}/{mode}[{}]", l.join(","))
            }
            None => format!("{shape}/{mode}"),
        }
    }
}

fn shape_name(p: &Pattern) -> String {
    let n = p.vertex_count();
    let m = p.edge_count();
    let mut degrees: Vec<usize> = (0..n).map(|v| p.degree(v)).collect();
    degrees.sort_unstable();
    let name = match (n, m, degrees.as_slice()) {
        (1, 0, _) => "vertex",
        (2, 1, _) => "edge",
        (3, 2, _) => "wedge",
        (3, 3, _) => "triangle",
        (4, 3, [1, 1, 2, 2]) => "path4",
        (4, 3, [1, 1, 1, 3]) => "star4",
        (4, 4, [2, 2, 2, 2]) => "cycle4",
        (4, 4, [1, 2, 2, 3]) => "tailed-triangle",
        (4, 5, _) => "chordal-cycle4",
        (4, 6, _) => "clique4",
        _ => "",
    };
    if name.is_empty() {
        format!("g{n}.{m}")
    } else {
        name.to_string()
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({})", self)
    }
}

/// Compact 1-based rendering: `n=4 e=1-2,2-3 a=1-3 l=1,2,1,1`.
impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |pairs: Vec<(usize, usize)>| -> String {
            pairs.iter().map(|(u, v)| format!("{}-{}", u + 1, v + 1)).collect::<Vec<_>>().join(",")
        };
        write!(f, "n={} e={}", self.n, join(self.edges()))?;
        if !self.is_edge_induced() {
            write!(f, " a={}", join(self.anti_edges()))?;
        }
        if let Some(l) = &self.labels {
            let l: Vec<String> = l.iter().map(|x| x.to_string()).collect();
            write!(f, " l={}", l.join(","))?;
        }
        Ok(())
    }
}

/// All connected unlabeled edge-induced patterns on `n` vertices, one per
/// isomorphism class, ordered by canonical form.
pub fn connected_patterns(n: usize) -> Vec<Pattern> {
    assert!((1..=MAX_PATTERN_VERTICES).contains(&n));
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut seen = std::collections::BTreeMap::new();
    for subset in 0u64..(1u64 << pairs.len()) {
        if (subset.count_ones() as usize) + 1 < n {
            continue;
        }
        let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| subset & (1 << i) != 0).map(|(_, &e)| e).collect();
        if let Ok(p) = Pattern::new(n, &edges, &[], None) {
            let (code, perm) = canonical_labeling(&p);
            seen.entry(code).or_insert_with(|| p.permuted(&perm));
        }
    }
    seen.into_values().collect()
}
