//! Brute-force oracles. Everything here works from first principles over
//! all injections and permutations, sharing no search code with the library.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use morphmine::graph::generate;
use morphmine::pattern::{canonicalize, CanonicalForm};
use morphmine::{DataGraph, Label, Pattern, VertexId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(seed: u64, n: usize, p: f64, labels: Option<Label>) -> DataGraph {
    generate::random_graph(n, p, labels, &mut rng(seed))
}

pub fn k4() -> DataGraph {
    DataGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], None).unwrap()
}

/// The seven-vertex example graph: a-b-c-d-a square, triangle-rich block
/// {a, d, e, f} and the c-g-f path with chord c-f.
pub const LETTERS: [&str; 7] = ["a", "b", "c", "d", "e", "f", "g"];

pub fn letter_graph() -> DataGraph {
    let id = |s: &str| LETTERS.iter().position(|&x| x == s).unwrap() as VertexId;
    let edges: Vec<_> = ["ab", "bc", "cd", "da", "ae", "af", "de", "df", "ef", "cg", "gf", "cf"]
        .iter()
        .map(|e| (id(&e[0..1]), id(&e[1..2])))
        .collect();
    DataGraph::from_edges(7, &edges, None).unwrap()
}

pub fn diamond() -> Pattern {
    Pattern::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], &[], None).unwrap()
}

pub fn tailed_triangle() -> Pattern {
    Pattern::new(4, &[(0, 1), (1, 2), (2, 0), (2, 3)], &[], None).unwrap()
}

/// Whether `m` (pattern vertex to data vertex) satisfies every constraint.
pub fn is_match(p: &Pattern, g: &DataGraph, m: &[VertexId]) -> bool {
    let n = p.vertex_count();
    for u in 0..n {
        if let Some(l) = p.label(u) {
            if g.label(m[u]) != l {
                return false;
            }
        }
        for v in u + 1..n {
            if m[u] == m[v] {
                return false;
            }
            let adjacent = g.has_edge(m[u], m[v]);
            if (p.has_edge(u, v) && !adjacent) || (p.has_anti_edge(u, v) && adjacent) {
                return false;
            }
        }
    }
    true
}

/// Every valid injection, automorphic images included.
pub fn injections(p: &Pattern, g: &DataGraph) -> BTreeSet<Vec<VertexId>> {
    (0..g.vertex_count() as VertexId)
        .permutations(p.vertex_count())
        .filter(|m| is_match(p, g, m))
        .collect()
}

/// Permutations of the pattern's vertices preserving edges, anti-edges and labels.
pub fn automorphism_count(p: &Pattern) -> u64 {
    let n = p.vertex_count();
    (0..n)
        .permutations(n)
        .filter(|a| {
            (0..n).all(|u| {
                p.label(u) == p.label(a[u])
                    && (0..n).all(|v| p.has_edge(u, v) == p.has_edge(a[u], a[v]) && p.has_anti_edge(u, v) == p.has_anti_edge(a[u], a[v]))
            })
        })
        .count() as u64
}

pub fn brute_count(p: &Pattern, g: &DataGraph) -> u64 {
    let raw = injections(p, g).len() as u64;
    let aut = automorphism_count(p);
    assert_eq!(raw % aut, 0);
    raw / aut
}

/// Minimum over pattern vertices of the number of distinct data vertices it
/// is mapped to across all injections; 0 without matches.
pub fn brute_mni(p: &Pattern, g: &DataGraph) -> u64 {
    let all = injections(p, g);
    (0..p.vertex_count())
        .map(|i| all.iter().map(|m| m[i]).collect::<BTreeSet<_>>().len() as u64)
        .min()
        .unwrap_or(0)
}

/// Connected, edge-induced, labeled patterns with exactly `k` edges whose
/// labels all occur in `labels`, one per isomorphism class.
pub fn labeled_patterns(k: usize, labels: &[Label]) -> Vec<Pattern> {
    let mut out: BTreeMap<CanonicalForm, Pattern> = BTreeMap::new();
    for n in 2..=k + 1 {
        let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
        for edges in pairs.iter().copied().combinations(k) {
            for assignment in (0..n).map(|_| labels.iter().copied()).multi_cartesian_product() {
                if let Ok(p) = Pattern::new(n, &edges, &[], Some(assignment)) {
                    out.entry(canonicalize(&p)).or_insert(p);
                }
            }
        }
    }
    out.into_values().collect()
}

/// Frequent `k`-edge patterns by exhaustive enumeration, keyed by canonical
/// code string.
pub fn brute_fsm(g: &DataGraph, k: usize, support: u64) -> BTreeMap<String, u64> {
    let labels: Vec<Label> = g.label_set().collect();
    labeled_patterns(k, &labels)
        .iter()
        .map(|p| (canonicalize(p).to_string(), brute_mni(p, g)))
        .filter(|&(_, s)| s >= support)
        .collect()
}

/// `(m ∘ f)[i] = m[f(i)]`.
pub fn compose(m: &[VertexId], f: &[usize]) -> Vec<VertexId> {
    f.iter().map(|&j| m[j]).collect()
}
