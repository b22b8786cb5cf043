use std::collections::BTreeMap;
use std::fmt;

use super::{automorphisms, canonical_labeling, Pattern};

/// A map from the vertices of one pattern into the vertices of another,
/// stored as `f[i]` = image of vertex `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternIso(Vec<usize>);

impl PatternIso {
    pub fn new(mapping: Vec<usize>) -> Self {
        PatternIso(mapping)
    }

    pub fn identity(n: usize) -> Self {
        PatternIso((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self, v: usize) -> usize {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// True when this is a bijection on `0..len`.
    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        for &v in &self.0 {
            if v >= seen.len() || std::mem::replace(&mut seen[v], true) {
                return false;
            }
        }
        true
    }

    /// `self ∘ inner`: first apply `inner`, then `self`.
    pub fn after(&self, inner: &PatternIso) -> PatternIso {
        PatternIso(inner.0.iter().map(|&v| self.0[v]).collect())
    }

    /// Inverse of a permutation.
    pub fn inverse(&self) -> PatternIso {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        PatternIso(inv)
    }

    /// Lexicographically smallest element of the coset `self ∘ Aut(source)`.
    pub fn coset_representative(&self, source_automorphisms: &[PatternIso]) -> PatternIso {
        source_automorphisms.iter().map(|a| self.after(a)).min().unwrap_or_else(|| self.clone())
    }
}

impl fmt::Debug for PatternIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Every subgraph isomorphism from `p` into `q`: injective, label-preserving,
/// edges to edges and anti-edges to anti-edges. Lexicographic order.
pub fn enumerate_subiso_raw(p: &Pattern, q: &Pattern) -> Vec<PatternIso> {
    let mut out = Vec::new();
    if p.vertex_count() > q.vertex_count() {
        return out;
    }
    if p.is_labeled() != q.is_labeled() && p.is_labeled() {
        return out;
    }
    let mut mapping = Vec::with_capacity(p.vertex_count());
    extend_subiso(p, q, &mut mapping, 0u16, &mut out);
    out
}

fn extend_subiso(p: &Pattern, q: &Pattern, mapping: &mut Vec<usize>, used: u16, out: &mut Vec<PatternIso>) {
    let i = mapping.len();
    if i == p.vertex_count() {
        out.push(PatternIso(mapping.clone()));
        return;
    }
    for j in 0..q.vertex_count() {
        if used & (1 << j) != 0 {
            continue;
        }
        if let Some(l) = p.label(i) {
            if q.label(j) != Some(l) {
                continue;
            }
        }
        let consistent = mapping.iter().enumerate().all(|(k, &fk)| {
            (!p.has_edge(k, i) || q.has_edge(fk, j)) && (!p.has_anti_edge(k, i) || q.has_anti_edge(fk, j))
        });
        if consistent {
            mapping.push(j);
            extend_subiso(p, q, mapping, used | (1 << j), out);
            mapping.pop();
        }
    }
}

/// φ(p, q) modulo the automorphisms of `p`: one representative per coset
/// `f ∘ Aut(p)`, namely its lexicographically smallest member. The size of the
/// result is the number of distinct matches of `p` inside one match of `q`.
pub fn enumerate_subiso(p: &Pattern, q: &Pattern) -> Vec<PatternIso> {
    let auts = automorphisms(p);
    enumerate_subiso_raw(p, q)
        .into_iter()
        .filter(|f| auts.iter().all(|a| f.after(a) >= *f))
        .collect()
}

/// Non-isomorphic edge-induced superpatterns of `p` on the same vertex set,
/// obtained by adding one or more edges. Anti-edges of `p` are ignored and
/// labels are kept. Ordered by canonical form; each pattern keeps the vertex
/// numbering of `p`.
pub fn superpatterns(p: &Pattern) -> Vec<Pattern> {
    let base = p.edge_variant();
    let n = base.vertex_count();
    let missing: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| !base.has_edge(u, v)).collect();
    let mut found = BTreeMap::new();
    for subset in 1u64..(1u64 << missing.len()) {
        let mut q = base.clone();
        for (i, &(u, v)) in missing.iter().enumerate() {
            if subset & (1 << i) != 0 {
                q = q.with_edge(u, v).expect("endpoints are in range");
            }
        }
        let (code, _) = canonical_labeling(&q);
        found.entry(code).or_insert(q);
    }
    found.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::canonicalize;

    fn tailed_triangle() -> Pattern {
        Pattern::new(4, &[(0, 1), (1, 2), (2, 0), (2, 3)], &[], None).unwrap()
    }

    fn chordal_c4() -> Pattern {
        Pattern::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], &[], None).unwrap()
    }

    #[test]
    fn cycle_into_clique_has_three_unique_maps() {
        let phi = enumerate_subiso(&Pattern::cycle(4), &Pattern::clique(4));
        assert_eq!(phi.len(), 3);
        assert_eq!(enumerate_subiso_raw(&Pattern::cycle(4), &Pattern::clique(4)).len(), 24);
    }

    #[test]
    fn tailed_triangle_into_chordal_cycle_has_four() {
        assert_eq!(enumerate_subiso(&tailed_triangle(), &chordal_c4().vertex_variant()).len(), 4);
        assert_eq!(enumerate_subiso(&tailed_triangle(), &chordal_c4()).len(), 4);
    }

    #[test]
    fn self_map_is_single_identity_coset() {
        for p in [Pattern::cycle(4), tailed_triangle(), Pattern::clique(3), Pattern::star(4).vertex_variant()] {
            let phi = enumerate_subiso(&p, &p);
            assert_eq!(phi, vec![PatternIso::identity(p.vertex_count())]);
        }
    }

    #[test]
    fn triangle_does_not_embed_in_induced_cycle() {
        assert!(enumerate_subiso(&Pattern::clique(3), &Pattern::cycle(4).vertex_variant()).is_empty());
        // anti-edges must land on anti-edges
        assert!(enumerate_subiso(&Pattern::path(3).vertex_variant(), &Pattern::clique(3)).is_empty());
    }

    #[test]
    fn smaller_pattern_into_larger() {
        // wedge into a 4-cycle: 4 centers, one coset each
        assert_eq!(enumerate_subiso(&Pattern::path(3), &Pattern::cycle(4)).len(), 4);
    }

    #[test]
    fn superpatterns_of_cycle() {
        let sup = superpatterns(&Pattern::cycle(4));
        let codes: Vec<_> = sup.iter().map(canonicalize).collect();
        assert_eq!(sup.len(), 2);
        assert!(codes.contains(&canonicalize(&chordal_c4())));
        assert!(codes.contains(&canonicalize(&Pattern::clique(4))));
        for q in &sup {
            assert!(!enumerate_subiso(&Pattern::cycle(4), q).is_empty());
        }
    }

    #[test]
    fn superpatterns_edge_cases() {
        assert!(superpatterns(&Pattern::clique(4)).is_empty());
        let sup = superpatterns(&Pattern::path(3));
        assert_eq!(sup.len(), 1);
        assert!(sup[0].is_clique());
        let labeled = Pattern::path(3).with_labels(vec![1, 2, 3]).unwrap();
        assert_eq!(superpatterns(&labeled)[0].labels(), Some(&[1, 2, 3][..]));
    }

    #[test]
    fn composition_and_inverse() {
        let f = PatternIso::new(vec![2, 0, 1]);
        let g = PatternIso::new(vec![1, 2, 0]);
        assert!(f.after(&f.inverse()).is_identity());
        assert_eq!(f.after(&g), PatternIso::new(vec![0, 1, 2]));
        assert!(!PatternIso::new(vec![0, 0]).is_permutation());
    }
}
