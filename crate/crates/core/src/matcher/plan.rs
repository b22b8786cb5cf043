use crate::pattern::{automorphisms, Label, Pattern, PatternIso};

/// One binding step of the backtracking search. All vertex references are
/// depths (positions in the matching order) of already-bound vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Step {
    pub vertex: usize,
    pub neighbors: Vec<usize>,
    pub anti: Vec<usize>,
    /// Data vertex bound here must exceed the ones bound at these depths.
    pub above: Vec<usize>,
    /// Data vertex bound here must be below the ones bound at these depths.
    pub below: Vec<usize>,
    pub label: Option<Label>,
}

/// Vertex order and symmetry-breaking constraints for one pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingPlan {
    pattern: Pattern,
    order: Vec<usize>,
    constraints: Vec<(usize, usize)>,
    pub(crate) steps: Vec<Step>,
}

impl MatchingPlan {
    pub fn new(pattern: &Pattern) -> Self {
        let order = matching_order(pattern);
        let constraints = symmetry_constraints(pattern, &order);
        let mut depth_of = vec![0; pattern.vertex_count()];
        for (d, &v) in order.iter().enumerate() {
            depth_of[v] = d;
        }
        let steps = order
            .iter()
            .enumerate()
            .map(|(d, &v)| {
                let earlier = |keep: &dyn Fn(usize) -> bool| -> Vec<usize> {
                    order[..d].iter().enumerate().filter(|&(_, &u)| keep(u)).map(|(du, _)| du).collect()
                };
                Step {
                    vertex: v,
                    neighbors: earlier(&|u| pattern.has_edge(u, v)),
                    anti: earlier(&|u| pattern.has_anti_edge(u, v)),
                    above: constraints
                        .iter()
                        .filter(|&&(lo, hi)| hi == v && depth_of[lo] < d)
                        .map(|&(lo, _)| depth_of[lo])
                        .collect(),
                    below: constraints
                        .iter()
                        .filter(|&&(lo, hi)| lo == v && depth_of[hi] < d)
                        .map(|&(_, hi)| depth_of[hi])
                        .collect(),
                    label: pattern.label(v),
                }
            })
            .collect();
        MatchingPlan { pattern: pattern.clone(), order, constraints, steps }
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    /// Pattern vertices in binding order. Every vertex after the first has an
    /// earlier neighbor.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Pairs `(a, b)` of pattern vertices requiring `m[a] < m[b]`.
    pub fn symmetry_constraints(&self) -> &[(usize, usize)] {
        &self.constraints
    }
}

/// Highest degree first, then repeatedly the vertex with the most bound
/// neighbors (ties: more bound anti-neighbors, higher degree, lower index).
fn matching_order(p: &Pattern) -> Vec<usize> {
    let n = p.vertex_count();
    let first = (0..n).max_by_key(|&v| (p.degree(v), std::cmp::Reverse(v))).expect("non-empty pattern");
    let mut order = vec![first];
    let mut placed = 1u16 << first;
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| placed & (1 << v) == 0)
            .max_by_key(|&v| {
                let bound = (p.edge_mask(v) & placed).count_ones();
                let bound_anti = (p.anti_mask(v) & placed).count_ones();
                (bound, bound_anti, p.degree(v), std::cmp::Reverse(v))
            })
            .expect("unplaced vertex exists");
        debug_assert!(p.edge_mask(next) & placed != 0, "connected pattern");
        order.push(next);
        placed |= 1 << next;
    }
    order
}

/// Walks the stabilizer chain of the automorphism group along `order`: a
/// vertex with a non-trivial orbit is forced below every other member of its
/// orbit, then the group shrinks to the vertex's stabilizer.
fn symmetry_constraints(p: &Pattern, order: &[usize]) -> Vec<(usize, usize)> {
    let mut group: Vec<PatternIso> = automorphisms(p);
    let mut constraints = Vec::new();
    for &v in order {
        if group.len() == 1 {
            break;
        }
        let mut orbit: Vec<usize> = group.iter().map(|a| a.image(v)).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &u in orbit.iter().filter(|&&u| u != v) {
            constraints.push((v, u));
        }
        group.retain(|a| a.image(v) == v);
    }
    constraints
}
