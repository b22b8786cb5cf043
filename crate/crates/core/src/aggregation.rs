//! Aggregations over match sets: a per-match value `λ`, a commutative
//! combine `⊕`, and a permute operator `∘*` satisfying
//! `λ(m ∘ f) = λ(m) ∘* f`, where `(m ∘ f)[i] = m[f(i)]`.

use std::collections::BTreeSet;
use std::fmt::{self, Debug};

use thiserror::Error;

use crate::graph::{DataGraph, VertexId};
use crate::matcher::{fold_matches, Match, MatchStats, MatchingPlan};
use crate::pattern::{automorphisms, orbits, Pattern, PatternIso};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AggregationError {
    #[error("permutation has arity {got}, value has arity {expected}")]
    Arity { expected: usize, got: usize },
    #[error("mapping {0:?} is not a permutation")]
    NotPermutation(Vec<usize>),
    #[error("aggregator `{0}` has no inverse for its combine operator")]
    NotInvertible(&'static str),
    #[error("subtraction removes values that were never added")]
    Underflow,
}

/// Whether converting a value through one isomorphism costs a constant or
/// grows with the data graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConversionScale {
    Constant,
    PerVertex,
}

pub trait Aggregator: Sync {
    type Value: Clone + Debug + PartialEq + Send + Sync;

    fn name(&self) -> &'static str;

    /// Identity of `⊕` for values over `pattern`.
    fn empty(&self, pattern: &Pattern) -> Self::Value;

    /// `acc ← acc ⊕ λ(m)`.
    fn accumulate(&self, acc: &mut Self::Value, m: &[VertexId]);

    fn combine(&self, a: Self::Value, b: Self::Value) -> Self::Value;

    /// `v ∘* f` where `f` maps the vertices of `target` onto the vertices of
    /// the pattern `v` was computed for.
    fn permute(&self, v: &Self::Value, f: &PatternIso, target: &Pattern) -> Result<Self::Value, AggregationError>;

    fn is_invertible(&self) -> bool;

    /// `acc ⊖ other`, exact inverse of `⊕` for invertible aggregators.
    fn subtract(&self, acc: Self::Value, other: &Self::Value, target: &Pattern) -> Result<Self::Value, AggregationError>;

    /// Brings a final value into a form that does not depend on which match
    /// represents each automorphism class.
    fn finalize(&self, v: Self::Value, _pattern: &Pattern) -> Self::Value {
        v
    }

    /// The scalar reported for a pattern (count, support or list length).
    fn scalar(&self, v: &Self::Value) -> u64;

    fn conversion_scale(&self) -> ConversionScale;

    /// `λ(m)` on its own.
    fn lambda(&self, pattern: &Pattern, m: &[VertexId]) -> Self::Value {
        let mut v = self.empty(pattern);
        self.accumulate(&mut v, m);
        v
    }
}

fn check_permutation(f: &PatternIso, arity: usize) -> Result<(), AggregationError> {
    if f.len() != arity {
        return Err(AggregationError::Arity { expected: arity, got: f.len() });
    }
    if !f.is_permutation() {
        return Err(AggregationError::NotPermutation(f.as_slice().to_vec()));
    }
    Ok(())
}

/// Aggregates every unique match of `p` in `g`.
pub fn aggregate<A: Aggregator>(agg: &A, p: &Pattern, g: &DataGraph) -> (A::Value, MatchStats) {
    let plan = MatchingPlan::new(p);
    aggregate_plan(agg, &plan, g)
}

pub fn aggregate_plan<A: Aggregator>(agg: &A, plan: &MatchingPlan, g: &DataGraph) -> (A::Value, MatchStats) {
    let p = plan.pattern();
    let (v, stats) = fold_matches(
        plan,
        g,
        None,
        || agg.empty(p),
        |acc, m| agg.accumulate(acc, m),
        |a, b| agg.combine(a, b),
    );
    (agg.finalize(v, p), stats)
}

pub fn permute_value<A: Aggregator>(
    agg: &A,
    v: &A::Value,
    f: &PatternIso,
    target: &Pattern,
) -> Result<A::Value, AggregationError> {
    agg.permute(v, f, target)
}

/// Counting: `λ(m) = 1`, `⊕ = +`, `∘*` is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct Count;

impl Aggregator for Count {
    type Value = u64;

    fn name(&self) -> &'static str {
        "count"
    }

    fn empty(&self, _pattern: &Pattern) -> u64 {
        0
    }

    fn accumulate(&self, acc: &mut u64, _m: &[VertexId]) {
        *acc += 1;
    }

    fn combine(&self, a: u64, b: u64) -> u64 {
        a + b
    }

    fn permute(&self, v: &u64, f: &PatternIso, target: &Pattern) -> Result<u64, AggregationError> {
        check_permutation(f, target.vertex_count())?;
        Ok(*v)
    }

    fn is_invertible(&self) -> bool {
        true
    }

    fn subtract(&self, acc: u64, other: &u64, _target: &Pattern) -> Result<u64, AggregationError> {
        acc.checked_sub(*other).ok_or(AggregationError::Underflow)
    }

    fn scalar(&self, v: &u64) -> u64 {
        *v
    }

    fn conversion_scale(&self) -> ConversionScale {
        ConversionScale::Constant
    }
}

/// Minimum-image table. Columns are kept per pattern vertex so that permuting
/// is exact for every single match; the orbit view merges the columns of each
/// automorphism orbit.
#[derive(Clone)]
pub struct MniTable {
    columns: Vec<BTreeSet<VertexId>>,
    orbits: Vec<usize>,
}

impl MniTable {
    pub fn new(pattern: &Pattern) -> Self {
        MniTable { columns: vec![BTreeSet::new(); pattern.vertex_count()], orbits: orbits(pattern) }
    }

    pub fn vertex_columns(&self) -> &[BTreeSet<VertexId>] {
        &self.columns
    }

    /// One column per orbit, ordered by orbit id (the orbit's smallest vertex).
    pub fn orbit_columns(&self) -> Vec<(usize, BTreeSet<VertexId>)> {
        let mut ids: Vec<usize> = self.orbits.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.into_iter()
            .map(|o| {
                let column = (0..self.columns.len())
                    .filter(|&v| self.orbits[v] == o)
                    .flat_map(|v| self.columns[v].iter().copied())
                    .collect();
                (o, column)
            })
            .collect()
    }

    /// Size of the smallest orbit column; 0 when there were no matches.
    pub fn support(&self) -> u64 {
        self.orbit_columns().iter().map(|(_, c)| c.len() as u64).min().unwrap_or(0)
    }

    /// `orbit<TAB>v1,v2,...` per orbit, vertices in original ids when a graph
    /// is supplied.
    pub fn to_tsv(&self, g: Option<&DataGraph>) -> String {
        let mut out = String::new();
        for (o, column) in self.orbit_columns() {
            let ids: Vec<String> = column
                .iter()
                .map(|&v| g.map_or(v as u64, |g| g.original_id(v)).to_string())
                .collect();
            out.push_str(&format!("{o}\t{}\n", ids.join(",")));
        }
        out
    }
}

impl PartialEq for MniTable {
    fn eq(&self, other: &Self) -> bool {
        self.orbits == other.orbits && self.orbit_columns() == other.orbit_columns()
    }
}

impl Debug for MniTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.orbit_columns()).finish()
    }
}

pub fn mni_support(t: &MniTable) -> u64 {
    t.support()
}

/// Minimum-image-based support for frequent subgraph mining.
#[derive(Debug, Clone, Copy, Default)]
pub struct Mni;

impl Aggregator for Mni {
    type Value = MniTable;

    fn name(&self) -> &'static str {
        "mni"
    }

    fn empty(&self, pattern: &Pattern) -> MniTable {
        MniTable::new(pattern)
    }

    fn accumulate(&self, acc: &mut MniTable, m: &[VertexId]) {
        for (column, &v) in acc.columns.iter_mut().zip(m) {
            column.insert(v);
        }
    }

    fn combine(&self, mut a: MniTable, mut b: MniTable) -> MniTable {
        for (x, y) in a.columns.iter_mut().zip(b.columns.iter_mut()) {
            if x.len() < y.len() {
                std::mem::swap(x, y);
            }
            x.append(y);
        }
        a
    }

    fn permute(&self, v: &MniTable, f: &PatternIso, target: &Pattern) -> Result<MniTable, AggregationError> {
        check_permutation(f, v.columns.len())?;
        check_permutation(f, target.vertex_count())?;
        Ok(MniTable {
            columns: (0..f.len()).map(|i| v.columns[f.image(i)].clone()).collect(),
            orbits: orbits(target),
        })
    }

    fn is_invertible(&self) -> bool {
        false
    }

    fn subtract(&self, _acc: MniTable, _other: &MniTable, _target: &Pattern) -> Result<MniTable, AggregationError> {
        Err(AggregationError::NotInvertible(self.name()))
    }

    fn scalar(&self, v: &MniTable) -> u64 {
        v.support()
    }

    fn conversion_scale(&self) -> ConversionScale {
        ConversionScale::PerVertex
    }
}

/// Enumeration: every match, as a multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchList {
    pub arity: usize,
    pub matches: Vec<Match>,
}

impl MatchList {
    pub fn len(&self) -> usize {
        self.matches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }

    /// Replaces each match by the smallest `m ∘ a` over automorphisms `a` of
    /// `pattern` and sorts, so equal match sets compare equal.
    pub fn normalized(mut self, pattern: &Pattern) -> Self {
        let auts = automorphisms(pattern);
        for m in &mut self.matches {
            *m = canonical_match(m, &auts);
        }
        self.matches.sort_unstable();
        self
    }
}

fn canonical_match(m: &[VertexId], auts: &[PatternIso]) -> Match {
    auts.iter()
        .map(|a| (0..m.len()).map(|i| m[a.image(i)]).collect::<Match>())
        .min()
        .expect("automorphism group contains the identity")
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Enumerate;

impl Aggregator for Enumerate {
    type Value = MatchList;

    fn name(&self) -> &'static str {
        "enumerate"
    }

    fn empty(&self, pattern: &Pattern) -> MatchList {
        MatchList { arity: pattern.vertex_count(), matches: Vec::new() }
    }

    fn accumulate(&self, acc: &mut MatchList, m: &[VertexId]) {
        acc.matches.push(m.to_vec());
    }

    fn combine(&self, mut a: MatchList, mut b: MatchList) -> MatchList {
        if a.matches.len() < b.matches.len() {
            std::mem::swap(&mut a, &mut b);
        }
        a.matches.append(&mut b.matches);
        a
    }

    fn permute(&self, v: &MatchList, f: &PatternIso, target: &Pattern) -> Result<MatchList, AggregationError> {
        check_permutation(f, v.arity)?;
        check_permutation(f, target.vertex_count())?;
        let matches = v.matches.iter().map(|m| (0..f.len()).map(|i| m[f.image(i)]).collect()).collect();
        Ok(MatchList { arity: v.arity, matches })
    }

    fn is_invertible(&self) -> bool {
        true
    }

    fn subtract(&self, acc: MatchList, other: &MatchList, target: &Pattern) -> Result<MatchList, AggregationError> {
        let acc = acc.normalized(target);
        let other = other.clone().normalized(target);
        let mut out = Vec::with_capacity(acc.matches.len());
        let mut removing = other.matches.iter().peekable();
        for m in acc.matches {
            if removing.peek() == Some(&&m) {
                removing.next();
            } else {
                out.push(m);
            }
        }
        if removing.next().is_some() {
            return Err(AggregationError::Underflow);
        }
        Ok(MatchList { arity: acc.arity, matches: out })
    }

    fn finalize(&self, v: MatchList, pattern: &Pattern) -> MatchList {
        v.normalized(pattern)
    }

    fn scalar(&self, v: &MatchList) -> u64 {
        v.matches.len() as u64
    }

    fn conversion_scale(&self) -> ConversionScale {
        ConversionScale::PerVertex
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star3() -> DataGraph {
        DataGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)], None).unwrap()
    }

    #[test]
    fn count_triangles_in_clique() {
        let g = DataGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], None).unwrap();
        assert_eq!(aggregate(&Count, &Pattern::clique(3), &g).0, 4);
        assert_eq!(aggregate(&Enumerate, &Pattern::cycle(4), &g).0.len(), 3);
    }

    #[test]
    fn wedge_on_star_table() {
        let wedge = Pattern::path(3);
        let (t, _) = aggregate(&Mni, &wedge, &star3());
        let cols = t.orbit_columns();
        assert_eq!(cols.len(), 2);
        assert_eq!(cols[0], (0, [1, 2, 3].into_iter().collect()));
        assert_eq!(cols[1], (1, [0].into_iter().collect()));
        assert_eq!(mni_support(&t), 1);
        assert_eq!(t.to_tsv(None), "0\t1,2,3\n1\t0\n");
    }

    #[test]
    fn wedge_leaf_swap_keeps_table() {
        let wedge = Pattern::path(3);
        let (t, _) = aggregate(&Mni, &wedge, &star3());
        let swap = PatternIso::new(vec![2, 1, 0]);
        assert_eq!(Mni.permute(&t, &swap, &wedge).unwrap(), t);
        assert_eq!(Mni.permute(&t, &PatternIso::identity(3), &wedge).unwrap(), t);
    }

    #[test]
    fn empty_table_support_is_zero() {
        assert_eq!(MniTable::new(&Pattern::clique(3)).support(), 0);
    }

    #[test]
    fn count_permute_is_identity_and_checks_arity() {
        let p = Pattern::path(3);
        assert_eq!(Count.permute(&7, &PatternIso::new(vec![2, 0, 1]), &p), Ok(7));
        assert!(matches!(
            Count.permute(&7, &PatternIso::identity(4), &p),
            Err(AggregationError::Arity { expected: 3, got: 4 })
        ));
        assert!(matches!(
            Count.permute(&7, &PatternIso::new(vec![0, 0, 1]), &p),
            Err(AggregationError::NotPermutation(_))
        ));
    }

    #[test]
    fn subtraction() {
        let p = Pattern::path(3);
        assert_eq!(Count.subtract(5, &3, &p), Ok(2));
        assert_eq!(Count.subtract(1, &3, &p), Err(AggregationError::Underflow));
        let all = MatchList { arity: 3, matches: vec![vec![1, 0, 2], vec![3, 0, 1]] };
        let some = MatchList { arity: 3, matches: vec![vec![2, 0, 1]] };
        let rest = Enumerate.subtract(all.clone(), &some, &p).unwrap();
        assert_eq!(rest.matches, vec![vec![1, 0, 3]]);
        assert_eq!(Enumerate.subtract(some, &all, &p), Err(AggregationError::Underflow));
        assert!(Mni.subtract(MniTable::new(&p), &MniTable::new(&p), &p).is_err());
    }
}
