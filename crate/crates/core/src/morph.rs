//! Morph equations: the matches of one pattern expressed as a signed
//! combination of the matches of other patterns on the same vertex count,
//! each composed with subgraph isomorphisms.
//!
//! A term `(q, f, c)` of an equation for target `p` stands for `c` copies of
//! `M(q) ∘ f`, where `f` maps the vertices of `p` onto those of `q`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::aggregation::{AggregationError, Aggregator};
use crate::graph::DataGraph;
use crate::matcher::{fold_matches, MatchStats, MatchingPlan};
use crate::pattern::{
    automorphisms, canonical_labeling, canonicalize, enumerate_subiso, superpatterns, CanonicalForm, Pattern,
    PatternIso,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphError {
    #[error("pattern {0} is not edge-induced")]
    NotEdgeInduced(String),
    #[error("pattern {0} is not vertex-induced")]
    NotVertexInduced(String),
    #[error("cyclic substitution through pattern {0}")]
    Cyclic(String),
    #[error("no result supplied for executed pattern {0}")]
    MissingResult(String),
    #[error("plan subtracts results but aggregator `{0}` cannot subtract")]
    NotInvertible(&'static str),
    #[error(transparent)]
    Aggregation(#[from] AggregationError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphTerm {
    pub pattern: Pattern,
    /// Isomorphisms from the target into `pattern` with signed multiplicities,
    /// sorted by isomorphism.
    pub isos: Vec<(PatternIso, i64)>,
}

impl MorphTerm {
    fn uniform(pattern: Pattern, isos: Vec<PatternIso>, sign: i64) -> Self {
        MorphTerm { pattern, isos: isos.into_iter().map(|f| (f, sign)).collect() }
    }

    /// Net multiplicity of the term.
    pub fn coefficient(&self) -> i64 {
        self.isos.iter().map(|(_, c)| c).sum()
    }

    pub fn has_negative(&self) -> bool {
        self.isos.iter().any(|&(_, c)| c < 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphEquation {
    pub target: Pattern,
    pub terms: Vec<MorphTerm>,
}

impl MorphEquation {
    /// `M(p) = M(p)`.
    pub fn identity(p: &Pattern) -> Self {
        MorphEquation {
            target: p.clone(),
            terms: vec![MorphTerm::uniform(p.clone(), vec![PatternIso::identity(p.vertex_count())], 1)],
        }
    }

    /// A single term, isomorphic to the target, taken once.
    pub fn is_identity(&self) -> bool {
        match self.terms.as_slice() {
            [t] => t.isos.len() == 1 && t.isos[0].1 == 1 && canonicalize(&t.pattern) == canonicalize(&self.target),
            _ => false,
        }
    }

    pub fn has_negative_terms(&self) -> bool {
        self.terms.iter().any(MorphTerm::has_negative)
    }

    /// Number of permute-and-combine steps conversion performs.
    pub fn iso_count(&self) -> u64 {
        self.terms.iter().flat_map(|t| &t.isos).map(|(_, c)| c.unsigned_abs()).sum()
    }

    /// Merges isomorphic terms. Term patterns become canonical
    /// representatives, isomorphisms coset representatives modulo the
    /// target's automorphisms, and terms with no net contribution vanish.
    pub fn canonicalized(&self) -> MorphEquation {
        let raw = self.terms.iter().flat_map(|t| t.isos.iter().map(move |(f, c)| (&t.pattern, f.clone(), *c)));
        normalize(&self.target, raw)
    }

    /// `TARGET = ±COEFF*CODE ...`, terms ordered by canonical code.
    pub fn dump(&self) -> String {
        let eq = self.canonicalized();
        let mut out = format!("{} =", canonicalize(&eq.target));
        for t in &eq.terms {
            let c = t.coefficient();
            let _ = write!(out, " {}{}*{}", if c < 0 { '-' } else { '+' }, c.unsigned_abs(), canonicalize(&t.pattern));
        }
        out
    }
}

fn normalize<'a>(target: &Pattern, raw: impl Iterator<Item = (&'a Pattern, PatternIso, i64)>) -> MorphEquation {
    let target_auts = automorphisms(target);
    let mut merged: BTreeMap<CanonicalForm, (Pattern, BTreeMap<PatternIso, i64>)> = BTreeMap::new();
    let mut labelings: BTreeMap<&Pattern, (CanonicalForm, PatternIso)> = BTreeMap::new();
    for (pattern, f, c) in raw {
        let (code, tau) = labelings
            .entry(pattern)
            .or_insert_with(|| {
                let (code, perm) = canonical_labeling(pattern);
                (code, PatternIso::new(perm))
            })
            .clone();
        let entry = merged.entry(code).or_insert_with(|| (pattern.permuted(tau.as_slice()), BTreeMap::new()));
        let h = tau.after(&f).coset_representative(&target_auts);
        *entry.1.entry(h).or_insert(0) += c;
    }
    let terms = merged
        .into_values()
        .filter_map(|(pattern, isos)| {
            let isos: Vec<_> = isos.into_iter().filter(|&(_, c)| c != 0).collect();
            (!isos.is_empty()).then_some(MorphTerm { pattern, isos })
        })
        .collect();
    MorphEquation { target: target.clone(), terms }
}

/// `M(pᴱ)` as the disjoint union of `M(pⱽ)` and `M(qⱽ) ∘ φ(pᴱ, qᴱ)` over
/// every same-size superpattern `q`.
pub fn morph_edge_to_vertex(p: &Pattern) -> Result<MorphEquation, MorphError> {
    if !p.is_edge_induced() {
        return Err(MorphError::NotEdgeInduced(p.to_string()));
    }
    let n = p.vertex_count();
    let mut terms = vec![MorphTerm::uniform(p.vertex_variant(), vec![PatternIso::identity(n)], 1)];
    if !p.is_clique() {
        for q in superpatterns(p) {
            let phi = enumerate_subiso(p, &q);
            terms.push(MorphTerm::uniform(q.vertex_variant(), phi, 1));
        }
    }
    Ok(MorphEquation { target: p.clone(), terms })
}

/// `M(pⱽ)` as `M(pᴱ)` minus the superpattern terms of the opposite direction.
pub fn morph_vertex_to_edge(p: &Pattern) -> Result<MorphEquation, MorphError> {
    if !p.is_vertex_induced() {
        return Err(MorphError::NotVertexInduced(p.to_string()));
    }
    let pe = p.edge_variant();
    let n = p.vertex_count();
    let mut terms = vec![MorphTerm::uniform(pe.clone(), vec![PatternIso::identity(n)], 1)];
    if !p.is_clique() {
        for q in superpatterns(&pe) {
            let phi = enumerate_subiso(&pe, &q);
            terms.push(MorphTerm::uniform(q.vertex_variant(), phi, -1));
        }
    }
    Ok(MorphEquation { target: p.clone(), terms })
}

/// The equation obtained by morphing `p` in its natural direction: edge- to
/// vertex-induced for edge-induced patterns, the reverse for vertex-induced
/// ones. Patterns with only some anti-edges are not morphable.
pub fn morph(p: &Pattern) -> Result<MorphEquation, MorphError> {
    if p.is_edge_induced() {
        morph_edge_to_vertex(p)
    } else {
        morph_vertex_to_edge(p)
    }
}

/// Replaces every term whose pattern has a chosen equation by that
/// equation's right-hand side, recursively, composing isomorphisms and
/// multiplying coefficients. `choices` is keyed by canonical form; identity
/// choices leave terms in place. Substitution that leads back to a pattern
/// being expanded is rejected.
pub fn substitute(
    eq: &MorphEquation,
    choices: &BTreeMap<CanonicalForm, MorphEquation>,
) -> Result<MorphEquation, MorphError> {
    let mut stack = Vec::new();
    if !eq.is_identity() {
        stack.push(canonicalize(&eq.target));
    }
    let mut memo = BTreeMap::new();
    substitute_inner(&eq.canonicalized(), choices, &mut stack, &mut memo)
}

fn substitute_inner(
    eq: &MorphEquation,
    choices: &BTreeMap<CanonicalForm, MorphEquation>,
    stack: &mut Vec<CanonicalForm>,
    memo: &mut BTreeMap<CanonicalForm, Option<MorphEquation>>,
) -> Result<MorphEquation, MorphError> {
    let mut raw: Vec<(Pattern, PatternIso, i64)> = Vec::new();
    for term in &eq.terms {
        match expand(&term.pattern, choices, stack, memo)? {
            None => raw.extend(term.isos.iter().map(|(f, c)| (term.pattern.clone(), f.clone(), *c))),
            Some(sub) => {
                for (f, c) in &term.isos {
                    for s in &sub.terms {
                        for (g, d) in &s.isos {
                            raw.push((s.pattern.clone(), g.after(f), c * d));
                        }
                    }
                }
            }
        }
    }
    Ok(normalize(&eq.target, raw.iter().map(|(p, f, c)| (p, f.clone(), *c))))
}

/// Fully substituted equation for a canonical term pattern, or `None` when
/// the pattern is executed directly.
fn expand(
    pattern: &Pattern,
    choices: &BTreeMap<CanonicalForm, MorphEquation>,
    stack: &mut Vec<CanonicalForm>,
    memo: &mut BTreeMap<CanonicalForm, Option<MorphEquation>>,
) -> Result<Option<MorphEquation>, MorphError> {
    let code = canonicalize(pattern);
    if let Some(done) = memo.get(&code) {
        return Ok(done.clone());
    }
    if stack.contains(&code) {
        return Err(MorphError::Cyclic(pattern.to_string()));
    }
    let Some(choice) = choices.get(&code).filter(|c| !c.is_identity()) else {
        return Ok(None);
    };
    stack.push(code.clone());
    // re-root the choice on the canonical pattern: a match of `pattern` is a
    // match of the choice's target composed with the isomorphism between them
    let tau = PatternIso::new(canonical_labeling(&choice.target).1);
    let back = tau.inverse();
    let rooted = MorphEquation {
        target: pattern.clone(),
        terms: choice
            .terms
            .iter()
            .map(|t| MorphTerm { pattern: t.pattern.clone(), isos: t.isos.iter().map(|(h, c)| (h.after(&back), *c)).collect() })
            .collect(),
    };
    let result = substitute_inner(&rooted.canonicalized(), choices, stack, memo)?;
    stack.pop();
    memo.insert(code, Some(result.clone()));
    Ok(Some(result))
}

/// The patterns actually matched and, for every requested pattern, its
/// equation over them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphPlan {
    pub requested: Vec<Pattern>,
    /// Canonical representatives, ordered by canonical form.
    pub execute: Vec<Pattern>,
    /// One per requested pattern, in the same order; every term pattern is a
    /// member of `execute`.
    pub equations: Vec<MorphEquation>,
}

impl MorphPlan {
    /// Matches every requested pattern directly.
    pub fn direct(requested: &[Pattern]) -> Self {
        Self::from_choices(requested, &BTreeMap::new()).expect("identity plans are acyclic")
    }

    /// Substitutes `choices` into the identity equation of every requested
    /// pattern.
    pub fn from_choices(
        requested: &[Pattern],
        choices: &BTreeMap<CanonicalForm, MorphEquation>,
    ) -> Result<Self, MorphError> {
        let mut memo = BTreeMap::new();
        let mut equations = Vec::with_capacity(requested.len());
        for p in requested {
            let eq = substitute_inner(&MorphEquation::identity(p).canonicalized(), choices, &mut Vec::new(), &mut memo)?;
            equations.push(eq);
        }
        let mut execute: BTreeMap<CanonicalForm, Pattern> = BTreeMap::new();
        for eq in &equations {
            for t in &eq.terms {
                execute.entry(canonicalize(&t.pattern)).or_insert_with(|| t.pattern.clone());
            }
        }
        Ok(MorphPlan { requested: requested.to_vec(), execute: execute.into_values().collect(), equations })
    }

    pub fn has_negative_terms(&self) -> bool {
        self.equations.iter().any(MorphEquation::has_negative_terms)
    }

    /// Whether every requested pattern is matched as is.
    pub fn is_direct(&self) -> bool {
        self.equations.iter().all(MorphEquation::is_identity)
    }

    /// One equation per line, ordered by target code.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self.equations.iter().map(MorphEquation::dump).collect();
        lines.sort();
        lines.dedup();
        lines.iter().map(|l| format!("{l}\n")).collect()
    }
}

/// Combines the results of the executed patterns into results for the
/// requested ones. Positive contributions are folded before negative ones
/// are removed, so invertible aggregators never see intermediate underflow.
pub fn convert_results<A: Aggregator>(
    plan: &MorphPlan,
    agg: &A,
    results: &BTreeMap<CanonicalForm, A::Value>,
) -> Result<Vec<A::Value>, MorphError> {
    if plan.has_negative_terms() && !agg.is_invertible() {
        return Err(MorphError::NotInvertible(agg.name()));
    }
    plan.equations
        .iter()
        .map(|eq| {
            let target = &eq.target;
            let mut positive = agg.empty(target);
            let mut negative = agg.empty(target);
            for t in &eq.terms {
                let value = results
                    .get(&canonicalize(&t.pattern))
                    .ok_or_else(|| MorphError::MissingResult(t.pattern.to_string()))?;
                for (f, c) in &t.isos {
                    let permuted = agg.permute(value, f, target)?;
                    let acc = if *c > 0 { &mut positive } else { &mut negative };
                    for _ in 0..c.unsigned_abs() {
                        let taken = std::mem::replace(acc, agg.empty(target));
                        *acc = agg.combine(taken, permuted.clone());
                    }
                }
            }
            let value = if eq.has_negative_terms() { agg.subtract(positive, &negative, target)? } else { positive };
            Ok(agg.finalize(value, target))
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Timing {
    /// Matching with the aggregation function applied inline.
    pub matching: Duration,
    /// Bringing executed values into their final form.
    pub aggregation: Duration,
    pub conversion: Duration,
}

#[derive(Debug, Clone)]
pub struct Execution<V> {
    /// Aligned with the plan's requested patterns.
    pub values: Vec<V>,
    /// Aligned with the plan's executed patterns.
    pub stats: Vec<MatchStats>,
    pub timing: Timing,
}

impl<V> Execution<V> {
    pub fn total_stats(&self) -> MatchStats {
        let mut total = MatchStats::default();
        for s in &self.stats {
            total += s;
        }
        total
    }
}

/// Matches every executed pattern and converts.
pub fn execute_plan<A: Aggregator>(plan: &MorphPlan, agg: &A, g: &DataGraph) -> Result<Execution<A::Value>, MorphError> {
    if plan.has_negative_terms() && !agg.is_invertible() {
        return Err(MorphError::NotInvertible(agg.name()));
    }
    let mut timing = Timing::default();
    let mut results = BTreeMap::new();
    let mut stats = Vec::with_capacity(plan.execute.len());
    for p in &plan.execute {
        let start = Instant::now();
        let matching_plan = MatchingPlan::new(p);
        let (value, s) =
            fold_matches(&matching_plan, g, None, || agg.empty(p), |acc, m| agg.accumulate(acc, m), |a, b| agg.combine(a, b));
        timing.matching += start.elapsed();
        let start = Instant::now();
        let value = agg.finalize(value, p);
        timing.aggregation += start.elapsed();
        results.insert(canonicalize(p), value);
        stats.push(s);
    }
    let start = Instant::now();
    let values = convert_results(plan, agg, &results)?;
    timing.conversion = start.elapsed();
    Ok(Execution { values, stats, timing })
}
