//! End-user applications built on the morphing pipeline: motif counting,
//! frequent subgraph mining and pattern matching.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::aggregation::{Aggregator, Count, Enumerate, Mni};
use crate::cost::{choose_plan, CostConfig, CostError, Mode, SampledCostModel};
use crate::graph::DataGraph;
use crate::morph::{execute_plan, MorphError, Timing};
use crate::pattern::{canonical_labeling, canonicalize, connected_patterns, Label, Pattern, MAX_PATTERN_VERTICES};

pub const MOTIF_SIZES: std::ops::RangeInclusive<usize> = 3..=5;
pub const MAX_FSM_EDGES: usize = MAX_PATTERN_VERTICES - 1;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("motif size {0} out of range (3 to 5)")]
    MotifSize(usize),
    #[error("FSM edge count {0} out of range (1 to {MAX_FSM_EDGES})")]
    FsmSize(usize),
    #[error("support threshold must be at least 1")]
    Support,
    #[error("no patterns given")]
    NoPatterns,
    #[error("pattern {pattern} has {size} vertices but the graph only {vertices}")]
    PatternTooLarge { pattern: String, size: usize, vertices: usize },
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Morph(#[from] MorphError),
}

/// How patterns without explicit anti-edges are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Induced {
    #[default]
    Edge,
    Vertex,
}

/// Settings shared by every application.
#[derive(Debug, Clone, Default)]
pub struct JobConfig {
    pub mode: Mode,
    pub seed: u64,
    pub cost: CostConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResultRow {
    pub code: String,
    pub description: String,
    pub value: u64,
    /// Matches in original vertex ids, when enumerating.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches: Option<Vec<Vec<u64>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReportTiming {
    pub planning_ms: f64,
    pub matching_ms: f64,
    pub aggregation_ms: f64,
    pub conversion_ms: f64,
}

impl ReportTiming {
    fn add(&mut self, planning: Duration, t: &Timing) {
        let ms = |d: Duration| d.as_secs_f64() * 1e3;
        self.planning_ms += ms(planning);
        self.matching_ms += ms(t.matching);
        self.aggregation_ms += ms(t.aggregation);
        self.conversion_ms += ms(t.conversion);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultReport {
    pub command: String,
    pub mode: Mode,
    /// Provenance of every plan run, in execution order.
    pub provenance: Vec<String>,
    /// Sorted by canonical code.
    pub rows: Vec<ResultRow>,
    pub timing: ReportTiming,
    /// Total matcher work across all executed patterns.
    pub work: u64,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub explain: String,
}

impl ResultReport {
    fn new(command: &str, mode: Mode) -> Self {
        ResultReport {
            command: command.to_string(),
            mode,
            provenance: Vec::new(),
            rows: Vec::new(),
            timing: ReportTiming::default(),
            work: 0,
            warnings: Vec::new(),
            explain: String::new(),
        }
    }

    /// Result rows only: `code<TAB>description<TAB>value`, followed for
    /// enumeration by `match<TAB>code<TAB>v1,v2,...` lines.
    pub fn rows_tsv(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{}\t{}", r.code, r.description, r.value);
        }
        for r in &self.rows {
            for m in r.matches.iter().flatten() {
                let ids: Vec<String> = m.iter().map(u64::to_string).collect();
                let _ = writeln!(out, "match\t{}\t{}", r.code, ids.join(","));
            }
        }
        out
    }

    /// Rows preceded by `#` comment lines carrying plan provenance and timing.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# command={} morph={} plans={}", self.command, self.mode, self.provenance.join(","));
        let t = &self.timing;
        let _ = writeln!(
            out,
            "# timing_ms planning={:.3} matching={:.3} aggregation={:.3} conversion={:.3} work={}",
            t.planning_ms, t.matching_ms, t.aggregation_ms, t.conversion_ms, self.work
        );
        for w in &self.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
        out.push_str("# code\tdescription\tvalue\n");
        out.push_str(&self.rows_tsv());
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    fn sort_rows(&mut self) {
        self.rows.sort_by(|a, b| a.code.cmp(&b.code));
    }
}

fn row_for(p: &Pattern, value: u64) -> ResultRow {
    let (code, perm) = canonical_labeling(p);
    ResultRow { code: code.to_string(), description: p.permuted(&perm).describe(), value, matches: None }
}

/// Plans and executes one request, folding timing, provenance and plan
/// explanation into the report.
fn run_request<A: Aggregator>(
    patterns: &[Pattern],
    agg: &A,
    g: &DataGraph,
    cfg: &JobConfig,
    report: &mut ResultReport,
) -> Result<Vec<A::Value>, AppError> {
    let start = Instant::now();
    let model = SampledCostModel::new(g, cfg.cost.clone(), cfg.seed);
    let choice = choose_plan(patterns, agg, &model, cfg.mode)?;
    let planning = start.elapsed();
    let exec = execute_plan(&choice.chosen.plan, agg, g)?;
    report.timing.add(planning, &exec.timing);
    report.work += exec.total_stats().work();
    report.provenance.push(choice.chosen.provenance.to_string());
    report.explain.push_str(&choice.explain());
    Ok(exec.values)
}

/// Vertex-induced counts of every connected motif on 3 to `k` vertices.
pub fn run_motifs(g: &DataGraph, k: usize, cfg: &JobConfig) -> Result<ResultReport, AppError> {
    if !MOTIF_SIZES.contains(&k) {
        return Err(AppError::MotifSize(k));
    }
    let mut report = ResultReport::new("motifs", cfg.mode);
    for size in 3..=k {
        let motifs: Vec<Pattern> = connected_patterns(size).iter().map(Pattern::vertex_variant).collect();
        let values = run_request(&motifs, &Count, g, cfg, &mut report)?;
        report.rows.extend(motifs.iter().zip(&values).map(|(p, &v)| row_for(p, v)));
    }
    report.sort_rows();
    Ok(report)
}

/// All connected labeled patterns with `k` edges whose MNI support is at
/// least `support`, found level by level over edge count.
pub fn run_fsm(g: &DataGraph, k: usize, support: u64, cfg: &JobConfig) -> Result<ResultReport, AppError> {
    if k == 0 || k > MAX_FSM_EDGES {
        return Err(AppError::FsmSize(k));
    }
    if support == 0 {
        return Err(AppError::Support);
    }
    let mut report = ResultReport::new("fsm", cfg.mode);
    if !g.is_labeled() {
        report.warnings.push("graph has no labels; every vertex carries the same label".into());
    }

    let mut pairs = BTreeSet::new();
    for (u, v) in g.edges() {
        let (a, b) = (g.label(u), g.label(v));
        pairs.insert((a.min(b), a.max(b)));
    }
    let mut candidates: Vec<Pattern> = pairs
        .into_iter()
        .map(|(a, b)| Pattern::new(2, &[(0, 1)], &[], Some(vec![a, b])).expect("valid edge pattern"))
        .collect();
    let mut frequent: Vec<(Pattern, u64)> = Vec::new();
    let mut labels: BTreeSet<Label> = BTreeSet::new();
    for level in 1..=k {
        if level > 1 {
            candidates = extend(&frequent, &labels);
        }
        if candidates.is_empty() {
            frequent.clear();
            break;
        }
        let values = run_request(&candidates, &Mni, g, cfg, &mut report)?;
        frequent = candidates
            .iter()
            .zip(&values)
            .map(|(p, t)| (p.clone(), t.support()))
            .filter(|&(_, s)| s >= support)
            .collect();
        if level == 1 {
            labels = frequent.iter().flat_map(|(p, _)| p.labels().expect("labeled").to_vec()).collect();
        }
    }
    report.rows = frequent.iter().map(|(p, s)| row_for(p, *s)).collect();
    report.sort_rows();
    Ok(report)
}

/// One-edge extensions of the frequent patterns, deduplicated, keeping only
/// those whose every connected one-edge-smaller subpattern is frequent.
fn extend(frequent: &[(Pattern, u64)], labels: &BTreeSet<Label>) -> Vec<Pattern> {
    let known: BTreeSet<_> = frequent.iter().map(|(p, _)| canonicalize(p)).collect();
    let mut out: BTreeMap<_, Pattern> = BTreeMap::new();
    for (p, _) in frequent {
        let n = p.vertex_count();
        let mut grown = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if !p.has_edge(u, v) {
                    grown.push(p.with_edge(u, v).expect("vertices in range"));
                }
            }
            if n < MAX_PATTERN_VERTICES {
                for &l in labels {
                    grown.push(p.with_pendant(u, Some(l)).expect("room for a vertex"));
                }
            }
        }
        for q in grown {
            let code = canonicalize(&q);
            if out.contains_key(&code) {
                continue;
            }
            let downward_closed = q
                .edges()
                .into_iter()
                .filter_map(|(a, b)| q.without_edge(a, b))
                .all(|sub| known.contains(&canonicalize(&sub)));
            if downward_closed {
                out.insert(code, q);
            }
        }
    }
    out.into_values().collect()
}

/// Counts, or enumerates, the matches of user-supplied patterns.
pub fn run_match(
    g: &DataGraph,
    patterns: &[Pattern],
    induced: Induced,
    enumerate: bool,
    cfg: &JobConfig,
) -> Result<ResultReport, AppError> {
    if patterns.is_empty() {
        return Err(AppError::NoPatterns);
    }
    let mut unique: BTreeMap<_, Pattern> = BTreeMap::new();
    for p in patterns {
        if p.vertex_count() > g.vertex_count() {
            return Err(AppError::PatternTooLarge { pattern: p.to_string(), size: p.vertex_count(), vertices: g.vertex_count() });
        }
        let p = if induced == Induced::Vertex && p.is_edge_induced() { p.vertex_variant() } else { p.clone() };
        unique.entry(canonicalize(&p)).or_insert(p);
    }
    let patterns: Vec<Pattern> = unique.into_values().collect();
    let mut report = ResultReport::new("match", cfg.mode);
    if enumerate {
        let values = run_request(&patterns, &Enumerate, g, cfg, &mut report)?;
        for (p, list) in patterns.iter().zip(values) {
            let (code, perm) = canonical_labeling(p);
            // report each match in the canonical pattern's vertex order
            let mut matches: Vec<Vec<u64>> = list
                .matches
                .iter()
                .map(|m| {
                    let mut out = vec![0; m.len()];
                    for (i, &v) in m.iter().enumerate() {
                        out[perm[i]] = g.original_id(v);
                    }
                    out
                })
                .collect();
            matches.sort_unstable();
            let canonical = p.permuted(&perm);
            report.rows.push(ResultRow {
                code: code.to_string(),
                description: canonical.describe(),
                value: matches.len() as u64,
                matches: Some(matches),
            });
        }
    } else {
        let values = run_request(&patterns, &Count, g, cfg, &mut report)?;
        report.rows.extend(patterns.iter().zip(&values).map(|(p, &v)| row_for(p, v)));
    }
    report.sort_rows();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: Mode) -> JobConfig {
        JobConfig { mode, seed: 1, cost: CostConfig { sample_size: 64, ..CostConfig::default() } }
    }

    fn value(report: &ResultReport, p: &Pattern) -> u64 {
        let code = canonicalize(p).to_string();
        report.rows.iter().find(|r| r.code == code).map(|r| r.value).unwrap()
    }

    #[test]
    fn motifs_on_clique_and_cycle() {
        let k4 = DataGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], None).unwrap();
        let c5 = DataGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], None).unwrap();
        for mode in [Mode::Off, Mode::Naive, Mode::Auto] {
            let r = run_motifs(&k4, 4, &cfg(mode)).unwrap();
            assert_eq!(r.rows.len(), 2 + 6);
            for row in r.rows.iter().filter(|r| r.code.starts_with('4')) {
                assert_eq!(row.value, u64::from(row.description.starts_with("clique4")), "{row:?}");
            }
            let r = run_motifs(&c5, 4, &cfg(mode)).unwrap();
            assert_eq!(value(&r, &Pattern::path(4).vertex_variant()), 5);
            assert_eq!(r.rows.iter().map(|r| r.value).sum::<u64>(), 5 + 5);
        }
        assert!(matches!(run_motifs(&k4, 6, &cfg(Mode::Off)), Err(AppError::MotifSize(6))));
    }

    #[test]
    fn fsm_small_cases() {
        let triangle = DataGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)], Some(vec![0, 0, 0])).unwrap();
        let r = run_fsm(&triangle, 3, 1, &cfg(Mode::Auto)).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(r.rows[0].description.starts_with("triangle"));
        // one orbit holding all three vertices
        assert_eq!(r.rows[0].value, 3);
        assert!(run_fsm(&triangle, 1, 4, &cfg(Mode::Off)).unwrap().rows.is_empty());

        let two = DataGraph::from_edges(4, &[(0, 1), (2, 3)], Some(vec![1, 2, 1, 2])).unwrap();
        let r = run_fsm(&two, 1, 2, &cfg(Mode::Naive)).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].value, 2);
        assert!(matches!(run_fsm(&two, 1, 0, &cfg(Mode::Off)), Err(AppError::Support)));
    }

    #[test]
    fn match_counts_and_enumerates() {
        let k4 = DataGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], None).unwrap();
        for mode in [Mode::Off, Mode::Naive, Mode::Auto] {
            let r = run_match(&k4, &[Pattern::cycle(4)], Induced::Edge, false, &cfg(mode)).unwrap();
            assert_eq!(r.rows[0].value, 3);
            let r = run_match(&k4, &[Pattern::cycle(4)], Induced::Vertex, false, &cfg(mode)).unwrap();
            assert_eq!(r.rows[0].value, 0);
            let r = run_match(&k4, &[Pattern::cycle(4)], Induced::Edge, true, &cfg(mode)).unwrap();
            assert_eq!(r.rows[0].matches.as_ref().unwrap().len(), 3);
        }
        assert!(matches!(
            run_match(&k4, &[Pattern::path(5)], Induced::Edge, false, &cfg(Mode::Off)),
            Err(AppError::PatternTooLarge { .. })
        ));
    }

    #[test]
    fn tsv_layout() {
        let k4 = DataGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], None).unwrap();
        let r = run_match(&k4, &[Pattern::clique(3)], Induced::Edge, false, &cfg(Mode::Off)).unwrap();
        assert_eq!(r.rows_tsv(), format!("{}\ttriangle/clique\t4\n", canonicalize(&Pattern::clique(3))));
        assert!(r.to_tsv().lines().filter(|l| !l.starts_with('#')).eq(r.rows_tsv().lines()));
        assert!(r.to_json().contains("\"rows\""));
    }
}
