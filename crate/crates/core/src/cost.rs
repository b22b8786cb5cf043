//! Cost-based choice between matching requested patterns directly and
//! morphing them into alternative pattern sets.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregation::{Aggregator, ConversionScale, Count, Mni};
use crate::graph::{generate, DataGraph, VertexId};
use crate::matcher::{fold_matches, root_candidates, MatchingPlan};
use crate::morph::{morph, MorphEquation, MorphError, MorphPlan};
use crate::pattern::{canonicalize, CanonicalForm, Pattern, PatternIso};

/// Patterns with more missing vertex pairs than this are never morphed:
/// their superpattern sets are too large to enumerate.
pub const MORPH_MISSING_PAIR_LIMIT: usize = 10;

/// Up to this many morphable patterns every assignment is tried; beyond it
/// the search is a greedy descent.
pub const EXHAUSTIVE_LIMIT: usize = 16;

#[derive(Debug, Error)]
pub enum CostError {
    #[error("no patterns requested")]
    EmptyRequest,
    #[error(transparent)]
    Morph(#[from] MorphError),
    #[error(transparent)]
    Config(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Off,
    Naive,
    #[default]
    Auto,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "off" => Ok(Mode::Off),
            "naive" => Ok(Mode::Naive),
            "auto" => Ok(Mode::Auto),
            other => Err(format!("unknown morph mode `{other}` (expected off, naive or auto)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Off => "off",
            Mode::Naive => "naive",
            Mode::Auto => "auto",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    NoPmr,
    NaivePmr,
    Mixed,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::NoPmr => "no-pmr",
            Provenance::NaivePmr => "naive-pmr",
            Provenance::Mixed => "mixed",
        })
    }
}

/// Calibration constants, in units of matcher work (one bound partial match
/// or one scanned adjacency entry).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostConfig {
    /// Cost of permuting and combining one count.
    pub count_per_iso: f64,
    /// Cost per data vertex of permuting and combining one MNI table or match
    /// list.
    pub mni_per_vertex_iso: f64,
    /// Number of root vertices explored when sampling a pattern's cost.
    pub sample_size: usize,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig { count_per_iso: 1.0, mni_per_vertex_iso: 4.0, sample_size: 1024 }
    }
}

impl CostConfig {
    pub fn from_toml(text: &str) -> Result<Self, CostError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, CostError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Measures the conversion constants on this machine by timing matcher
    /// work against count and MNI conversion steps.
    pub fn calibrate(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4000;
        let g = generate::random_graph(n, 8.0 / n as f64, None, &mut rng);
        let start = Instant::now();
        let mut work = 0u64;
        for p in [Pattern::path(3), Pattern::clique(3), Pattern::cycle(4)] {
            let plan = MatchingPlan::new(&p);
            let ((), stats) = fold_matches(&plan, &g, None, || (), |_, _| {}, |_, _| ());
            work += stats.work();
        }
        let per_work = start.elapsed().as_secs_f64() / work.max(1) as f64;

        let target = Pattern::cycle(4);
        let f = PatternIso::new(vec![1, 2, 3, 0]);
        let reps = 200_000u64;
        let start = Instant::now();
        let mut acc = 0u64;
        for i in 0..reps {
            let v = Count.permute(&std::hint::black_box(i), &f, &target).expect("valid permutation");
            acc = Count.combine(acc, v);
        }
        std::hint::black_box(acc);
        let per_count = start.elapsed().as_secs_f64() / reps as f64;

        let mut table = Mni.empty(&target);
        for v in 0..n as VertexId {
            Mni.accumulate(&mut table, &[v, (v + 1) % n as VertexId, (v + 2) % n as VertexId, (v + 3) % n as VertexId]);
        }
        let reps = 20;
        let start = Instant::now();
        let mut acc = Mni.empty(&target);
        for _ in 0..reps {
            let v = Mni.permute(&table, &f, &target).expect("valid permutation");
            acc = Mni.combine(acc, v);
        }
        std::hint::black_box(&acc);
        let per_mni_vertex = start.elapsed().as_secs_f64() / (reps * n) as f64;

        CostConfig {
            count_per_iso: (per_count / per_work).max(f64::MIN_POSITIVE),
            mni_per_vertex_iso: (per_mni_vertex / per_work).max(f64::MIN_POSITIVE),
            sample_size: CostConfig::default().sample_size,
        }
    }
}

/// Cost of turning executed results into requested results through `eq`.
/// Identity equations are free.
pub fn estimate_conversion_cost(eq: &MorphEquation, scale: ConversionScale, config: &CostConfig, vertices: usize) -> f64 {
    if eq.is_identity() {
        return 0.0;
    }
    let isos = eq.iso_count() as f64;
    match scale {
        ConversionScale::Constant => config.count_per_iso * isos,
        ConversionScale::PerVertex => config.mni_per_vertex_iso * vertices as f64 * isos,
    }
}

/// Sampled exploration cost: matcher work from `sample_size` uniformly drawn
/// root vertices, scaled to all roots. Zero when no root is label compatible.
pub fn estimate_pattern_cost(p: &Pattern, g: &DataGraph, seed: u64, sample_size: usize) -> f64 {
    let plan = MatchingPlan::new(p);
    let roots = root_candidates(&plan, g);
    if roots.is_empty() || sample_size == 0 {
        return 0.0;
    }
    let s = sample_size.min(roots.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample: Vec<VertexId> = rand::seq::index::sample(&mut rng, roots.len(), s).into_iter().map(|i| roots[i]).collect();
    sample.sort_unstable();
    let ((), stats) = fold_matches(&plan, g, Some(&sample), || (), |_, _| {}, |_, _| ());
    stats.work() as f64 * roots.len() as f64 / s as f64
}

pub trait CostEstimator: Sync {
    fn pattern_cost(&self, p: &Pattern) -> f64;
    fn conversion_cost(&self, eq: &MorphEquation, scale: ConversionScale) -> f64;
}

/// The default estimator: sampled matching on the data graph, cached per
/// isomorphism class.
pub struct SampledCostModel<'g> {
    graph: &'g DataGraph,
    config: CostConfig,
    seed: u64,
    cache: Mutex<HashMap<CanonicalForm, f64>>,
}

impl<'g> SampledCostModel<'g> {
    pub fn new(graph: &'g DataGraph, config: CostConfig, seed: u64) -> Self {
        SampledCostModel { graph, config, seed, cache: Mutex::new(HashMap::new()) }
    }

    pub fn config(&self) -> &CostConfig {
        &self.config
    }
}

impl CostEstimator for SampledCostModel<'_> {
    fn pattern_cost(&self, p: &Pattern) -> f64 {
        let code = canonicalize(p);
        if let Some(&c) = self.cache.lock().expect("cache lock").get(&code) {
            return c;
        }
        let c = estimate_pattern_cost(p, self.graph, self.seed, self.config.sample_size);
        self.cache.lock().expect("cache lock").insert(code, c);
        c
    }

    fn conversion_cost(&self, eq: &MorphEquation, scale: ConversionScale) -> f64 {
        estimate_conversion_cost(eq, scale, &self.config, self.graph.vertex_count())
    }
}

#[derive(Debug, Clone)]
pub struct PlanCandidate {
    pub plan: MorphPlan,
    pub estimated_cost: f64,
    pub provenance: Provenance,
}

impl PlanCandidate {
    fn key(&self) -> (f64, usize, Vec<CanonicalForm>) {
        (self.estimated_cost, self.plan.execute.len(), self.plan.execute.iter().map(canonicalize).collect())
    }

    fn better_than(&self, other: &PlanCandidate) -> bool {
        let (a, b) = (self.key(), other.key());
        match a.0.total_cmp(&b.0) {
            std::cmp::Ordering::Equal => (a.1, a.2) < (b.1, b.2),
            ord => ord.is_lt(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlanChoice {
    pub chosen: PlanCandidate,
    /// The direct and naive plans, when they were evaluated.
    pub baselines: Vec<PlanCandidate>,
    pub mode: Mode,
    /// Number of distinct assignments costed.
    pub evaluated: usize,
}

impl PlanChoice {
    /// Human-readable account of the decision: candidate costs, then the
    /// chosen plan's equations.
    pub fn explain(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# morph mode {} ({} plans costed)", self.mode, self.evaluated);
        let describe = |c: &PlanCandidate| -> String {
            let codes: Vec<String> = c.plan.execute.iter().map(|p| canonicalize(p).to_string()).collect();
            format!("{} cost={:.1} execute=[{}]", c.provenance, c.estimated_cost, codes.join(" "))
        };
        for b in &self.baselines {
            let _ = writeln!(out, "# candidate {}", describe(b));
        }
        let _ = writeln!(out, "# chosen {}", describe(&self.chosen));
        out.push_str(&self.chosen.plan.dump());
        out
    }
}

/// A pattern variant that may appear in some plan for the request.
struct Node {
    code: CanonicalForm,
    equation: Option<MorphEquation>,
    /// Node indices of the equation's term patterns.
    deps: Vec<usize>,
    vertex_induced: bool,
    /// Node index of the opposite induced variant, when present.
    opposite: Option<usize>,
}

struct Lattice {
    nodes: Vec<Node>,
    index: HashMap<CanonicalForm, usize>,
    requested: Vec<usize>,
    /// Nodes that may be assigned Morph.
    binary: Vec<usize>,
}

fn morphable(p: &Pattern) -> bool {
    let n = p.vertex_count();
    !p.is_clique()
        && (p.is_edge_induced() || p.is_vertex_induced())
        && n * (n - 1) / 2 - p.edge_count() <= MORPH_MISSING_PAIR_LIMIT
}

impl Lattice {
    fn build(requested: &[Pattern], invertible: bool) -> Result<Self, CostError> {
        let mut index: HashMap<CanonicalForm, usize> = HashMap::new();
        let mut nodes: Vec<Node> = Vec::new();
        let mut patterns: Vec<Pattern> = Vec::new();
        let mut queue: Vec<usize> = Vec::new();
        let mut intern = |p: &Pattern, nodes: &mut Vec<Node>, patterns: &mut Vec<Pattern>, queue: &mut Vec<usize>| {
            let code = canonicalize(p);
            let index = &mut index;
            *index.entry(code.clone()).or_insert_with(|| {
                nodes.push(Node { code, equation: None, deps: Vec::new(), vertex_induced: p.is_vertex_induced(), opposite: None });
                patterns.push(p.clone());
                queue.push(nodes.len() - 1);
                nodes.len() - 1
            })
        };
        let requested_ids: Vec<usize> =
            requested.iter().map(|p| intern(p, &mut nodes, &mut patterns, &mut queue)).collect();
        while let Some(i) = queue.pop() {
            let p = patterns[i].clone();
            // negative terms need an invertible combine
            if !morphable(&p) || (p.is_vertex_induced() && !invertible) {
                continue;
            }
            let eq = morph(&p)?;
            let deps = eq.terms.iter().map(|t| intern(&t.pattern, &mut nodes, &mut patterns, &mut queue)).collect();
            nodes[i].equation = Some(eq);
            nodes[i].deps = deps;
        }
        for i in 0..nodes.len() {
            if nodes[i].equation.is_some() {
                let opposite = if nodes[i].vertex_induced { patterns[i].edge_variant() } else { patterns[i].vertex_variant() };
                nodes[i].opposite = index.get(&canonicalize(&opposite)).copied();
            }
        }
        let mut binary: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].equation.is_some()).collect();
        binary.sort_by(|&a, &b| nodes[a].code.cmp(&nodes[b].code));
        Ok(Lattice { nodes, index, requested: requested_ids, binary })
    }

    /// Positions of requested patterns grouped so that no two groups share a
    /// reachable variant. Groups never interact in a plan and can be
    /// optimized one at a time.
    fn request_groups(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn root(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for (i, node) in self.nodes.iter().enumerate() {
            for &j in node.deps.iter().chain(&node.opposite) {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut order = Vec::new();
        for (pos, &r) in self.requested.iter().enumerate() {
            let g = root(&mut parent, r);
            if !groups.contains_key(&g) {
                order.push(g);
            }
            groups.entry(g).or_default().push(pos);
        }
        order.into_iter().map(|g| groups.remove(&g).unwrap()).collect()
    }

    /// Clears Morph on nodes no requested pattern reaches; equal plans then
    /// share one assignment.
    fn effective(&self, morph: &[bool]) -> Vec<bool> {
        let mut reached = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = self.requested.clone();
        while let Some(i) = stack.pop() {
            if std::mem::replace(&mut reached[i], true) {
                continue;
            }
            if morph[i] {
                stack.extend(&self.nodes[i].deps);
            }
        }
        morph.iter().zip(&reached).map(|(&m, &r)| m && r).collect()
    }

    fn acyclic(&self, morph: &[bool]) -> bool {
        (0..self.nodes.len()).all(|i| !morph[i] || self.nodes[i].opposite.is_none_or(|o| !morph[o]))
    }

    fn choices(&self, morph: &[bool]) -> BTreeMap<CanonicalForm, MorphEquation> {
        (0..self.nodes.len())
            .filter(|&i| morph[i])
            .map(|i| (self.nodes[i].code.clone(), self.nodes[i].equation.clone().expect("binary node")))
            .collect()
    }

    fn naive(&self) -> Vec<bool> {
        let mut morph = vec![false; self.nodes.len()];
        let set = |i: usize, morph: &mut Vec<bool>| {
            let ok = self.nodes[i].equation.is_some() && self.nodes[i].opposite.is_none_or(|o| !morph[o]);
            if ok {
                morph[i] = true;
            }
            ok
        };
        for &r in &self.requested {
            set(r, &mut morph);
        }
        // vertex-induced requests go all the way to edge-induced patterns
        let mut stack: Vec<usize> = self.requested.iter().copied().filter(|&r| self.nodes[r].vertex_induced && morph[r]).collect();
        let mut seen: HashSet<usize> = stack.iter().copied().collect();
        while let Some(i) = stack.pop() {
            for &d in &self.nodes[i].deps {
                if self.nodes[d].vertex_induced && seen.insert(d) && set(d, &mut morph) {
                    stack.push(d);
                }
            }
        }
        self.effective(&morph)
    }
}

struct Evaluator<'a, E: ?Sized> {
    lattice: &'a Lattice,
    requested: &'a [Pattern],
    estimator: &'a E,
    scale: ConversionScale,
    invertible: bool,
    seen: HashMap<Vec<bool>, Option<PlanCandidate>>,
}

impl<E: CostEstimator + ?Sized> Evaluator<'_, E> {
    fn evaluate(&mut self, morph: &[bool], provenance: Provenance) -> Result<Option<PlanCandidate>, CostError> {
        let morph = self.lattice.effective(morph);
        if let Some(done) = self.seen.get(&morph) {
            return Ok(done.clone().map(|mut c| {
                c.provenance = provenance;
                c
            }));
        }
        let result = if self.lattice.acyclic(&morph) {
            let plan = MorphPlan::from_choices(self.requested, &self.lattice.choices(&morph))?;
            if plan.has_negative_terms() && !self.invertible {
                None
            } else {
                let matching: f64 = plan.execute.iter().map(|p| self.estimator.pattern_cost(p)).sum();
                let conversion: f64 = plan.equations.iter().map(|eq| self.estimator.conversion_cost(eq, self.scale)).sum();
                Some(PlanCandidate { plan, estimated_cost: matching + conversion, provenance })
            }
        } else {
            None
        };
        self.seen.insert(morph, result.clone());
        Ok(result)
    }
}

/// Picks the plan for `requested` under `mode`. `Off` matches every pattern
/// directly, `Naive` morphs every requested pattern (vertex-induced requests
/// all the way down to edge-induced patterns), and `Auto` minimizes the
/// estimated cost over morph/direct assignments of every pattern variant
/// reachable from the request, never choosing worse than the other two.
pub fn choose_plan<A: Aggregator, E: CostEstimator + ?Sized>(
    requested: &[Pattern],
    agg: &A,
    estimator: &E,
    mode: Mode,
) -> Result<PlanChoice, CostError> {
    if requested.is_empty() {
        return Err(CostError::EmptyRequest);
    }
    let invertible = agg.is_invertible();
    let lattice = Lattice::build(requested, invertible)?;
    let mut eval = Evaluator {
        lattice: &lattice,
        requested,
        estimator,
        scale: agg.conversion_scale(),
        invertible,
        seen: HashMap::new(),
    };
    let none = vec![false; lattice.nodes.len()];
    let off = eval.evaluate(&none, Provenance::NoPmr)?.expect("direct plan is always valid");
    let naive_assignment = lattice.naive();
    let naive = eval.evaluate(&naive_assignment, Provenance::NaivePmr)?.expect("naive assignment is acyclic");
    let mut extra_evaluated = 0;
    let chosen = match mode {
        Mode::Off => off.clone(),
        Mode::Naive => naive.clone(),
        Mode::Auto => {
            let groups = lattice.request_groups();
            let mut best = if groups.len() == 1 {
                search(&mut eval, &off, &naive, &naive_assignment)?.0
            } else {
                let mut morph = none.clone();
                for group in &groups {
                    let sub: Vec<Pattern> = group.iter().map(|&r| requested[r].clone()).collect();
                    let sub_lattice = Lattice::build(&sub, invertible)?;
                    let mut sub_eval = Evaluator { lattice: &sub_lattice, requested: &sub, seen: HashMap::new(), ..eval };
                    let sub_off = sub_eval.evaluate(&vec![false; sub_lattice.nodes.len()], Provenance::NoPmr)?;
                    let sub_naive_assignment = sub_lattice.naive();
                    let sub_naive = sub_eval.evaluate(&sub_naive_assignment, Provenance::NaivePmr)?;
                    let (sub_off, sub_naive) = (sub_off.expect("direct"), sub_naive.expect("naive"));
                    let (_, assignment) = search(&mut sub_eval, &sub_off, &sub_naive, &sub_naive_assignment)?;
                    extra_evaluated += sub_eval.seen.len();
                    for (node, _) in sub_lattice.nodes.iter().zip(&assignment).filter(|(_, &m)| m) {
                        morph[lattice.index[&node.code]] = true;
                    }
                }
                let baseline = if naive.better_than(&off) { naive.clone() } else { off.clone() };
                match eval.evaluate(&morph, Provenance::Mixed)? {
                    Some(c) if c.better_than(&baseline) => c,
                    _ => baseline,
                }
            };
            if best.plan == off.plan {
                best.provenance = Provenance::NoPmr;
            } else if best.plan == naive.plan {
                best.provenance = Provenance::NaivePmr;
            }
            best
        }
    };
    Ok(PlanChoice { chosen, baselines: vec![off, naive], mode, evaluated: eval.seen.len() + extra_evaluated })
}

/// Best assignment over the lattice, starting from the better of the two
/// baselines: exhaustive for few free nodes, coordinate descent otherwise.
fn search<E: CostEstimator + ?Sized>(
    eval: &mut Evaluator<'_, E>,
    off: &PlanCandidate,
    naive: &PlanCandidate,
    naive_assignment: &[bool],
) -> Result<(PlanCandidate, Vec<bool>), CostError> {
    let lattice = eval.lattice;
    let none = vec![false; lattice.nodes.len()];
    let (mut best, mut best_assignment) =
        if naive.better_than(off) { (naive.clone(), naive_assignment.to_vec()) } else { (off.clone(), none.clone()) };
    let k = lattice.binary.len();
    if k <= EXHAUSTIVE_LIMIT {
        for bits in 0u32..(1u32 << k) {
            let mut morph = none.clone();
            for (j, &i) in lattice.binary.iter().enumerate() {
                morph[i] = bits & (1 << j) != 0;
            }
            if lattice.effective(&morph) != morph {
                continue;
            }
            if let Some(c) = eval.evaluate(&morph, Provenance::Mixed)? {
                if c.better_than(&best) {
                    best = c;
                    best_assignment = morph;
                }
            }
        }
    } else {
        let mut improved = true;
        while improved {
            improved = false;
            for &i in &lattice.binary {
                let mut morph = best_assignment.clone();
                morph[i] = !morph[i];
                if let Some(c) = eval.evaluate(&morph, Provenance::Mixed)? {
                    if c.better_than(&best) {
                        best = c;
                        best_assignment = lattice.effective(&morph);
                        improved = true;
                    }
                }
            }
        }
    }
    Ok((best, best_assignment))
}
