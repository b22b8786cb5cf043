use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;

use super::{enumerate_subiso_raw, Pattern, PatternIso};

/// Isomorphism-class key for a pattern. Equal codes mean isomorphic patterns,
/// respecting labels and the edge / anti-edge distinction.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    code: Vec<u8>,
}

const PAIR_NONE: u8 = 0;
const PAIR_ANTI: u8 = 1;
const PAIR_EDGE: u8 = 2;

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        &self.code
    }

    pub fn vertex_count(&self) -> usize {
        self.code[0] as usize
    }
}

fn pair_state(p: &Pattern, u: usize, v: usize) -> u8 {
    if p.has_edge(u, v) {
        PAIR_EDGE
    } else if p.has_anti_edge(u, v) {
        PAIR_ANTI
    } else {
        PAIR_NONE
    }
}

/// Code of `p` relabeled so that new vertex `j` is old vertex `inv[j]`.
fn encode(p: &Pattern, inv: &[usize], out: &mut Vec<u8>) {
    let n = p.vertex_count();
    out.clear();
    out.push(n as u8);
    match p.labels() {
        Some(labels) => {
            out.push(1);
            for &old in inv {
                out.extend_from_slice(&labels[old].to_be_bytes());
            }
        }
        None => out.push(0),
    }
    for j in 0..n {
        for k in j + 1..n {
            out.push(pair_state(p, inv[j], inv[k]));
        }
    }
}

/// Per-thread memo of canonical labelings; planning canonicalizes the same
/// few patterns many times over.
const CACHE_LIMIT: usize = 1 << 16;

thread_local! {
    static CACHE: RefCell<HashMap<Pattern, (CanonicalForm, Vec<usize>)>> = RefCell::new(HashMap::new());
}

/// Canonical form of `p` together with the relabeling `perm` (old vertex `i`
/// becomes `perm[i]`) such that `p.permuted(&perm)` is the canonical
/// representative of the class.
pub fn canonical_labeling(p: &Pattern) -> (CanonicalForm, Vec<usize>) {
    if let Some(hit) = CACHE.with(|c| c.borrow().get(p).cloned()) {
        return hit;
    }
    let result = compute_labeling(p);
    CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() >= CACHE_LIMIT {
            c.clear();
        }
        c.insert(p.clone(), result.clone());
    });
    result
}

fn compute_labeling(p: &Pattern) -> (CanonicalForm, Vec<usize>) {
    let n = p.vertex_count();
    let mut best: Option<(Vec<u8>, Vec<usize>)> = None;
    let mut buf = Vec::with_capacity(2 + 4 * n + n * n / 2);
    for inv in (0..n).permutations(n) {
        encode(p, &inv, &mut buf);
        let better = match &best {
            Some((code, _)) => buf < *code,
            None => true,
        };
        if better {
            best = Some((buf.clone(), inv));
        }
    }
    let (code, inv) = best.expect("at least one permutation");
    let mut perm = vec![0; n];
    for (j, &old) in inv.iter().enumerate() {
        perm[old] = j;
    }
    (CanonicalForm { code }, perm)
}

pub fn canonicalize(p: &Pattern) -> CanonicalForm {
    canonical_labeling(p).0
}

/// An isomorphism `f` from `p` onto `q` (so `q.has_edge(f(u), f(v))` exactly
/// when `p.has_edge(u, v)`), if the two are isomorphic.
pub fn find_isomorphism(p: &Pattern, q: &Pattern) -> Option<PatternIso> {
    let (cp, perm_p) = canonical_labeling(p);
    let (cq, perm_q) = canonical_labeling(q);
    if cp != cq {
        return None;
    }
    let mut inv_q = vec![0; perm_q.len()];
    for (i, &c) in perm_q.iter().enumerate() {
        inv_q[c] = i;
    }
    Some(PatternIso::new(perm_p.iter().map(|&c| inv_q[c]).collect()))
}

/// The full automorphism group of `p`, identity first, then lexicographic.
pub fn automorphisms(p: &Pattern) -> Vec<PatternIso> {
    enumerate_subiso_raw(p, p)
}

/// Orbit index of every vertex under the automorphism group. Orbits are
/// numbered in order of their smallest vertex.
pub fn orbits(p: &Pattern) -> Vec<usize> {
    orbits_from_group(p.vertex_count(), &automorphisms(p))
}

pub(crate) fn orbits_from_group(n: usize, group: &[PatternIso]) -> Vec<usize> {
    let rep: Vec<usize> = (0..n).map(|v| group.iter().map(|a| a.image(v)).min().unwrap_or(v)).collect();
    let mut ids = vec![usize::MAX; n];
    let mut out = vec![0; n];
    let mut next = 0;
    for v in 0..n {
        let r = rep[v];
        if ids[r] == usize::MAX {
            ids[r] = next;
            next += 1;
        }
        out[v] = ids[r];
    }
    out
}

/// Renders as `n:edges:anti-edges[:labels]`, with 0-based canonical vertex
/// numbers, e.g. `4:01,03,12,23:02,13`.
impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.code[0] as usize;
        let labeled = self.code[1] == 1;
        let pairs_at = if labeled { 2 + 4 * n } else { 2 };
        let mut edges = Vec::new();
        let mut anti = Vec::new();
        let mut idx = pairs_at;
        for j in 0..n {
            for k in j + 1..n {
                match self.code[idx] {
                    PAIR_EDGE => edges.push(format!("{j}{k}")),
                    PAIR_ANTI => anti.push(format!("{j}{k}")),
                    _ => {}
                }
                idx += 1;
            }
        }
        write!(f, "{n}:{}:{}", edges.join(","), anti.join(","))?;
        if labeled {
            let labels: Vec<String> = (0..n)
                .map(|j| {
                    let b = &self.code[2 + 4 * j..6 + 4 * j];
                    u32::from_be_bytes([b[0], b[1], b[2], b[3]]).to_string()
                })
                .collect();
            write!(f, ":{}", labels.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({self})")
    }
}
