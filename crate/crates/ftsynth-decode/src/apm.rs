//! Minimum-weight A-perfect matching by reduction to minimum-weight perfect
//! matching, with a brute-force reference.
//!
//! An A-perfect matching of a graph is an edge set in which every vertex of
//! `A` has exactly one edge; vertices outside `A` may have any number.

use std::collections::BTreeMap;

use mwmatching::{Matching, SENTINEL};

use crate::error::MatchingError;

/// Undirected graph with nonnegative edge weights and a designated vertex
/// subset `A`. Absent edges have infinite weight.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    weights: BTreeMap<(usize, usize), f64>,
    in_a: Vec<bool>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph {
            n,
            weights: BTreeMap::new(),
            in_a: vec![false; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds an edge, keeping the smaller weight if it already exists.
    pub fn add_edge(&mut self, u: usize, v: usize, w: f64) -> Result<(), MatchingError> {
        if u == v || u >= self.n || v >= self.n {
            return Err(MatchingError::BadEdge(u, v));
        }
        if !(w >= 0.0) || !w.is_finite() {
            return Err(MatchingError::BadWeight(w));
        }
        let key = (u.min(v), u.max(v));
        let entry = self.weights.entry(key).or_insert(w);
        if w < *entry {
            *entry = w;
        }
        Ok(())
    }

    pub fn set_a(&mut self, a: &[usize]) {
        self.in_a = vec![false; self.n];
        for &v in a {
            self.in_a[v] = true;
        }
    }

    pub fn in_a(&self, v: usize) -> bool {
        self.in_a[v]
    }

    pub fn a(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.in_a[v]).collect()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.weights.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.weights.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    /// Total weight of an edge set; `None` if some edge is absent.
    pub fn total(&self, m: &[(usize, usize)]) -> Option<f64> {
        m.iter().map(|&(u, v)| self.weight(u, v)).sum()
    }

    /// Whether `m` consists of edges of the graph and gives every vertex of
    /// `A` exactly one edge.
    pub fn is_a_perfect(&self, m: &[(usize, usize)]) -> bool {
        let mut deg = vec![0usize; self.n];
        for &(u, v) in m {
            if self.weight(u, v).is_none() {
                return false;
            }
            deg[u] += 1;
            deg[v] += 1;
        }
        (0..self.n).all(|v| !self.in_a[v] || deg[v] == 1)
    }

    /// Cheapest edge from `v` to a vertex outside `A`, lowest index on ties.
    fn escape(&self, v: usize) -> Option<(f64, usize)> {
        (0..self.n)
            .filter(|&u| !self.in_a[u] && u != v)
            .filter_map(|u| self.weight(v, u).map(|w| (w, u)))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
    }
}

/// Scale used to turn real weights into the integers the blossom solver
/// works with.
fn quantizer(max_weight: f64) -> f64 {
    const LIMIT: f64 = 1.0e7;
    if max_weight <= 0.0 {
        1.0
    } else {
        (LIMIT / max_weight).min(1.0e4)
    }
}

/// Exact minimum-weight perfect matching of the graph on `n` vertices with
/// the given weighted edges. Weights are quantized to a resolution of at
/// least 1e-4 of a unit (finer for small totals).
pub fn exact_mwpm(
    n: usize,
    edges: &[(usize, usize, f64)],
) -> Result<Vec<(usize, usize)>, MatchingError> {
    if n % 2 == 1 {
        return Err(MatchingError::OddVertexCount(n));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let max_w = edges.iter().map(|e| e.2).fold(0.0f64, f64::max);
    let scale = quantizer(max_w);
    let top = (max_w * scale).round() as i64 + 1;
    let qedges: Vec<(usize, usize, i32)> = edges
        .iter()
        .map(|&(u, v, w)| (u, v, (top - (w * scale).round() as i64) as i32))
        .collect();
    if qedges.is_empty() {
        return Err(MatchingError::NoPerfectMatching);
    }
    let mate = Matching::new(qedges).max_cardinality().solve();
    let mut out = Vec::with_capacity(n / 2);
    for v in 0..n {
        let m = mate.get(v).copied().unwrap_or(SENTINEL);
        if m == SENTINEL {
            return Err(MatchingError::NoPerfectMatching);
        }
        if v < m {
            out.push((v, m));
        }
    }
    Ok(out)
}

/// Minimum-weight A-perfect matching via reduction to a perfect matching on
/// `A` (plus one phantom vertex when `|A|` is odd). Pairs of `A` vertices
/// that are cheaper to route through their cheapest escapes are relabeled
/// and expanded back afterwards; pairs without an edge but with two escapes
/// get the relabeled edge as well.
pub fn min_weight_apm(g: &WeightedGraph) -> Result<Vec<(usize, usize)>, MatchingError> {
    let a = g.a();
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let esc: Vec<Option<(f64, usize)>> = a.iter().map(|&v| g.escape(v)).collect();
    let k = a.len();
    let mut edges = Vec::new();
    let mut relabeled = BTreeMap::new();
    for i in 0..k {
        for j in i + 1..k {
            let direct = g.weight(a[i], a[j]);
            let via = match (esc[i], esc[j]) {
                (Some((qi, _)), Some((qj, _))) => Some(qi + qj),
                _ => None,
            };
            match (direct, via) {
                (Some(w), Some(w2)) if w2 <= w => {
                    relabeled.insert((i, j), true);
                    edges.push((i, j, w2));
                }
                (None, Some(w2)) => {
                    relabeled.insert((i, j), true);
                    edges.push((i, j, w2));
                }
                (Some(w), _) => edges.push((i, j, w)),
                (None, None) => {}
            }
        }
    }
    let phantom = if k % 2 == 1 {
        for (i, e) in esc.iter().enumerate() {
            if let Some((q, _)) = e {
                edges.push((i, k, *q));
            }
        }
        Some(k)
    } else {
        None
    };
    let size = k + phantom.is_some() as usize;
    for i in 0..k {
        if esc[i].is_none() && !edges.iter().any(|&(u, v, _)| u == i || v == i) {
            return Err(MatchingError::Infeasible(a[i]));
        }
    }
    let reduced = exact_mwpm(size, &edges).map_err(|e| match e {
        MatchingError::NoPerfectMatching => MatchingError::Infeasible(usize::MAX),
        e => e,
    })?;
    let mut out = Vec::new();
    for (i, j) in reduced {
        if Some(j) == phantom {
            out.push(ordered(
                a[i],
                esc[i].expect("phantom edge needs an escape").1,
            ));
        } else if relabeled.contains_key(&(i, j)) {
            out.push(ordered(a[i], esc[i].expect("relabeled").1));
            out.push(ordered(a[j], esc[j].expect("relabeled").1));
        } else {
            out.push(ordered(a[i], a[j]));
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn ordered(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Minimum-weight A-perfect matching by exhaustive search; for tests and
/// small instances (`|A| <= 12`). Returns `None` when none exists.
pub fn brute_force_apm(g: &WeightedGraph) -> Option<(f64, Vec<(usize, usize)>)> {
    let a = g.a();
    assert!(a.len() <= 12, "brute force limited to |A| <= 12");
    let mut best: Option<(f64, Vec<(usize, usize)>)> = None;
    let mut used = vec![false; a.len()];
    let mut cur = Vec::new();
    search(g, &a, &mut used, &mut cur, 0.0, &mut best);
    best.map(|(w, mut m)| {
        m.sort_unstable();
        (w, m)
    })
}

fn search(
    g: &WeightedGraph,
    a: &[usize],
    used: &mut [bool],
    cur: &mut Vec<(usize, usize)>,
    w: f64,
    best: &mut Option<(f64, Vec<(usize, usize)>)>,
) {
    let Some(i) = used.iter().position(|u| !u) else {
        if best.as_ref().is_none_or(|(b, _)| w < *b) {
            *best = Some((w, cur.clone()));
        }
        return;
    };
    used[i] = true;
    for u in 0..g.n() {
        if u == a[i] {
            continue;
        }
        let Some(e) = g.weight(a[i], u) else { continue };
        if g.in_a(u) {
            let j = a.iter().position(|&x| x == u).unwrap();
            if used[j] {
                continue;
            }
            used[j] = true;
            cur.push(ordered(a[i], u));
            search(g, a, used, cur, w + e, best);
            cur.pop();
            used[j] = false;
        } else {
            cur.push(ordered(a[i], u));
            search(g, a, used, cur, w + e, best);
            cur.pop();
        }
    }
    used[i] = false;
}
