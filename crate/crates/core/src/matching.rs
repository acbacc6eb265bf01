//! Minimum-weight maximum-cardinality bipartite matching by successive
//! shortest augmenting paths.
//!
//! Every search runs Dijkstra on reduced costs `w - a[u] - b[v]`, which the
//! dual variables keep nonnegative. After each search the duals on the left
//! (source) side drop by their distance from the source and the duals on the
//! right side rise by theirs, with distances capped at the length of the
//! chosen path. Matched edges stay tight and every edge stays feasible.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteEdge {
    pub left: usize,
    pub right: usize,
    pub weight: f64,
}

/// Bipartite graph with nonnegative weights. Edges are stored sorted by
/// `(left, right)`; parallel edges are collapsed to the lightest.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    edges: Vec<BipartiteEdge>,
    left_offsets: Vec<usize>,
    right_offsets: Vec<usize>,
    right_index: Vec<usize>,
    max_weight: f64,
}

impl BipartiteGraph {
    pub fn new(
        n_left: usize,
        n_right: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut list = Vec::new();
        for (left, right, weight) in edges {
            if left >= n_left || right >= n_right {
                return Err(Error::InvalidEdge(
                    left,
                    right,
                    "endpoint out of range".into(),
                ));
            }
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::InvalidEdge(left, right, format!("weight {weight}")));
            }
            list.push(BipartiteEdge {
                left,
                right,
                weight,
            });
        }
        list.sort_by(|x, y| {
            (x.left, x.right)
                .cmp(&(y.left, y.right))
                .then(x.weight.total_cmp(&y.weight))
        });
        list.dedup_by(|later, kept| later.left == kept.left && later.right == kept.right);
        Ok(Self::from_sorted(n_left, n_right, list))
    }

    fn from_sorted(n_left: usize, n_right: usize, edges: Vec<BipartiteEdge>) -> Self {
        let mut left_offsets = vec![0usize; n_left + 1];
        let mut right_offsets = vec![0usize; n_right + 1];
        for e in &edges {
            left_offsets[e.left + 1] += 1;
            right_offsets[e.right + 1] += 1;
        }
        for i in 0..n_left {
            left_offsets[i + 1] += left_offsets[i];
        }
        for i in 0..n_right {
            right_offsets[i + 1] += right_offsets[i];
        }
        let mut fill = right_offsets.clone();
        let mut right_index = vec![0usize; edges.len()];
        for (idx, e) in edges.iter().enumerate() {
            right_index[fill[e.right]] = idx;
            fill[e.right] += 1;
        }
        let max_weight = edges.iter().map(|e| e.weight).fold(0.0, f64::max);
        BipartiteGraph {
            n_left,
            n_right,
            edges,
            left_offsets,
            right_offsets,
            right_index,
            max_weight,
        }
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn edges(&self) -> &[BipartiteEdge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn max_weight(&self) -> f64 {
        self.max_weight
    }

    /// Edges at left vertex `u`, sorted by right endpoint.
    pub fn left_edges(&self, u: usize) -> &[BipartiteEdge] {
        &self.edges[self.left_offsets[u]..self.left_offsets[u + 1]]
    }

    /// Edges at right vertex `v`, sorted by left endpoint.
    pub fn right_edges(&self, v: usize) -> impl Iterator<Item = &BipartiteEdge> + '_ {
        self.right_index[self.right_offsets[v]..self.right_offsets[v + 1]]
            .iter()
            .map(move |&i| &self.edges[i])
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        if u >= self.n_left {
            return None;
        }
        let adj = self.left_edges(u);
        adj.binary_search_by(|e| e.right.cmp(&v))
            .ok()
            .map(|i| adj[i].weight)
    }

    pub fn dual_tolerance(&self) -> f64 {
        tolerance::dual(self.max_weight)
    }
}

/// A matching together with dual variables `a` (left) and `b` (right).
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingWithDuals {
    pub mate_left: Vec<Option<usize>>,
    pub mate_right: Vec<Option<usize>>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub total_weight: f64,
}

impl MatchingWithDuals {
    /// Empty matching with all-zero duals, feasible for any nonnegative graph.
    pub fn empty(g: &BipartiteGraph) -> Self {
        MatchingWithDuals {
            mate_left: vec![None; g.n_left],
            mate_right: vec![None; g.n_right],
            a: vec![0.0; g.n_left],
            b: vec![0.0; g.n_right],
            total_weight: 0.0,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.mate_left.iter().flatten().count()
    }

    pub fn is_perfect(&self) -> bool {
        self.mate_left.len() == self.mate_right.len() && self.mate_left.iter().all(Option::is_some)
    }

    /// Matched `(left, right)` pairs in left order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.mate_left
            .iter()
            .enumerate()
            .filter_map(|(u, v)| v.map(|v| (u, v)))
            .collect()
    }

    /// Sum of the duals over matched vertices; equals `total_weight` when
    /// every matched edge is tight.
    pub fn dual_objective(&self) -> f64 {
        let left: f64 = self
            .mate_left
            .iter()
            .zip(&self.a)
            .filter(|(m, _)| m.is_some())
            .map(|(_, a)| a)
            .sum();
        let right: f64 = self
            .mate_right
            .iter()
            .zip(&self.b)
            .filter(|(m, _)| m.is_some())
            .map(|(_, b)| b)
            .sum();
        left + right
    }

    pub(crate) fn recompute_weight(&mut self, g: &BipartiteGraph) {
        self.total_weight = self
            .pairs()
            .into_iter()
            .map(|(u, v)| g.weight(u, v).expect("matched pair is an edge"))
            .sum();
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DualViolation {
    /// `a[left] + b[right]` exceeds the edge weight.
    Infeasible {
        left: usize,
        right: usize,
        excess: f64,
    },
    /// A matched edge whose duals do not sum to its weight.
    NotTight { left: usize, right: usize, gap: f64 },
    /// Mate maps disagree, or a matched pair is not an edge.
    BadMate {
        left: Option<usize>,
        right: Option<usize>,
    },
    /// Vector lengths do not match the graph.
    Shape,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualReport {
    pub ok: bool,
    pub violations: Vec<DualViolation>,
}

/// Checks feasibility on every edge, tightness on matched edges and
/// consistency of the mate maps, all within the dual tolerance.
pub fn verify_duals(g: &BipartiteGraph, m: &MatchingWithDuals) -> DualReport {
    let mut violations = Vec::new();
    if m.mate_left.len() != g.n_left
        || m.a.len() != g.n_left
        || m.mate_right.len() != g.n_right
        || m.b.len() != g.n_right
    {
        return DualReport {
            ok: false,
            violations: vec![DualViolation::Shape],
        };
    }
    let eps = g.dual_tolerance();
    for (u, mate) in m.mate_left.iter().enumerate() {
        if let Some(v) = *mate {
            if v >= g.n_right || m.mate_right[v] != Some(u) || g.weight(u, v).is_none() {
                violations.push(DualViolation::BadMate {
                    left: Some(u),
                    right: Some(v),
                });
            }
        }
    }
    for (v, mate) in m.mate_right.iter().enumerate() {
        if let Some(u) = *mate {
            if u >= g.n_left || m.mate_left[u] != Some(v) {
                violations.push(DualViolation::BadMate {
                    left: Some(u),
                    right: Some(v),
                });
            }
        }
    }
    for e in &g.edges {
        let sum = m.a[e.left] + m.b[e.right];
        if m.mate_left[e.left] == Some(e.right) {
            let gap = e.weight - sum;
            if gap.abs() > eps {
                violations.push(DualViolation::NotTight {
                    left: e.left,
                    right: e.right,
                    gap,
                });
            }
        } else if sum - e.weight > eps {
            violations.push(DualViolation::Infeasible {
                left: e.left,
                right: e.right,
                excess: sum - e.weight,
            });
        }
    }
    DualReport {
        ok: violations.is_empty(),
        violations,
    }
}

/// Minimum-weight maximum-cardinality matching with feasible duals.
pub fn min_weight_matching(g: &BipartiteGraph) -> MatchingWithDuals {
    let mut m = MatchingWithDuals::empty(g);
    augment_to_maximum(g, &mut m);
    m
}

/// Extends a valid partial matching to maximum cardinality.
///
/// The input duals must pass [`verify_duals`]. The result is a maximum
/// matching with feasible, tight duals; it has minimum weight whenever it is
/// perfect, or when the free vertices of each side start with equal duals
/// (as they do for an empty start).
pub fn resume_matching(g: &BipartiteGraph, m: &MatchingWithDuals) -> Result<MatchingWithDuals> {
    let report = verify_duals(g, m);
    if !report.ok {
        return Err(Error::InvalidDuals(report.violations.len()));
    }
    let mut out = m.clone();
    augment_to_maximum(g, &mut out);
    Ok(out)
}

/// Repeats [`augment`] until no augmenting path remains; returns the number
/// of augmentations.
pub(crate) fn augment_to_maximum(g: &BipartiteGraph, m: &mut MatchingWithDuals) -> usize {
    let strategy = Strategy::for_graph(g);
    let mut search = Search::new(g);
    let mut count = 0;
    while search.augment(g, m, strategy) {
        count += 1;
    }
    m.recompute_weight(g);
    count
}

/// Performs one shortest augmenting path step. Returns `false` when the
/// matching is already maximum.
pub fn augment(g: &BipartiteGraph, m: &mut MatchingWithDuals) -> bool {
    let mut search = Search::new(g);
    let found = search.augment(g, m, Strategy::for_graph(g));
    if found {
        m.recompute_weight(g);
    }
    found
}

/// How the next vertex to settle is selected. Both orders pick the minimum
/// `(distance, vertex id)` so they produce identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Strategy {
    Heap,
    Scan,
}

impl Strategy {
    fn for_graph(g: &BipartiteGraph) -> Strategy {
        let nodes = g.n_left + g.n_right;
        if g.edges.len() * 8 >= nodes * nodes {
            Strategy::Scan
        } else {
            Strategy::Heap
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

struct Search {
    n_left: usize,
    dist: Vec<f64>,
    done: Vec<bool>,
    pred: Vec<usize>,
    heap: BinaryHeap<Reverse<Key>>,
}

impl Search {
    fn new(g: &BipartiteGraph) -> Self {
        let nodes = g.n_left + g.n_right;
        Search {
            n_left: g.n_left,
            dist: vec![f64::INFINITY; nodes],
            done: vec![false; nodes],
            pred: vec![usize::MAX; g.n_right],
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        self.dist.fill(f64::INFINITY);
        self.done.fill(false);
        self.heap.clear();
    }

    fn offer(&mut self, id: usize, d: f64, strategy: Strategy) -> bool {
        if !self.done[id] && d < self.dist[id] {
            self.dist[id] = d;
            if strategy == Strategy::Heap {
                self.heap.push(Reverse(Key(d, id)));
            }
            true
        } else {
            false
        }
    }

    fn next(&mut self, strategy: Strategy) -> Option<(usize, f64)> {
        match strategy {
            Strategy::Heap => {
                while let Some(Reverse(Key(d, id))) = self.heap.pop() {
                    if !self.done[id] && d == self.dist[id] {
                        return Some((id, d));
                    }
                }
                None
            }
            Strategy::Scan => {
                let mut best: Option<(usize, f64)> = None;
                for (id, (&d, &done)) in self.dist.iter().zip(&self.done).enumerate() {
                    if !done && d.is_finite() && best.is_none_or(|(_, bd)| d < bd) {
                        best = Some((id, d));
                    }
                }
                best
            }
        }
    }

    fn augment(
        &mut self,
        g: &BipartiteGraph,
        m: &mut MatchingWithDuals,
        strategy: Strategy,
    ) -> bool {
        self.reset();
        let nl = self.n_left;
        for u in 0..nl {
            if m.mate_left[u].is_none() {
                self.offer(u, 0.0, strategy);
            }
        }
        let mut target = None;
        while let Some((id, d)) = self.next(strategy) {
            self.done[id] = true;
            if id < nl {
                let u = id;
                for e in g.left_edges(u) {
                    if m.mate_left[u] == Some(e.right) {
                        continue;
                    }
                    let reduced = (e.weight - m.a[u] - m.b[e.right]).max(0.0);
                    if self.offer(nl + e.right, d + reduced, strategy) {
                        self.pred[e.right] = u;
                    }
                }
            } else {
                let v = id - nl;
                match m.mate_right[v] {
                    None => {
                        target = Some((v, d));
                        break;
                    }
                    Some(u) => {
                        self.offer(u, d, strategy);
                    }
                }
            }
        }
        let Some((target, length)) = target else {
            return false;
        };

        for u in 0..nl {
            m.a[u] -= self.dist[u].min(length);
        }
        for v in 0..g.n_right {
            m.b[v] += self.dist[nl + v].min(length);
        }

        let mut v = target;
        loop {
            let u = self.pred[v];
            let previous = m.mate_left[u];
            m.mate_left[u] = Some(v);
            m.mate_right[v] = Some(u);
            match previous {
                Some(p) => v = p,
                None => break,
            }
        }
        true
    }
}

#[cfg(test)]
pub(crate) fn min_weight_matching_with(
    g: &BipartiteGraph,
    strategy: Strategy,
) -> MatchingWithDuals {
    let mut m = MatchingWithDuals::empty(g);
    let mut search = Search::new(g);
    while search.augment(g, &mut m, strategy) {}
    m.recompute_weight(g);
    m
}
