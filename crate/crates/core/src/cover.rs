//! Cycle covers, the bipartite double cover, and the correspondence between
//! perfect matchings of the double cover and cycle covers of the base graph.

use crate::error::{Error, Result};
use crate::matching::{BipartiteGraph, MatchingWithDuals};
use crate::metric::MetricInstance;

/// Undirected weighted graph without self-loops. Parallel edges collapse to
/// the lightest.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    adjacency: Vec<Vec<(usize, f64)>>,
    edge_count: usize,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidEdge(i, j, "endpoint out of range".into()));
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidEdge(i, j, format!("weight {w}")));
            }
            adjacency[i].push((j, w));
            adjacency[j].push((i, w));
        }
        let mut edge_count = 0;
        for adj in &mut adjacency {
            adj.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
            adj.dedup_by(|later, kept| later.0 == kept.0);
            edge_count += adj.len();
        }
        Ok(WeightedGraph {
            n,
            adjacency,
            edge_count: edge_count / 2,
        })
    }

    /// The complete graph on the instance's points.
    pub fn complete(inst: &MetricInstance) -> Self {
        let n = inst.len();
        let adjacency = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (j, inst.dist(i, j)))
                    .collect()
            })
            .collect();
        WeightedGraph {
            n,
            adjacency,
            edge_count: n * n.saturating_sub(1) / 2,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Neighbors of `i` with edge weights, sorted by neighbor.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let adj = self.adjacency.get(i)?;
        adj.binary_search_by(|e| e.0.cmp(&j)).ok().map(|k| adj[k].1)
    }

    /// Each edge once as `(i, j, w)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, adj)| {
            adj.iter()
                .filter(move |&&(j, _)| j > i)
                .map(move |&(j, w)| (i, j, w))
        })
    }
}

/// Bipartite double cover: left vertex `i` is the red copy of `i`, right
/// vertex `j` the blue copy. Each edge `{i, j}` yields red i–blue j and
/// red j–blue i with the same weight.
pub fn double_cover(g: &WeightedGraph) -> BipartiteGraph {
    let edges = g
        .adjacency
        .iter()
        .enumerate()
        .flat_map(|(i, adj)| adj.iter().map(move |&(j, w)| (i, j, w)));
    BipartiteGraph::new(g.n, g.n, edges).expect("weighted graph edges are valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverEdge {
    pub i: usize,
    pub j: usize,
    pub multiplicity: u8,
}

/// Multigraph with degree two at every vertex. A 2-cycle is one edge with
/// multiplicity 2. Halving the multiplicities gives the half-integral dual
/// edge weights of the radius-sum program.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleCover {
    pub n: usize,
    /// Edges with `i < j`, sorted.
    pub edges: Vec<CoverEdge>,
    /// Each cycle starts at its lowest vertex and continues toward the
    /// lower-indexed of that vertex's two neighbors.
    pub cycles: Vec<Vec<usize>>,
    pub total_weight: f64,
}

impl CycleCover {
    /// The cover with no edges, used for single-point instances.
    pub fn empty(n: usize) -> Self {
        CycleCover {
            n,
            edges: Vec::new(),
            cycles: Vec::new(),
            total_weight: 0.0,
        }
    }

    /// Builds a cover from `(i, j, multiplicity)` triples, merging repeats
    /// and checking that every vertex has degree two.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, u8)>,
        weight: impl Fn(usize, usize) -> Option<f64>,
    ) -> Result<Self> {
        let mut list: Vec<CoverEdge> = Vec::new();
        for (a, b, m) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidCover(format!("bad edge ({a}, {b})")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            list.push(CoverEdge {
                i,
                j,
                multiplicity: m,
            });
        }
        list.sort();
        let mut merged: Vec<CoverEdge> = Vec::with_capacity(list.len());
        for e in list {
            match merged.last_mut() {
                Some(last) if last.i == e.i && last.j == e.j => last.multiplicity += e.multiplicity,
                _ => merged.push(e),
            }
        }
        let mut total = 0.0;
        for e in &merged {
            if !(1..=2).contains(&e.multiplicity) {
                return Err(Error::InvalidCover(format!(
                    "edge ({}, {}) has multiplicity {}",
                    e.i, e.j, e.multiplicity
                )));
            }
            let w = weight(e.i, e.j).ok_or_else(|| {
                Error::InvalidCover(format!("edge ({}, {}) is not in the graph", e.i, e.j))
            })?;
            total += f64::from(e.multiplicity) * w;
        }
        let cycles = decompose(n, &merged)?;
        Ok(CycleCover {
            n,
            edges: merged,
            cycles,
            total_weight: total,
        })
    }

    pub fn multiplicity(&self, i: usize, j: usize) -> u8 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.edges
            .binary_search_by(|e| (e.i, e.j).cmp(&(i, j)))
            .map(|k| self.edges[k].multiplicity)
            .unwrap_or(0)
    }
}

fn degrees(n: usize, edges: &[CoverEdge]) -> Vec<usize> {
    let mut deg = vec![0usize; n];
    for e in edges {
        if e.i < n {
            deg[e.i] += e.multiplicity as usize;
        }
        if e.j < n {
            deg[e.j] += e.multiplicity as usize;
        }
    }
    deg
}

/// Splits a degree-2 multigraph into canonical cycles.
fn decompose(n: usize, edges: &[CoverEdge]) -> Result<Vec<Vec<usize>>> {
    let deg = degrees(n, edges);
    if let Some(v) = deg.iter().position(|&d| d != 2) {
        return Err(Error::InvalidCover(format!(
            "vertex {v} has degree {}",
            deg[v]
        )));
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(2); n];
    for e in edges {
        for _ in 0..e.multiplicity {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
    }
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let (x, y) = (adj[start][0], adj[start][1]);
        if x == y {
            seen[x] = true;
            cycles.push(vec![start, x]);
            continue;
        }
        let mut cycle = vec![start];
        let mut prev = start;
        let mut cur = x.min(y);
        while cur != start {
            seen[cur] = true;
            cycle.push(cur);
            let next = if adj[cur][0] == prev {
                adj[cur][1]
            } else {
                adj[cur][0]
            };
            prev = cur;
            cur = next;
        }
        cycles.push(cycle);
    }
    Ok(cycles)
}

/// Cover obtained by projecting each matched edge of a perfect matching on
/// `double_cover(g)` to its base edge.
pub fn matching_to_cover(m: &MatchingWithDuals, g: &WeightedGraph) -> Result<CycleCover> {
    let n = g.len();
    if m.mate_left.len() != n || !m.is_perfect() {
        return Err(Error::NotPerfect {
            matched: m.cardinality(),
            n,
        });
    }
    CycleCover::from_edges(n, m.pairs().into_iter().map(|(u, v)| (u, v, 1)), |i, j| {
        g.weight(i, j)
    })
}

/// Perfect matching of the double cover, as `(red, blue)` pairs sorted by
/// red vertex, obtained by orienting each canonical cycle in its stored
/// order.
pub fn cover_to_matching(c: &CycleCover) -> Result<Vec<(usize, usize)>> {
    let cycles = decompose(c.n, &c.edges)?;
    let mut pairs = Vec::with_capacity(c.n);
    for cycle in &cycles {
        let k = cycle.len();
        for t in 0..k {
            pairs.push((cycle[t], cycle[(t + 1) % k]));
        }
    }
    pairs.sort();
    Ok(pairs)
}

/// Replaces every even cycle of length at least 4 by 2-cycles on the
/// lighter of its two alternating matchings. On a tie the matching holding
/// the lexicographically smallest edge wins.
pub fn split_even_cycles(c: &CycleCover, g: &WeightedGraph) -> CycleCover {
    let weight = |i: usize, j: usize| g.weight(i, j).expect("cover edge belongs to the graph");
    let mut edges: Vec<(usize, usize, u8)> = Vec::with_capacity(c.edges.len());
    for cycle in &c.cycles {
        let k = cycle.len();
        if k == 2 {
            edges.push((cycle[0], cycle[1], 2));
            continue;
        }
        let step = |t: usize| {
            let (x, y) = (cycle[t], cycle[(t + 1) % k]);
            if x < y {
                (x, y)
            } else {
                (y, x)
            }
        };
        if k % 2 == 1 {
            edges.extend((0..k).map(|t| {
                let (x, y) = step(t);
                (x, y, 1)
            }));
            continue;
        }
        let even: Vec<(usize, usize)> = (0..k).step_by(2).map(step).collect();
        let odd: Vec<(usize, usize)> = (1..k).step_by(2).map(step).collect();
        let w_even: f64 = even.iter().map(|&(x, y)| weight(x, y)).sum();
        let w_odd: f64 = odd.iter().map(|&(x, y)| weight(x, y)).sum();
        let keep = match w_even.total_cmp(&w_odd) {
            std::cmp::Ordering::Less => even,
            std::cmp::Ordering::Greater => odd,
            std::cmp::Ordering::Equal => {
                if even.iter().min() <= odd.iter().min() {
                    even
                } else {
                    odd
                }
            }
        };
        edges.extend(keep.into_iter().map(|(x, y)| (x, y, 2)));
    }
    CycleCover::from_edges(c.n, edges, |i, j| g.weight(i, j)).expect("split cover stays valid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverReport {
    pub valid: bool,
    /// Vertices whose degree (with multiplicity) is not 2, with that degree.
    pub degree_violations: Vec<(usize, usize)>,
    pub bad_multiplicities: Vec<CoverEdge>,
    /// Cover edges absent from the graph or with out-of-range endpoints.
    pub foreign_edges: Vec<(usize, usize)>,
    pub duplicate_edges: Vec<(usize, usize)>,
    /// `(stored, recomputed)` total weight when they disagree.
    pub weight_mismatch: Option<(f64, f64)>,
    pub cycles_consistent: bool,
}

/// Structural check of a cover against its graph.
pub fn validate_cover(c: &CycleCover, g: &WeightedGraph) -> CoverReport {
    let mut report = CoverReport {
        valid: true,
        degree_violations: Vec::new(),
        bad_multiplicities: Vec::new(),
        foreign_edges: Vec::new(),
        duplicate_edges: Vec::new(),
        weight_mismatch: None,
        cycles_consistent: true,
    };
    let mut recomputed = 0.0;
    let mut seen = std::collections::BTreeSet::new();
    for e in &c.edges {
        let key = (e.i.min(e.j), e.i.max(e.j));
        if !seen.insert(key) {
            report.duplicate_edges.push(key);
        }
        if !(1..=2).contains(&e.multiplicity) {
            report.bad_multiplicities.push(*e);
        }
        match g.weight(e.i, e.j) {
            Some(w) if e.i != e.j && e.i < c.n && e.j < c.n => {
                recomputed += f64::from(e.multiplicity) * w
            }
            _ => report.foreign_edges.push((e.i, e.j)),
        }
    }
    if c.n != g.len() {
        report.foreign_edges.push((c.n, g.len()));
    }
    let deg = degrees(c.n, &c.edges);
    report.degree_violations = deg
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != 2)
        .map(|(v, &d)| (v, d))
        .collect();
    if (recomputed - c.total_weight).abs() > 1e-9 * (1.0 + recomputed.abs()) {
        report.weight_mismatch = Some((c.total_weight, recomputed));
    }
    let structural_ok = report.degree_violations.is_empty()
        && report.bad_multiplicities.is_empty()
        && report.duplicate_edges.is_empty();
    report.cycles_consistent = structural_ok
        && decompose(c.n, &c.edges)
            .map(|cycles| cycles == c.cycles)
            .unwrap_or(false);
    report.valid = structural_ok
        && report.foreign_edges.is_empty()
        && report.weight_mismatch.is_none()
        && report.cycles_consistent;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::min_weight_matching;
    use crate::metric::Norm;

    fn k(n: usize, w: f64) -> WeightedGraph {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, w)));
        WeightedGraph::new(n, edges).unwrap()
    }

    fn perfect(pairs: &[(usize, usize)], n: usize) -> MatchingWithDuals {
        let mut m = MatchingWithDuals {
            mate_left: vec![None; n],
            mate_right: vec![None; n],
            a: vec![0.0; n],
            b: vec![0.0; n],
            total_weight: 0.0,
        };
        for &(u, v) in pairs {
            m.mate_left[u] = Some(v);
            m.mate_right[v] = Some(u);
        }
        m
    }

    #[test]
    fn double_cover_sizes() {
        let g2 = double_cover(&k(2, 5.0));
        assert_eq!((g2.n_left(), g2.n_right(), g2.edge_count()), (2, 2, 2));
        assert!(g2.edges().iter().all(|e| e.weight == 5.0));
        assert_eq!(double_cover(&k(3, 1.0)).edge_count(), 6);
        assert_eq!(double_cover(&k(4, 1.0)).edge_count(), 12);
    }

    #[test]
    fn self_loop_rejected() {
        assert_eq!(
            WeightedGraph::new(2, [(1, 1, 1.0)]).unwrap_err(),
            Error::SelfLoop(1)
        );
    }

    #[test]
    fn two_cycle_from_matching() {
        let g = k(2, 3.0);
        let c = matching_to_cover(&perfect(&[(0, 1), (1, 0)], 2), &g).unwrap();
        assert_eq!(
            c.edges,
            vec![CoverEdge {
                i: 0,
                j: 1,
                multiplicity: 2
            }]
        );
        assert_eq!(c.total_weight, 6.0);
        assert_eq!(c.cycles, vec![vec![0, 1]]);
    }

    #[test]
    fn triangle_from_matching() {
        let g = k(3, 1.0);
        let c = matching_to_cover(&perfect(&[(0, 1), (1, 2), (2, 0)], 3), &g).unwrap();
        assert_eq!(c.edges.len(), 3);
        assert!(c.edges.iter().all(|e| e.multiplicity == 1));
        assert_eq!(c.cycles, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn collinear_matching_gives_triangle() {
        let pts = vec![vec![0.0], vec![1.0], vec![3.0]];
        let inst = MetricInstance::from_points(&pts, Norm::L2).unwrap();
        let g = WeightedGraph::complete(&inst);
        let m = min_weight_matching(&double_cover(&g));
        let c = matching_to_cover(&m, &g).unwrap();
        assert_eq!(c.total_weight, 6.0);
        assert_eq!(c.total_weight, m.total_weight);
        assert_eq!(c.cycles, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn non_perfect_matching_rejected() {
        let g = k(2, 1.0);
        assert!(matches!(
            matching_to_cover(&perfect(&[(0, 1)], 2), &g),
            Err(Error::NotPerfect { matched: 1, n: 2 })
        ));
    }

    #[test]
    fn cover_to_matching_orientation() {
        let g = k(3, 1.0);
        let two = CycleCover::from_edges(2, [(0, 1, 2)], |i, j| g.weight(i, j)).unwrap();
        assert_eq!(cover_to_matching(&two).unwrap(), vec![(0, 1), (1, 0)]);
        let tri =
            CycleCover::from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)], |i, j| g.weight(i, j))
                .unwrap();
        assert_eq!(
            cover_to_matching(&tri).unwrap(),
            vec![(0, 1), (1, 2), (2, 0)]
        );
    }

    fn square_graph(lengths: [f64; 4]) -> WeightedGraph {
        WeightedGraph::new(
            4,
            [
                (0, 1, lengths[0]),
                (1, 2, lengths[1]),
                (2, 3, lengths[2]),
                (0, 3, lengths[3]),
            ],
        )
        .unwrap()
    }

    fn four_cycle(g: &WeightedGraph) -> CycleCover {
        CycleCover::from_edges(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)], |i, j| {
            g.weight(i, j)
        })
        .unwrap()
    }

    #[test]
    fn split_rhombus() {
        let g = square_graph([1.0, 2.0, 1.0, 2.0]);
        let c = four_cycle(&g);
        assert_eq!(c.total_weight, 6.0);
        let s = split_even_cycles(&c, &g);
        assert_eq!(s.total_weight, 4.0);
        assert_eq!(s.cycles, vec![vec![0, 1], vec![2, 3]]);
        assert!(validate_cover(&s, &g).valid);
    }

    #[test]
    fn split_tie_prefers_smallest_edge() {
        let g = square_graph([1.0; 4]);
        let s = split_even_cycles(&four_cycle(&g), &g);
        assert_eq!(s.total_weight, 4.0);
        assert_eq!(s.multiplicity(0, 1), 2);
        assert_eq!(s.multiplicity(2, 3), 2);
    }

    #[test]
    fn split_leaves_odd_cycles() {
        let g = k(3, 1.0);
        let tri =
            CycleCover::from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)], |i, j| g.weight(i, j))
                .unwrap();
        assert_eq!(split_even_cycles(&tri, &g), tri);
    }

    #[test]
    fn validation_reports() {
        let g = k(3, 1.0);
        let tri =
            CycleCover::from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)], |i, j| g.weight(i, j))
                .unwrap();
        assert!(validate_cover(&tri, &g).valid);

        let mut dropped = tri.clone();
        dropped.edges.retain(|e| (e.i, e.j) != (0, 2));
        let r = validate_cover(&dropped, &g);
        assert!(!r.valid);
        assert_eq!(r.degree_violations, vec![(0, 1), (2, 1)]);

        let mut tripled = tri.clone();
        tripled.edges[0].multiplicity = 3;
        let r = validate_cover(&tripled, &g);
        assert!(!r.valid);
        assert_eq!(r.bad_multiplicities.len(), 1);
    }
}
