//! Exact radius-sum solver for arbitrary finite metrics, plus the
//! closed-form odd-cycle radii and the touching-graph certificate.

use crate::cover::{double_cover, matching_to_cover, split_even_cycles, CycleCover, WeightedGraph};
use crate::error::{Error, Result};
use crate::matching::{min_weight_matching, MatchingWithDuals};
use crate::metric::MetricInstance;
use crate::oracle::check_feasible;
use crate::tolerance;

/// Dual variables of the double-cover matching: `a` on red copies, `b` on
/// blue copies, one of each per point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Duals {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Optimal radii together with the cycle cover that certifies them.
#[derive(Debug, Clone, PartialEq)]
pub struct BallAssignment {
    pub radii: Vec<f64>,
    pub value: f64,
    pub cover: CycleCover,
    pub duals: Duals,
    /// Points of 2-cycles whose radius was moved off the dual average to
    /// remove a negative radius. Empty in the common case.
    pub adjusted: Vec<usize>,
}

/// Maximum radius sum for any finite metric via a minimum-weight perfect
/// matching on the double cover of the complete graph.
///
/// A single point gets radius 0 and an empty cover.
pub fn solve_general(inst: &MetricInstance) -> Result<BallAssignment> {
    let n = inst.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    if n == 1 {
        return Ok(BallAssignment {
            radii: vec![0.0],
            value: 0.0,
            cover: CycleCover::empty(1),
            duals: Duals {
                a: vec![0.0],
                b: vec![0.0],
            },
            adjusted: Vec::new(),
        });
    }
    let graph = WeightedGraph::complete(inst);
    let matching = min_weight_matching(&double_cover(&graph));
    assemble(inst, &graph, matching)
}

/// Turns an optimal perfect matching on the double cover of `graph` into a
/// ball assignment: cover from the matched edges, even cycles split, radii
/// averaged from the duals.
pub(crate) fn assemble(
    inst: &MetricInstance,
    graph: &WeightedGraph,
    matching: MatchingWithDuals,
) -> Result<BallAssignment> {
    let cover = split_even_cycles(&matching_to_cover(&matching, graph)?, graph);
    let mut radii = radii_from_duals(&matching.a, &matching.b);
    let eps = tolerance::feasibility(inst.diameter_bound());
    let adjusted = settle_negative_radii(&mut radii, &cover, |i, j| inst.dist(i, j), eps);
    let value = radii.iter().sum();
    Ok(BallAssignment {
        radii,
        value,
        cover,
        duals: Duals {
            a: matching.a,
            b: matching.b,
        },
        adjusted,
    })
}

/// Radius of each point as the average of its two dual variables.
pub fn radii_from_duals(a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len(), "one dual of each color per point");
    a.iter().zip(b).map(|(x, y)| (x + y) / 2.0).collect()
}

/// Removes negative radii left by the dual average.
///
/// Every cover edge is tight at an optimum. A 2-cycle `{i, j}` with
/// `r_i < 0` is shifted to `r_i = 0, r_j = d(i,j)`, keeping the sum; any
/// third point `k` then satisfies `r_k <= d(j,k) - r_j(old) <= d(i,k)`.
/// Odd-cycle radii are unique and nonnegative at an optimum, so only
/// rounding noise is clamped there.
fn settle_negative_radii(
    radii: &mut [f64],
    cover: &CycleCover,
    dist: impl Fn(usize, usize) -> f64,
    eps: f64,
) -> Vec<usize> {
    let mut adjusted = Vec::new();
    for cycle in cover.cycles.iter().filter(|c| c.len() == 2) {
        let (i, j) = (cycle[0], cycle[1]);
        let (low, high) = if radii[i] <= radii[j] { (i, j) } else { (j, i) };
        if radii[low] < -eps {
            radii[high] = dist(i, j);
            radii[low] = 0.0;
            adjusted.extend([i, j]);
        }
    }
    for r in radii.iter_mut() {
        if *r < 0.0 && *r >= -eps {
            *r = 0.0;
        }
    }
    adjusted
}

/// Unique optimal radii on an odd cycle with edge lengths
/// `lengths[t] = d(p_t, p_{t+1 mod k})`.
///
/// `r_j` is half the alternating sum of the lengths starting at edge `j`
/// with a plus sign, so both edges at `p_j` count positively and
/// consecutive balls touch exactly.
pub fn odd_cycle_radii(lengths: &[f64]) -> Result<Vec<f64>> {
    let k = lengths.len();
    if k < 3 || k % 2 == 0 {
        return Err(Error::OddCycle(format!(
            "cycle length {k} is not odd and at least 3"
        )));
    }
    if let Some(l) = lengths.iter().find(|l| !l.is_finite() || **l < 0.0) {
        return Err(Error::OddCycle(format!("invalid edge length {l}")));
    }
    let radii: Vec<f64> = (0..k)
        .map(|j| {
            (0..k)
                .map(|t| {
                    let l = lengths[(j + t) % k];
                    if t % 2 == 0 {
                        l
                    } else {
                        -l
                    }
                })
                .sum::<f64>()
                / 2.0
        })
        .collect();
    let longest = lengths.iter().copied().fold(0.0, f64::max);
    let eps = tolerance::feasibility(longest);
    if let Some((j, r)) = radii.iter().enumerate().find(|(_, r)| **r < -eps) {
        return Err(Error::OddCycle(format!(
            "radius {r} at position {j} is negative; the cycle is not part of a minimum cover"
        )));
    }
    Ok(radii)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    CertifiedOptimal,
    Inconclusive,
    Infeasible,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::CertifiedOptimal => "certified-optimal",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    IsolatedVertex,
    IsolatedEdge,
    OddCycle,
    EvenCycle,
    Path,
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub shape: Shape,
}

/// Touching graph of a ball system and the sufficient optimality test built
/// on it: nonoverlapping balls whose touching components are all odd cycles
/// or isolated edges have maximum radius sum.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityCertificate {
    pub touching_graph: Vec<(usize, usize)>,
    pub verdict: Verdict,
    pub component_shapes: Vec<Component>,
}

pub fn check_optimality_certificate(inst: &MetricInstance, radii: &[f64]) -> OptimalityCertificate {
    let n = inst.len();
    let feasibility = check_feasible(inst, radii);
    let eps = feasibility.tolerance;
    let mut touching = Vec::new();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if (radii[i] + radii[j] - inst.dist(i, j)).abs() <= eps {
                touching.push((i, j));
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut component_shapes = Vec::new();
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut vertices = vec![start];
        let mut k = 0;
        while k < vertices.len() {
            let v = vertices[k];
            k += 1;
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    vertices.push(w);
                }
            }
        }
        vertices.sort_unstable();
        let size = vertices.len();
        let edges: usize = vertices.iter().map(|&v| adj[v].len()).sum::<usize>() / 2;
        let max_degree = vertices.iter().map(|&v| adj[v].len()).max().unwrap_or(0);
        let all_two = vertices.iter().all(|&v| adj[v].len() == 2);
        let shape = if size == 1 {
            Shape::IsolatedVertex
        } else if size == 2 {
            Shape::IsolatedEdge
        } else if all_two && edges == size {
            if size % 2 == 1 {
                Shape::OddCycle
            } else {
                Shape::EvenCycle
            }
        } else if edges + 1 == size && max_degree <= 2 {
            Shape::Path
        } else {
            Shape::Other
        };
        component_shapes.push(Component { vertices, shape });
    }
    let verdict = if !feasibility.feasible {
        Verdict::Infeasible
    } else if component_shapes
        .iter()
        .all(|c| matches!(c.shape, Shape::OddCycle | Shape::IsolatedEdge))
    {
        Verdict::CertifiedOptimal
    } else {
        Verdict::Inconclusive
    };
    OptimalityCertificate {
        touching_graph: touching,
        verdict,
        component_shapes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Norm;

    fn pts(p: &[&[f64]]) -> MetricInstance {
        let v: Vec<Vec<f64>> = p.iter().map(|x| x.to_vec()).collect();
        MetricInstance::from_points(&v, Norm::L2).unwrap()
    }

    fn square() -> MetricInstance {
        pts(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]])
    }

    #[test]
    fn collinear_solution() {
        let s = solve_general(&pts(&[&[0.0], &[1.0], &[3.0]])).unwrap();
        assert_eq!(s.radii, vec![1.0, 0.0, 2.0]);
        assert_eq!(s.value, 3.0);
        assert_eq!(s.cover.total_weight, 6.0);
        assert_eq!(s.cover.cycles, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn two_points() {
        let s = solve_general(&pts(&[&[0.0], &[5.0]])).unwrap();
        assert_eq!(s.value, 5.0);
        assert_eq!(s.radii[0] + s.radii[1], 5.0);
        assert!(s.radii.iter().all(|&r| r >= 0.0));
    }

    #[test]
    fn unit_square() {
        let s = solve_general(&square()).unwrap();
        assert!((s.value - 2.0).abs() < 1e-12);
        assert_eq!(s.cover.total_weight, 4.0);
        assert!(s.cover.cycles.iter().all(|c| c.len() == 2));
        for c in &s.cover.cycles {
            let (i, j) = (c[0], c[1]);
            assert_eq!(square().dist(i, j), 1.0, "2-cycle on a unit side");
        }
    }

    #[test]
    fn single_point() {
        let inst = MetricInstance::from_matrix(&[vec![0.0]]).unwrap();
        let s = solve_general(&inst).unwrap();
        assert_eq!(s.radii, vec![0.0]);
        assert!(s.cover.edges.is_empty());
    }

    #[test]
    fn duplicates_force_zero() {
        let s = solve_general(&pts(&[&[0.0], &[0.0], &[4.0]])).unwrap();
        assert_eq!(s.radii[0], 0.0);
        assert_eq!(s.radii[1], 0.0);
        assert_eq!(s.value, 4.0);
    }

    #[test]
    fn dual_average() {
        assert_eq!(
            radii_from_duals(&[1.0, 0.0, 2.0], &[1.0, 0.0, 2.0]),
            vec![1.0, 0.0, 2.0]
        );
        assert_eq!(
            radii_from_duals(&[1.5, -0.5, 2.5], &[0.5, 0.5, 1.5]),
            vec![1.0, 0.0, 2.0]
        );
        assert_eq!(radii_from_duals(&[0.0; 3], &[0.0; 3]), vec![0.0; 3]);
    }

    #[test]
    fn odd_cycles() {
        assert_eq!(
            odd_cycle_radii(&[1.0, 2.0, 3.0]).unwrap(),
            vec![1.0, 0.0, 2.0]
        );
        assert_eq!(odd_cycle_radii(&[1.0; 5]).unwrap(), vec![0.5; 5]);
        assert_eq!(odd_cycle_radii(&[2.0; 3]).unwrap(), vec![1.0; 3]);
        assert!(odd_cycle_radii(&[1.0; 4]).is_err());
        assert!(odd_cycle_radii(&[1.0]).is_err());
        // A triangle with one long side cannot come from a minimum cover.
        assert!(odd_cycle_radii(&[1.0, 1.0, 5.0]).is_err());
    }

    #[test]
    fn certificates() {
        // Every optimum of the square touches on all four sides, an even
        // cycle, so the certificate cannot decide it.
        let sq = check_optimality_certificate(&square(), &[0.5; 4]);
        assert_eq!(sq.verdict, Verdict::Inconclusive);
        assert_eq!(sq.touching_graph.len(), 4);
        assert_eq!(sq.component_shapes[0].shape, Shape::EvenCycle);

        // Two far-apart pairs are isolated edges.
        let pairs = pts(&[&[0.0], &[1.0], &[10.0], &[11.0]]);
        let c = check_optimality_certificate(&pairs, &[0.5; 4]);
        assert_eq!(c.verdict, Verdict::CertifiedOptimal);

        let line = pts(&[&[0.0], &[1.0], &[3.0]]);
        let c = check_optimality_certificate(&line, &[1.0, 0.0, 2.0]);
        assert_eq!(c.verdict, Verdict::CertifiedOptimal);
        assert_eq!(c.component_shapes.len(), 1);
        assert_eq!(c.component_shapes[0].shape, Shape::OddCycle);

        let pair = pts(&[&[0.0], &[5.0]]);
        let c = check_optimality_certificate(&pair, &[2.0, 2.0]);
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!(c.touching_graph.is_empty());

        let c = check_optimality_certificate(&pair, &[3.0, 3.0]);
        assert_eq!(c.verdict, Verdict::Infeasible);
    }
}
