//! Divide-and-conquer matching on the double cover of a graph with a
//! separator hierarchy.
//!
//! Both copies of every point follow the point through the hierarchy. The
//! two child problems share only the separator, so their duals are merged
//! by taking the smaller value at each shared copy, which keeps every edge
//! feasible. A child's matched edge survives only when both of its ends
//! took their duals from that child; the node then augments back to a
//! maximum matching.

use super::separator::SeparatorTree;
use crate::error::{Error, Result};
use crate::matching::{min_weight_matching, resume_matching, BipartiteGraph, MatchingWithDuals};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeStats {
    pub node: usize,
    pub size: usize,
    pub separator: usize,
    /// Augmenting paths found at this node after merging the children.
    pub augmentations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparatedMatching {
    pub matching: MatchingWithDuals,
    /// One entry per tree node, in node order.
    pub stats: Vec<NodeStats>,
}

/// Minimum-weight maximum matching of `g`, the double cover of the graph
/// that `tree` was built on. Left and right vertex `i` are the two copies
/// of point `i`.
///
/// Weights are minimum when the result is perfect; the double cover of
/// the nearest-neighbor overlap graph always has a perfect matching.
pub fn separated_matching(g: &BipartiteGraph, tree: &SeparatorTree) -> Result<MatchingWithDuals> {
    separated_matching_with_stats(g, tree).map(|s| s.matching)
}

pub fn separated_matching_with_stats(
    g: &BipartiteGraph,
    tree: &SeparatorTree,
) -> Result<SeparatedMatching> {
    let n = tree.len();
    if g.n_left() != n || g.n_right() != n {
        return Err(Error::TreeMismatch(format!(
            "graph has {}+{} vertices, tree has {n} points",
            g.n_left(),
            g.n_right()
        )));
    }
    let (matching, mut stats) = solve(g, tree, 0)?;
    stats.sort_by_key(|s| s.node);
    Ok(SeparatedMatching { matching, stats })
}

/// Subgraph of `g` induced by both copies of `vs` (sorted), renumbered by
/// position in `vs`.
fn local_graph(g: &BipartiteGraph, vs: &[usize]) -> BipartiteGraph {
    let edges = vs.iter().enumerate().flat_map(|(x, &u)| {
        g.left_edges(u)
            .iter()
            .filter_map(move |e| vs.binary_search(&e.right).ok().map(|y| (x, y, e.weight)))
    });
    BipartiteGraph::new(vs.len(), vs.len(), edges).expect("subgraph of a valid graph")
}

fn solve(
    g: &BipartiteGraph,
    tree: &SeparatorTree,
    id: usize,
) -> Result<(MatchingWithDuals, Vec<NodeStats>)> {
    let node = &tree.nodes[id];
    let vs = &node.vertices;
    let local = local_graph(g, vs);
    let Some([c0, c1]) = node.children else {
        let m = min_weight_matching(&local);
        let stats = NodeStats {
            node: id,
            size: vs.len(),
            separator: 0,
            augmentations: m.cardinality(),
        };
        return Ok((m, vec![stats]));
    };
    let (first, second) = rayon::join(|| solve(g, tree, c0), || solve(g, tree, c1));
    let (m0, mut stats) = first?;
    let (m1, stats1) = second?;
    stats.extend(stats1);

    let size = vs.len();
    let mut a = vec![f64::INFINITY; size];
    let mut b = vec![f64::INFINITY; size];
    let mut source_a = vec![usize::MAX; size];
    let mut source_b = vec![usize::MAX; size];
    let mut positions = Vec::with_capacity(2);
    for (c, (child, m)) in [(c0, &m0), (c1, &m1)].into_iter().enumerate() {
        let pos: Vec<usize> = tree.nodes[child]
            .vertices
            .iter()
            .map(|u| {
                vs.binary_search(u).map_err(|_| {
                    Error::TreeMismatch(format!("node {child} is not inside node {id}"))
                })
            })
            .collect::<Result<_>>()?;
        for (cx, &x) in pos.iter().enumerate() {
            // Strict comparison: on a tie the first child keeps the copy.
            if m.a[cx] < a[x] {
                a[x] = m.a[cx];
                source_a[x] = c;
            }
            if m.b[cx] < b[x] {
                b[x] = m.b[cx];
                source_b[x] = c;
            }
        }
        positions.push(pos);
    }
    if source_a.contains(&usize::MAX) || source_b.contains(&usize::MAX) {
        return Err(Error::TreeMismatch(format!(
            "children of node {id} miss a vertex"
        )));
    }
    let mut merged = MatchingWithDuals::empty(&local);
    merged.a = a;
    merged.b = b;
    for (c, m) in [&m0, &m1].into_iter().enumerate() {
        let pos = &positions[c];
        for (cx, cy) in m.pairs() {
            let (x, y) = (pos[cx], pos[cy]);
            if source_a[x] == c && source_b[y] == c {
                merged.mate_left[x] = Some(y);
                merged.mate_right[y] = Some(x);
            }
        }
    }
    let kept = merged.cardinality();
    let result = resume_matching(&local, &merged)?;
    stats.push(NodeStats {
        node: id,
        size,
        separator: node.split.as_ref().map_or(0, |s| s.separator.len()),
        augmentations: result.cardinality() - kept,
    });
    Ok((result, stats))
}

#[cfg(test)]
mod tests {
    use super::super::nn_graph::build_nn_overlap_graph;
    use super::super::separator::build_separator_tree;
    use super::super::GeometricOptions;
    use super::*;
    use crate::cover::double_cover;
    use crate::matching::verify_duals;
    use crate::metric::{MetricInstance, Norm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(pts: &[Vec<f64>], leaf_size: usize) -> (BipartiteGraph, SeparatorTree) {
        let inst = MetricInstance::from_points(pts, Norm::L2).unwrap();
        let nn = build_nn_overlap_graph(&inst).unwrap();
        let opts = GeometricOptions {
            leaf_size,
            ..GeometricOptions::default()
        };
        let tree = build_separator_tree(&nn, &inst, &opts).unwrap();
        (double_cover(&nn.to_weighted(&inst)), tree)
    }

    #[test]
    fn collinear_triangle() {
        let (g, tree) = setup(&[vec![0.0], vec![1.0], vec![3.0]], 32);
        let m = separated_matching(&g, &tree).unwrap();
        assert!(m.is_perfect());
        assert_eq!(m.total_weight, 6.0);
    }

    #[test]
    fn agrees_with_direct_matching() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..10 {
            let n = rng.gen_range(40..300);
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.gen::<f64>() * 10.0, rng.gen::<f64>() * 10.0])
                .collect();
            let (g, tree) = setup(&pts, 8);
            assert!(tree.nodes.len() > 1, "round {round}");
            let sm = separated_matching_with_stats(&g, &tree).unwrap();
            let direct = min_weight_matching(&g);
            assert!(sm.matching.is_perfect());
            assert!(verify_duals(&g, &sm.matching).ok);
            let rel = (sm.matching.total_weight - direct.total_weight).abs() / direct.total_weight;
            assert!(rel < 1e-9, "round {round}: {rel}");
            assert_eq!(sm.stats.len(), tree.nodes.len());
            for s in &sm.stats {
                if tree.nodes[s.node].children.is_some() {
                    // At most one augmentation per separator copy on each side.
                    assert!(s.augmentations <= 2 * s.separator, "{s:?}");
                }
            }
        }
    }

    #[test]
    fn rejects_wrong_size() {
        let (_, tree) = setup(&[vec![0.0], vec![1.0], vec![3.0]], 32);
        let g = BipartiteGraph::new(2, 2, [(0, 1, 1.0)]).unwrap();
        assert!(separated_matching(&g, &tree).is_err());
    }
}
