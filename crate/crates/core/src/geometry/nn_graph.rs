use rayon::prelude::*;

use super::kdtree::KdTree;
use crate::cover::WeightedGraph;
use crate::error::{Error, Result};
use crate::metric::MetricInstance;

/// Relative slack on the touching test. Exactly touching balls (three
/// collinear points, say) can miss `d <= delta_i + delta_j` by a rounding
/// step, and losing such an edge can leave the graph without a cycle
/// cover. Extra edges are harmless.
pub const TOUCH_SLACK: f64 = 1e-12;

/// Whether balls of radii `a` and `b` at distance `d` overlap or touch.
pub fn touches(d: f64, a: f64, b: f64) -> bool {
    d <= (a + b) * (1.0 + TOUCH_SLACK)
}

/// Intersection graph of the nearest-neighbor balls: `i` and `j` are
/// adjacent when `d(i,j) <= delta_i + delta_j`, touching included.
#[derive(Debug, Clone, PartialEq)]
pub struct NNOverlapGraph {
    /// Nearest-neighbor distance of each point.
    pub delta: Vec<f64>,
    /// Edges `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Sorted neighbor lists.
    pub adjacency: Vec<Vec<usize>>,
}

impl NNOverlapGraph {
    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }

    /// Same edges weighted by the instance's distances.
    pub fn to_weighted(&self, inst: &MetricInstance) -> WeightedGraph {
        WeightedGraph::new(
            self.len(),
            self.edges.iter().map(|&(i, j)| (i, j, inst.dist(i, j))),
        )
        .expect("overlap graph edges are valid")
    }
}

fn coordinates(inst: &MetricInstance) -> Result<(Vec<f64>, usize)> {
    let dim = inst.dim().ok_or(Error::NotCoordinates)?;
    let coords = (0..inst.len())
        .flat_map(|i| inst.point(i).expect("coordinate instance").to_vec())
        .collect();
    Ok((coords, dim))
}

/// Exact nearest-neighbor distance of every point, via kd-tree search.
pub fn nearest_neighbor_distances(inst: &MetricInstance) -> Result<Vec<f64>> {
    let n = inst.len();
    if n < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: n,
        });
    }
    let (coords, dim) = coordinates(inst)?;
    let norm = inst.norm().expect("coordinate instance");
    let tree = KdTree::new(&coords, dim, norm);
    Ok((0..n)
        .into_par_iter()
        .map(|i| tree.nearest_other(i, |a, b| inst.dist(a, b)))
        .collect())
}

/// Builds the nearest-neighbor overlap graph. Candidate pairs come from a
/// kd-tree query that prunes boxes farther than `delta_i` plus the largest
/// `delta` stored below them.
pub fn build_nn_overlap_graph(inst: &MetricInstance) -> Result<NNOverlapGraph> {
    let delta = nearest_neighbor_distances(inst)?;
    let n = inst.len();
    let (coords, dim) = coordinates(inst)?;
    let norm = inst.norm().expect("coordinate instance");
    let mut tree = KdTree::new(&coords, dim, norm);
    tree.set_radii(&delta);
    let adjacency: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut adj = Vec::new();
            tree.overlapping(&coords[i * dim..(i + 1) * dim], delta[i], |j| {
                if j != i && touches(inst.dist(i, j), delta[i], delta[j]) {
                    adj.push(j);
                }
            });
            adj.sort_unstable();
            adj
        })
        .collect();
    let edges = adjacency
        .iter()
        .enumerate()
        .flat_map(|(i, adj)| adj.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
        .collect();
    Ok(NNOverlapGraph {
        delta,
        edges,
        adjacency,
    })
}
