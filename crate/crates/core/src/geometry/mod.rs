//! Subquadratic path for points under an L_p norm.
//!
//! The minimum cycle cover only uses edges of the nearest-neighbor overlap
//! graph, which is sparse and has small separators, so the matching runs
//! divide-and-conquer over a separator hierarchy of that graph instead of
//! over the complete graph.

mod kdtree;
pub mod nn_graph;
pub mod separated;
pub mod separator;

pub use nn_graph::{build_nn_overlap_graph, nearest_neighbor_distances, NNOverlapGraph};
pub use separated::{
    separated_matching, separated_matching_with_stats, NodeStats, SeparatedMatching,
};
pub use separator::{build_separator_tree, CutKind, SeparatorNode, SeparatorTree, Split};

use crate::cover::double_cover;
use crate::error::{Error, Result};
use crate::metric::MetricInstance;
use crate::solver::{assemble, BallAssignment};

#[derive(Debug, Clone, PartialEq)]
pub struct GeometricOptions {
    /// Nodes with at most this many points are solved directly.
    pub leaf_size: usize,
    /// Largest fraction of a node either side of a split may hold.
    pub balance: f64,
    /// Random sphere candidates per node.
    pub trials: usize,
    /// Points sampled per node to place the spheres.
    pub sample_size: usize,
    pub seed: u64,
}

impl Default for GeometricOptions {
    fn default() -> Self {
        GeometricOptions {
            leaf_size: 32,
            balance: 0.75,
            trials: 20,
            sample_size: 500,
            seed: 0,
        }
    }
}

/// Everything the geometric pipeline built on the way to the answer.
#[derive(Debug, Clone)]
pub struct GeometricSolution {
    pub assignment: BallAssignment,
    pub graph: NNOverlapGraph,
    pub tree: SeparatorTree,
    pub stats: Vec<NodeStats>,
}

/// Optimal radii for a coordinate instance with default options.
pub fn solve_euclidean(inst: &MetricInstance) -> Result<BallAssignment> {
    solve_euclidean_with(inst, &GeometricOptions::default())
}

pub fn solve_euclidean_with(
    inst: &MetricInstance,
    opts: &GeometricOptions,
) -> Result<BallAssignment> {
    solve_euclidean_detailed(inst, opts).map(|s| s.assignment)
}

pub fn solve_euclidean_detailed(
    inst: &MetricInstance,
    opts: &GeometricOptions,
) -> Result<GeometricSolution> {
    if !inst.is_coordinates() {
        return Err(Error::NotCoordinates);
    }
    let graph = build_nn_overlap_graph(inst)?;
    let tree = build_separator_tree(&graph, inst, opts)?;
    let weighted = graph.to_weighted(inst);
    let doubled = double_cover(&weighted);
    let SeparatedMatching { matching, stats } = separated_matching_with_stats(&doubled, &tree)?;
    if !matching.is_perfect() {
        return Err(Error::NotPerfect {
            matched: matching.cardinality(),
            n: inst.len(),
        });
    }
    let assignment = assemble(inst, &weighted, matching)?;
    Ok(GeometricSolution {
        assignment,
        graph,
        tree,
        stats,
    })
}
