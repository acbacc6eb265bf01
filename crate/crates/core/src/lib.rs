//! Systems of nonoverlapping balls with maximum sum of radii.
//!
//! The radius-sum problem on `n` centers is the linear-programming dual of
//! a minimum cycle cover of the complete graph on the centers. Cycle covers
//! are perfect matchings in the bipartite double cover, and the matching
//! duals average to optimal radii.
//!
//! * [`solver::solve_general`] handles any finite metric in cubic time.
//! * [`geometry::solve_euclidean`] handles L_p point sets through the sparse
//!   nearest-neighbor overlap graph and a separator hierarchy.
//! * [`transforms`] reduces lower-bounded radii and minimum-hub star
//!   embeddings to the unconstrained problem.
//! * [`oracle`] holds brute-force references and certificate checks.

pub mod cover;
pub mod error;
pub mod geometry;
pub mod matching;
pub mod metric;
pub mod oracle;
pub mod solver;
pub mod tolerance;
pub mod transforms;

pub use cover::{CycleCover, WeightedGraph};
pub use error::{Error, Result};
pub use matching::{BipartiteGraph, MatchingWithDuals};
pub use metric::{MetricInstance, Norm};
pub use solver::{BallAssignment, OptimalityCertificate, Verdict};
