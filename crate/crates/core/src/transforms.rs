//! Reductions to the unconstrained radius-sum problem: radii bounded below
//! by a common minimum, and star embeddings with minimum total hub
//! distance.

use crate::error::{Error, Result};
use crate::metric::MetricInstance;
use crate::solver::{solve_general, BallAssignment};
use crate::tolerance;

/// All-pairs shortest-path closure (Floyd–Warshall) of a symmetric
/// nonnegative matrix.
pub fn shortest_path_closure(matrix: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = matrix.len();
    let mut d = matrix.to_vec();
    // One pass is exact in real arithmetic, but rounding can leave a path an
    // ulp shorter than a later-updated entry. Repeat until nothing changes
    // so the result is a fixed point and closing it again is a no-op.
    let mut changed = true;
    while changed {
        changed = false;
        for k in 0..n {
            for i in 0..n {
                let dik = d[i][k];
                if dik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let via = dik + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                        changed = true;
                    }
                }
            }
        }
    }
    d
}

#[derive(Debug, Clone)]
pub struct ConstrainedSolution {
    pub radii: Vec<f64>,
    pub value: f64,
    pub delta: f64,
    /// Path-closed metric on the gaps `d(i,j) - 2 delta`.
    pub transformed: MetricInstance,
    /// Unconstrained optimum on `transformed`; `radii = inner.radii + delta`.
    pub inner: BallAssignment,
}

/// Maximum radius sum subject to every radius being at least `delta`.
///
/// The gaps `d(i,j) - 2 delta` between the `delta`-balls need not satisfy
/// the triangle inequality, so they are closed under shortest paths before
/// solving; the extra radius on top of `delta` is the solution on that
/// closed metric.
pub fn lower_bounded_radii(inst: &MetricInstance, delta: f64) -> Result<ConstrainedSolution> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidRadius(delta));
    }
    let n = inst.len();
    if let Some(min_distance) = inst.min_distance() {
        if 2.0 * delta > min_distance {
            return Err(Error::RadiusTooLarge {
                delta,
                min_distance,
            });
        }
    }
    let gaps: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        (inst.dist(i, j) - 2.0 * delta).max(0.0)
                    }
                })
                .collect()
        })
        .collect();
    let transformed = MetricInstance::from_matrix_unchecked(&shortest_path_closure(&gaps));
    let inner = solve_general(&transformed)?;
    let radii: Vec<f64> = inner.radii.iter().map(|r| r + delta).collect();
    Ok(ConstrainedSolution {
        value: radii.iter().sum(),
        radii,
        delta,
        transformed,
        inner,
    })
}

#[derive(Debug, Clone)]
pub struct StarEmbedding {
    /// Distance from each point to the hub.
    pub hub: Vec<f64>,
    pub total: f64,
    pub diameter: f64,
    /// The metric `2D - d(x,y)` on which radii were maximized.
    pub transformed: MetricInstance,
    pub inner: BallAssignment,
    /// Points whose hub distance is negative beyond rounding noise. Values
    /// are reported as computed, never clamped.
    pub negative_hubs: Vec<usize>,
}

/// Non-contractive star embedding (`h_i + h_j >= d(i,j)`) with minimum
/// total hub distance.
///
/// With `D` the diameter, radii `r_i = D - h_i` are nonoverlapping under
/// `2D - d` exactly when the hub distances are non-contractive, so
/// maximizing the radius sum there minimizes the hub total.
pub fn star_embedding(inst: &MetricInstance) -> Result<StarEmbedding> {
    let n = inst.len();
    let diameter = inst.diameter()?;
    let flipped: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        2.0 * diameter - inst.dist(i, j)
                    }
                })
                .collect()
        })
        .collect();
    let transformed = MetricInstance::from_matrix_unchecked(&flipped);
    let inner = solve_general(&transformed)?;
    let hub: Vec<f64> = inner.radii.iter().map(|r| diameter - r).collect();
    let eps = tolerance::feasibility(diameter);
    let negative_hubs = hub
        .iter()
        .enumerate()
        .filter(|(_, &h)| h < -eps)
        .map(|(i, _)| i)
        .collect();
    Ok(StarEmbedding {
        total: hub.iter().sum(),
        hub,
        diameter,
        transformed,
        inner,
        negative_hubs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Norm;

    fn line(xs: &[f64]) -> MetricInstance {
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        MetricInstance::from_points(&pts, Norm::L2).unwrap()
    }

    #[test]
    fn three_on_a_line() {
        let s = lower_bounded_radii(&line(&[0.0, 1.0, 2.0]), 0.5).unwrap();
        assert_eq!(s.transformed.dist(0, 2), 0.0);
        assert_eq!(s.inner.radii, vec![0.0; 3]);
        assert_eq!(s.radii, vec![0.5; 3]);
        assert_eq!(s.value, 1.5);
    }

    #[test]
    fn inactive_bound() {
        let s = lower_bounded_radii(&line(&[0.0, 5.0]), 1.0).unwrap();
        assert_eq!(s.transformed.dist(0, 1), 3.0);
        assert_eq!(s.inner.value, 3.0);
        assert_eq!(s.value, 5.0);
    }

    #[test]
    fn zero_bound_matches_unconstrained() {
        let inst = line(&[0.0, 1.0, 3.0, 7.0]);
        let s = lower_bounded_radii(&inst, 0.0).unwrap();
        let plain = solve_general(&inst).unwrap();
        assert_eq!(s.radii, plain.radii);
    }

    #[test]
    fn bound_errors() {
        let inst = line(&[0.0, 1.0]);
        assert!(matches!(
            lower_bounded_radii(&inst, 0.6),
            Err(Error::RadiusTooLarge { .. })
        ));
        assert!(matches!(
            lower_bounded_radii(&inst, -0.1),
            Err(Error::InvalidRadius(_))
        ));
        // Exactly half the closest distance is allowed.
        let s = lower_bounded_radii(&inst, 0.5).unwrap();
        assert_eq!(s.radii, vec![0.5, 0.5]);
    }

    #[test]
    fn closure_is_idempotent() {
        let m = vec![
            vec![0.0, 4.0, 1.0],
            vec![4.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        let once = shortest_path_closure(&m);
        assert_eq!(once[0][1], 2.0);
        assert_eq!(shortest_path_closure(&once), once);
    }

    #[test]
    fn star_two_points() {
        let s = star_embedding(&line(&[0.0, 4.0])).unwrap();
        assert_eq!(s.total, 4.0);
        assert_eq!(s.hub[0] + s.hub[1], 4.0);
    }

    #[test]
    fn star_equilateral() {
        let m = vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        let s = star_embedding(&MetricInstance::from_matrix(&m).unwrap()).unwrap();
        assert_eq!(s.hub, vec![0.5; 3]);
        assert_eq!(s.total, 1.5);
    }

    #[test]
    fn star_square() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ];
        let s = star_embedding(&MetricInstance::from_points(&pts, Norm::L2).unwrap()).unwrap();
        assert!((s.total - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        for h in &s.hub {
            assert!((h - 2f64.sqrt() / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn star_needs_two_points() {
        assert!(star_embedding(&line(&[1.0])).is_err());
    }
}
