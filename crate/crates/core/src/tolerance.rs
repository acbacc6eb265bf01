//! Floating-point tolerances shared by the solvers and checkers.

/// Relative slack allowed when validating the triangle inequality of an
/// explicit distance matrix.
pub fn triangle(max_entry: f64) -> f64 {
    1e-9 * max_entry
}

/// Slack for dual feasibility and tightness in the matching engine.
pub fn dual(max_weight: f64) -> f64 {
    1e-9 * (1.0 + max_weight)
}

/// Slack for primal feasibility of radii, touching tests and slackness gaps.
pub fn feasibility(diameter: f64) -> f64 {
    1e-8 * (1.0 + diameter)
}
