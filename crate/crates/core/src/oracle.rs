//! Brute-force references and certificate checks. Nothing here calls the
//! matching engine; these routines are the independent side of every
//! cross-check.

use crate::cover::CycleCover;
use crate::error::{Error, Result};
use crate::metric::MetricInstance;
use crate::tolerance;

/// Largest instance [`brute_force_optimum`] accepts.
pub const MAX_ORACLE_POINTS: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Half the minimum cycle cover weight, the optimal radius sum.
    pub value: f64,
    /// Lexicographically first fixed-point-free permutation attaining it.
    pub witness: Vec<usize>,
    /// Number of permutations examined.
    pub enumerated: u64,
}

/// Exact optimum by enumerating every permutation `s` with `s(i) != i`.
/// Each such permutation is an oriented cycle cover of weight
/// `sum d(i, s(i))`, and every cycle cover arises this way.
///
/// Integer-valued distances are summed in `i64`, so the minimum is exact.
pub fn brute_force_optimum(inst: &MetricInstance) -> Result<OracleResult> {
    let n = inst.len();
    if n < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: n,
        });
    }
    if n > MAX_ORACLE_POINTS {
        return Err(Error::TooManyPoints {
            max: MAX_ORACLE_POINTS,
            found: n,
        });
    }
    let matrix = inst.to_matrix();
    let integral = matrix
        .iter()
        .flatten()
        .all(|&x| x.fract() == 0.0 && x.abs() < 1e15);
    if integral {
        let ints: Vec<Vec<i64>> = matrix
            .iter()
            .map(|r| r.iter().map(|&x| x as i64).collect())
            .collect();
        let (sum, witness, enumerated) =
            Derangements::search(n, 0i64, |i, j, acc| acc + ints[i][j]);
        Ok(OracleResult {
            value: sum as f64 / 2.0,
            witness,
            enumerated,
        })
    } else {
        let (sum, witness, enumerated) =
            Derangements::search(n, 0.0f64, |i, j, acc| acc + matrix[i][j]);
        Ok(OracleResult {
            value: sum / 2.0,
            witness,
            enumerated,
        })
    }
}

struct Derangements<T> {
    n: usize,
    perm: Vec<usize>,
    used: Vec<bool>,
    best: Option<(T, Vec<usize>)>,
    enumerated: u64,
}

impl<T: Copy + PartialOrd> Derangements<T> {
    fn search(n: usize, zero: T, add: impl Fn(usize, usize, T) -> T) -> (T, Vec<usize>, u64) {
        let mut d = Derangements {
            n,
            perm: vec![usize::MAX; n],
            used: vec![false; n],
            best: None,
            enumerated: 0,
        };
        d.run(0, zero, &add);
        let (best, witness) = d.best.expect("n >= 2 has a derangement");
        (best, witness, d.enumerated)
    }

    fn run(&mut self, i: usize, acc: T, add: &impl Fn(usize, usize, T) -> T) {
        if i == self.n {
            self.enumerated += 1;
            if self.best.as_ref().is_none_or(|(b, _)| acc < *b) {
                self.best = Some((acc, self.perm.clone()));
            }
            return;
        }
        for j in 0..self.n {
            if j == i || self.used[j] {
                continue;
            }
            self.used[j] = true;
            self.perm[i] = j;
            self.run(i + 1, add(i, j, acc), add);
            self.used[j] = false;
        }
    }
}

/// A violated primal constraint: `r_i + r_j <= d(i,j)` when `j` is present,
/// `r_i >= 0` otherwise. `amount` is how far the constraint is exceeded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintViolation {
    pub i: usize,
    pub j: Option<usize>,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Most violated constraint, if any constraint is exceeded at all.
    pub worst: Option<ConstraintViolation>,
    pub tolerance: f64,
}

/// All-pairs check of nonnegativity and nonoverlap.
pub fn check_feasible(inst: &MetricInstance, radii: &[f64]) -> FeasibilityReport {
    assert_eq!(radii.len(), inst.len(), "one radius per point");
    let n = inst.len();
    let eps = tolerance::feasibility(inst.max_distance());
    let mut worst: Option<ConstraintViolation> = None;
    let mut consider = |v: ConstraintViolation| {
        let bad = !(v.amount <= 0.0);
        if bad && worst.is_none_or(|w| v.amount > w.amount || v.amount.is_nan()) {
            worst = Some(v);
        }
    };
    for (i, &r) in radii.iter().enumerate() {
        consider(ConstraintViolation {
            i,
            j: None,
            amount: -r,
        });
    }
    for i in 0..n {
        for j in i + 1..n {
            consider(ConstraintViolation {
                i,
                j: Some(j),
                amount: radii[i] + radii[j] - inst.dist(i, j),
            });
        }
    }
    FeasibilityReport {
        feasible: worst.is_none_or(|w| w.amount <= eps),
        worst,
        tolerance: eps,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeGap {
    pub i: usize,
    pub j: usize,
    /// `d(i,j) - r_i - r_j`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlackReport {
    pub gaps: Vec<EdgeGap>,
    pub max_gap: f64,
    pub value: f64,
    /// Half the cover weight, recomputed from the instance.
    pub half_cover_weight: f64,
    pub value_mismatch: bool,
    pub feasible: bool,
    pub tolerance: f64,
    /// Complementary slackness holds: feasible radii, every cover edge
    /// tight, and radius sum equal to half the cover weight.
    pub optimal: bool,
}

/// Complementary slackness between radii (primal) and a cover (dual).
pub fn lp_slack_report(inst: &MetricInstance, radii: &[f64], cover: &CycleCover) -> SlackReport {
    let feasibility = check_feasible(inst, radii);
    let eps = feasibility.tolerance;
    let gaps: Vec<EdgeGap> = cover
        .edges
        .iter()
        .map(|e| EdgeGap {
            i: e.i,
            j: e.j,
            gap: inst.dist(e.i, e.j) - radii[e.i] - radii[e.j],
        })
        .collect();
    let max_gap = gaps.iter().map(|g| g.gap).fold(0.0, f64::max);
    let half_cover_weight = cover
        .edges
        .iter()
        .map(|e| f64::from(e.multiplicity) * inst.dist(e.i, e.j))
        .sum::<f64>()
        / 2.0;
    let value: f64 = radii.iter().sum();
    let value_mismatch = (value - half_cover_weight).abs() > eps;
    SlackReport {
        optimal: feasibility.feasible && max_gap <= eps && !value_mismatch,
        gaps,
        max_gap,
        value,
        half_cover_weight,
        value_mismatch,
        feasible: feasibility.feasible,
        tolerance: eps,
    }
}
