//! Finite metric spaces: point sets under an L_p norm, or explicit distance
//! matrices. Instances are validated once at construction and immutable
//! afterwards.

use std::fmt;

use crate::error::{Error, Result};
use crate::tolerance;

/// An L_p norm on coordinate space, `1 <= p <= inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    L1,
    L2,
    LInf,
    Lp(f64),
}

impl Norm {
    /// Normalizes special exponents (1, 2, inf) to their dedicated variants.
    pub fn from_exponent(p: f64) -> Result<Norm> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidNorm(p));
        }
        Ok(if p == 1.0 {
            Norm::L1
        } else if p == 2.0 {
            Norm::L2
        } else if p.is_infinite() {
            Norm::LInf
        } else {
            Norm::Lp(p)
        })
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            Norm::L1 => 1.0,
            Norm::L2 => 2.0,
            Norm::LInf => f64::INFINITY,
            Norm::Lp(p) => p,
        }
    }

    /// Norm of `a - b`.
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        self.of_abs(diffs)
    }

    /// Norm of a vector given by the absolute values of its coordinates.
    pub fn of_abs(&self, abs: impl Iterator<Item = f64>) -> f64 {
        match *self {
            Norm::L1 => abs.sum(),
            Norm::L2 => abs.map(|x| x * x).sum::<f64>().sqrt(),
            Norm::LInf => abs.fold(0.0, f64::max),
            Norm::Lp(p) => abs.map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }

    /// Smallest `k` with `|x|_2 <= k * |x|_p` in dimension `dim`, so an L_p
    /// ball of radius `r` lies inside the Euclidean ball of radius `k * r`.
    pub fn euclidean_enclosure(&self, dim: usize) -> f64 {
        let p = self.exponent();
        if p <= 2.0 {
            1.0
        } else {
            (dim as f64).powf(0.5 - 1.0 / p)
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::L1 => write!(f, "l1"),
            Norm::L2 => write!(f, "l2"),
            Norm::LInf => write!(f, "linf"),
            Norm::Lp(p) => write!(f, "lp:{p}"),
        }
    }
}

/// Input descriptor for [`build_instance`].
#[derive(Debug, Clone)]
pub enum InstanceSpec {
    Points { points: Vec<Vec<f64>>, norm: Norm },
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone)]
enum Storage {
    Coordinates {
        dim: usize,
        coords: Vec<f64>,
        norm: Norm,
    },
    Matrix {
        values: Vec<f64>,
    },
}

/// `n` points with a distance function, either coordinates under a norm or
/// an explicit symmetric matrix.
#[derive(Debug, Clone)]
pub struct MetricInstance {
    n: usize,
    storage: Storage,
}

pub fn build_instance(spec: InstanceSpec) -> Result<MetricInstance> {
    match spec {
        InstanceSpec::Points { points, norm } => MetricInstance::from_points(&points, norm),
        InstanceSpec::Matrix(rows) => MetricInstance::from_matrix(&rows),
    }
}

impl MetricInstance {
    pub fn from_points(points: &[Vec<f64>], norm: Norm) -> Result<Self> {
        let first = points.first().ok_or(Error::Empty)?;
        let dim = first.len();
        if let Norm::Lp(p) = norm {
            if p.is_nan() || p < 1.0 {
                return Err(Error::InvalidNorm(p));
            }
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: dim,
                    found: p.len(),
                });
            }
            if let Some(k) = p.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite(index, k));
            }
            coords.extend_from_slice(p);
        }
        Ok(MetricInstance {
            n: points.len(),
            storage: Storage::Coordinates { dim, coords, norm },
        })
    }

    /// Builds a matrix instance, rejecting anything that is not a metric
    /// within the triangle tolerance.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    row,
                    expected: n,
                    found: r.len(),
                });
            }
            if let Some(j) = r.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite(row, j));
            }
        }
        for (i, r) in rows.iter().enumerate() {
            if r[i] != 0.0 {
                return Err(Error::NonzeroDiagonal { i, value: r[i] });
            }
        }
        for (i, r) in rows.iter().enumerate() {
            if let Some(j) = r.iter().position(|&x| x < 0.0) {
                return Err(Error::NegativeEntry { i, j, value: r[j] });
            }
        }
        let eps = tolerance::triangle(max_entry(rows));
        for i in 0..n {
            for j in i + 1..n {
                if (rows[i][j] - rows[j][i]).abs() > eps {
                    return Err(Error::Asymmetric {
                        i,
                        j,
                        forward: rows[i][j],
                        backward: rows[j][i],
                    });
                }
            }
        }
        let report = check_metric_axioms(rows);
        if let Some(v) = report.triangle_violations.first() {
            return Err(Error::TriangleViolation {
                i: v.i,
                j: v.j,
                k: v.k,
                slack: v.slack,
            });
        }
        Ok(Self::from_matrix_unchecked(rows))
    }

    /// Builds a matrix instance without validation. The upper triangle is
    /// mirrored so the stored matrix is exactly symmetric.
    pub(crate) fn from_matrix_unchecked(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                values[i * n + j] = rows[i][j];
                values[j * n + i] = rows[i][j];
            }
        }
        MetricInstance {
            n,
            storage: Storage::Matrix { values },
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_coordinates(&self) -> bool {
        matches!(self.storage, Storage::Coordinates { .. })
    }

    /// Coordinate dimension, `None` for matrix instances.
    pub fn dim(&self) -> Option<usize> {
        match self.storage {
            Storage::Coordinates { dim, .. } => Some(dim),
            Storage::Matrix { .. } => None,
        }
    }

    pub fn norm(&self) -> Option<Norm> {
        match self.storage {
            Storage::Coordinates { norm, .. } => Some(norm),
            Storage::Matrix { .. } => None,
        }
    }

    pub fn point(&self, i: usize) -> Option<&[f64]> {
        match &self.storage {
            Storage::Coordinates { dim, coords, .. } => coords.get(i * dim..(i + 1) * dim),
            Storage::Matrix { .. } => None,
        }
    }

    pub fn points(&self) -> Option<Vec<Vec<f64>>> {
        match &self.storage {
            Storage::Coordinates { dim, coords, .. } if *dim > 0 => {
                Some(coords.chunks(*dim).map(<[f64]>::to_vec).collect())
            }
            Storage::Coordinates { .. } => Some(vec![Vec::new(); self.n]),
            Storage::Matrix { .. } => None,
        }
    }

    /// Distance between points `i` and `j`; panics if either is out of range.
    ///
    /// Coordinates are always differenced with the lower index first so
    /// `dist(i, j)` and `dist(j, i)` are bitwise equal.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "index out of range");
        if i == j {
            return 0.0;
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        match &self.storage {
            Storage::Coordinates { dim, coords, norm } => {
                let a = &coords[lo * dim..(lo + 1) * dim];
                let b = &coords[hi * dim..(hi + 1) * dim];
                norm.eval(a, b)
            }
            Storage::Matrix { values } => values[lo * self.n + hi],
        }
    }

    /// Checked variant of [`MetricInstance::dist`].
    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        for index in [i, j] {
            if index >= self.n {
                return Err(Error::IndexOutOfRange { index, n: self.n });
            }
        }
        Ok(self.dist(i, j))
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::TooFewPoints {
                needed: 2,
                found: self.n,
            });
        }
        Ok(self.max_distance())
    }

    /// Largest pairwise distance, 0 for a single point.
    pub fn max_distance(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                best = best.max(self.dist(i, j));
            }
        }
        best
    }

    /// Cheap upper bound on the diameter: the norm of the bounding-box
    /// diagonal for coordinates, the exact diameter for a matrix.
    pub fn diameter_bound(&self) -> f64 {
        match &self.storage {
            Storage::Coordinates { dim, coords, norm } if self.n > 0 && *dim > 0 => {
                let mut lo = coords[..*dim].to_vec();
                let mut hi = lo.clone();
                for p in coords.chunks_exact(*dim) {
                    for (k, &x) in p.iter().enumerate() {
                        lo[k] = lo[k].min(x);
                        hi[k] = hi[k].max(x);
                    }
                }
                norm.eval(&lo, &hi)
            }
            _ => self.max_distance(),
        }
    }

    /// Smallest distance between distinct points, `None` for a single point.
    pub fn min_distance(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let d = self.dist(i, j);
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        best
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.dist(i, j)).collect())
            .collect()
    }

    /// Same points with every distance multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> MetricInstance {
        let storage = match &self.storage {
            Storage::Coordinates { dim, coords, norm } => Storage::Coordinates {
                dim: *dim,
                coords: coords.iter().map(|x| x * factor).collect(),
                norm: *norm,
            },
            Storage::Matrix { values } => Storage::Matrix {
                values: values.iter().map(|x| x * factor).collect(),
            },
        };
        MetricInstance { n: self.n, storage }
    }
}

/// A triple where `d(i,k) > d(i,j) + d(j,k)`: going through `j` is shorter
/// than the direct distance between `i` and `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub symmetric: bool,
    pub nonnegative: bool,
    pub zero_diagonal: bool,
    pub triangle_violations: Vec<TriangleViolation>,
}

impl MetricReport {
    pub fn is_metric(&self) -> bool {
        self.symmetric
            && self.nonnegative
            && self.zero_diagonal
            && self.triangle_violations.is_empty()
    }
}

fn max_entry(rows: &[Vec<f64>]) -> f64 {
    rows.iter()
        .flat_map(|r| r.iter().copied())
        .fold(0.0, f64::max)
}

/// Full O(n^3) scan of a square matrix for metric axiom violations.
/// Each violated unordered pair `{i, k}` (with `i < k`) is reported once
/// per intermediate `j`.
pub fn check_metric_axioms(matrix: &[Vec<f64>]) -> MetricReport {
    let n = matrix.len();
    assert!(matrix.iter().all(|r| r.len() == n), "matrix must be square");
    let eps = tolerance::triangle(max_entry(matrix));
    let mut report = MetricReport {
        symmetric: true,
        nonnegative: true,
        zero_diagonal: true,
        triangle_violations: Vec::new(),
    };
    for i in 0..n {
        if matrix[i][i] != 0.0 {
            report.zero_diagonal = false;
        }
        for j in 0..n {
            if matrix[i][j] < 0.0 {
                report.nonnegative = false;
            }
            if (matrix[i][j] - matrix[j][i]).abs() > eps {
                report.symmetric = false;
            }
        }
    }
    for i in 0..n {
        for k in i + 1..n {
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let slack = matrix[i][k] - matrix[i][j] - matrix[j][k];
                if slack > eps {
                    report
                        .triangle_violations
                        .push(TriangleViolation { i, j, k, slack });
                }
            }
        }
    }
    report
}

fn content(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn parse_numbers(text: &str, line: usize) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("invalid number {tok:?}"),
            })
        })
        .collect()
}

/// Parses a point file: one point per line, whitespace-separated
/// coordinates, `#` starts a comment. The first point fixes the dimension.
pub fn parse_points(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = content(raw);
        if line.trim().is_empty() {
            continue;
        }
        let p = parse_numbers(line, idx + 1)?;
        if let Some(first) = points.first() {
            if first.len() != p.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {} coordinates, found {}", first.len(), p.len()),
                });
            }
        }
        points.push(p);
    }
    if points.is_empty() {
        return Err(Error::Empty);
    }
    Ok(points)
}

/// Parses a matrix file: the first line holds `n`, followed by `n` rows of
/// `n` numbers.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, content(l)))
        .filter(|(_, l)| !l.trim().is_empty());
    let (line, header) = lines.next().ok_or(Error::Empty)?;
    let n: usize = header.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected point count, found {:?}", header.trim()),
    })?;
    let mut rows = Vec::with_capacity(n);
    for (line, l) in lines {
        if rows.len() == n {
            return Err(Error::Parse {
                line,
                message: format!("more than {n} rows"),
            });
        }
        let row = parse_numbers(l, line)?;
        if row.len() != n {
            return Err(Error::Parse {
                line,
                message: format!("expected {n} entries, found {}", row.len()),
            });
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::Parse {
            line: 0,
            message: format!("expected {n} rows, found {}", rows.len()),
        });
    }
    if n == 0 {
        return Err(Error::Empty);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> MetricInstance {
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        MetricInstance::from_points(&pts, Norm::L2).unwrap()
    }

    fn unit_square() -> MetricInstance {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ];
        MetricInstance::from_points(&pts, Norm::L2).unwrap()
    }

    #[test]
    fn collinear_distances() {
        let inst = line(&[0.0, 1.0, 3.0]);
        assert_eq!(inst.dist(0, 1), 1.0);
        assert_eq!(inst.dist(1, 2), 2.0);
        assert_eq!(inst.dist(0, 2), 3.0);
        assert_eq!(inst.distance(2, 0).unwrap(), 3.0);
        assert_eq!(inst.dist(1, 1), 0.0);
    }

    #[test]
    fn single_point_matrix() {
        let inst = MetricInstance::from_matrix(&[vec![0.0]]).unwrap();
        assert_eq!(inst.len(), 1);
        assert!(inst.diameter().is_err());
    }

    #[test]
    fn rejects_triangle_violation() {
        let m = vec![
            vec![0.0, 3.0, 1.0],
            vec![3.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        match MetricInstance::from_matrix(&m) {
            Err(Error::TriangleViolation { i, j, k, slack }) => {
                assert_eq!((i, j, k), (0, 2, 1));
                assert_eq!(slack, 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_matrices() {
        assert!(matches!(
            MetricInstance::from_matrix(&[vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(Error::Asymmetric { .. })
        ));
        assert!(matches!(
            MetricInstance::from_matrix(&[vec![0.0, -1.0], vec![-1.0, 0.0]]),
            Err(Error::NegativeEntry { .. })
        ));
        assert!(matches!(
            MetricInstance::from_matrix(&[vec![1.0, 1.0], vec![1.0, 0.0]]),
            Err(Error::NonzeroDiagonal { i: 0, .. })
        ));
        assert!(matches!(
            MetricInstance::from_matrix(&[vec![0.0, 1.0], vec![1.0]]),
            Err(Error::NotSquare { row: 1, .. })
        ));
        assert!(matches!(
            MetricInstance::from_points(&[vec![0.0, 1.0], vec![1.0]], Norm::L2),
            Err(Error::DimensionMismatch { index: 1, .. })
        ));
        assert!(matches!(
            MetricInstance::from_matrix(&[]),
            Err(Error::Empty)
        ));
    }

    #[test]
    fn out_of_range_index() {
        let inst = line(&[0.0, 1.0]);
        assert_eq!(
            inst.distance(0, 2),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        );
    }

    #[test]
    fn square_diagonal_and_diameter() {
        let sq = unit_square();
        assert_eq!(sq.dist(0, 2), 2f64.sqrt());
        assert_eq!(sq.diameter().unwrap(), 2f64.sqrt());
        assert_eq!(line(&[0.0, 1.0, 3.0]).diameter().unwrap(), 3.0);
        assert_eq!(line(&[2.0, 7.0]).diameter().unwrap(), 5.0);
    }

    #[test]
    fn norms() {
        let a = [0.0, 0.0];
        let b = [3.0, 4.0];
        assert_eq!(Norm::L1.eval(&a, &b), 7.0);
        assert_eq!(Norm::L2.eval(&a, &b), 5.0);
        assert_eq!(Norm::LInf.eval(&a, &b), 4.0);
        let p3 = Norm::from_exponent(3.0).unwrap();
        assert!((p3.eval(&a, &b) - 91f64.cbrt()).abs() < 1e-12);
        assert_eq!(Norm::from_exponent(2.0).unwrap(), Norm::L2);
        assert_eq!(Norm::from_exponent(f64::INFINITY).unwrap(), Norm::LInf);
        assert!(Norm::from_exponent(0.5).is_err());
        assert_eq!(Norm::LInf.euclidean_enclosure(4), 2.0);
        assert_eq!(Norm::L1.euclidean_enclosure(4), 1.0);
    }

    #[test]
    fn axiom_report_examples() {
        let ok = check_metric_axioms(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(ok.is_metric());
        let bad = check_metric_axioms(&[
            vec![0.0, 3.0, 1.0],
            vec![3.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ]);
        assert_eq!(
            bad.triangle_violations,
            vec![TriangleViolation {
                i: 0,
                j: 2,
                k: 1,
                slack: 1.0
            }]
        );
        let asym = check_metric_axioms(&[vec![0.0, 1.0], vec![2.0, 0.0]]);
        assert!(!asym.symmetric);
    }

    #[test]
    fn duplicate_points_allowed() {
        let inst = line(&[1.0, 1.0, 4.0]);
        assert_eq!(inst.dist(0, 1), 0.0);
        assert_eq!(inst.min_distance(), Some(0.0));
    }

    #[test]
    fn parses_point_files() {
        let text = "# header\n0 0\n1 0   # trailing\n\n1 1\n";
        let pts = parse_points(text).unwrap();
        assert_eq!(pts, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
        assert!(matches!(
            parse_points("0 0\n1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_points("0 x\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_points("# nothing\n").is_err());
    }

    #[test]
    fn parses_matrix_files() {
        let text = "3\n0 1 3\n1 0 2\n3 2 0\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(m[0], vec![0.0, 1.0, 3.0]);
        assert!(parse_matrix("2\n0 1\n").is_err());
        assert!(parse_matrix("2\n0 1\n1 0 4\n").is_err());
        assert!(parse_matrix("x\n").is_err());
    }
}
