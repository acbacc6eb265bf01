//! Reference solvers used only by tests. None of this code shares logic
//! with the library: matchings are enumerated, linear programs are solved
//! by visiting every vertex of the feasible region.

use rand::Rng;

/// Minimum weight among maximum-cardinality matchings of a bipartite graph
/// given as `w[u][v]` (`None` for a missing edge), found by enumerating
/// every matching. Returns `(cardinality, weight)`.
pub fn exhaustive_matching<T>(w: &[Vec<Option<T>>]) -> (usize, T)
where
    T: Copy + PartialOrd + std::ops::Add<Output = T> + Default,
{
    fn go<T>(
        w: &[Vec<Option<T>>],
        u: usize,
        used: &mut Vec<bool>,
        card: usize,
        acc: T,
        best: &mut Option<(usize, T)>,
    ) where
        T: Copy + PartialOrd + std::ops::Add<Output = T> + Default,
    {
        if u == w.len() {
            let better = match best {
                None => true,
                Some((c, b)) => card > *c || (card == *c && acc < *b),
            };
            if better {
                *best = Some((card, acc));
            }
            return;
        }
        go(w, u + 1, used, card, acc, best);
        for v in 0..used.len() {
            if let Some(x) = w[u][v] {
                if !used[v] {
                    used[v] = true;
                    go(w, u + 1, used, card + 1, acc + x, best);
                    used[v] = false;
                }
            }
        }
    }
    let n_right = w.first().map_or(0, |r| r.len());
    let mut best = None;
    go(w, 0, &mut vec![false; n_right], 0, T::default(), &mut best);
    best.unwrap_or((0, T::default()))
}

/// Maximum of `c . x` subject to `a_k . x <= b_k`, by solving every square
/// subsystem of tight constraints and keeping the best feasible vertex.
/// The feasible region must be bounded in the direction of `c` and have a
/// vertex. Returns `None` when no vertex is feasible.
pub fn lp_max_by_vertices(
    c: &[f64],
    a: &[Vec<f64>],
    b: &[f64],
    tol: f64,
) -> Option<(f64, Vec<f64>)> {
    let n = c.len();
    let m = a.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut pick: Vec<usize> = (0..n).collect();
    if n > m {
        return None;
    }
    loop {
        if let Some(x) = solve_square(
            &pick.iter().map(|&k| a[k].clone()).collect::<Vec<_>>(),
            &pick.iter().map(|&k| b[k]).collect::<Vec<_>>(),
        ) {
            let feasible = (0..m).all(|k| dot(&a[k], &x) <= b[k] + tol);
            if feasible {
                let value = dot(c, &x);
                if best.as_ref().is_none_or(|(v, _)| value > *v) {
                    best = Some((value, x));
                }
            }
        }
        // Next n-subset of 0..m in lexicographic order.
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < m - n + i {
                break;
            }
        }
        pick[i] += 1;
        for j in i + 1..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &r)| {
            let mut v = row.clone();
            v.push(r);
            v
        })
        .collect();
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[p][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, p);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                for k in col..=n {
                    m[r][k] -= f * m[col][k];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Maximum radius sum with every radius at least `delta`, as a linear
/// program over the radii.
pub fn lp_lower_bounded_radii(d: &[Vec<f64>], delta: f64) -> Option<f64> {
    let n = d.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        let mut row = vec![0.0; n];
        row[i] = -1.0;
        a.push(row);
        b.push(-delta);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row[j] = 1.0;
            a.push(row);
            b.push(d[i][j]);
        }
    }
    lp_max_by_vertices(&vec![1.0; n], &a, &b, 1e-9).map(|(v, _)| v)
}

/// Minimum total hub distance `sum h` subject to `h_i + h_j >= d(i,j)` and
/// `h_i >= 0`.
pub fn lp_star_total(d: &[Vec<f64>]) -> Option<f64> {
    let n = d.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        let mut row = vec![0.0; n];
        row[i] = -1.0;
        a.push(row);
        b.push(0.0);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut row = vec![0.0; n];
            row[i] = -1.0;
            row[j] = -1.0;
            a.push(row);
            b.push(-d[i][j]);
        }
    }
    lp_max_by_vertices(&vec![-1.0; n], &a, &b, 1e-9).map(|(v, _)| -v)
}

pub fn random_points(rng: &mut impl Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
        .collect()
}

/// Random metric: shortest-path closure of random symmetric weights in
/// `[1, 10)`.
pub fn random_metric(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.gen_range(1.0..10.0);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Like [`random_metric`] with integer weights in `[1, max]`.
pub fn random_integer_metric(rng: &mut impl Rng, n: usize, max: u32) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = f64::from(rng.gen_range(1..=max));
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

pub fn euclidean_matrix(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            points
                .iter()
                .map(|q| {
                    p.iter()
                        .zip(q)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_small() {
        let w = vec![vec![Some(1), Some(2)], vec![Some(3), Some(5)]];
        assert_eq!(exhaustive_matching(&w), (2, 5));
        let w = vec![vec![Some(1), None], vec![Some(3), None]];
        assert_eq!(exhaustive_matching(&w), (1, 1));
    }

    #[test]
    fn lp_box() {
        // max x + y, x <= 1, y <= 2, -x <= 0, -y <= 0
        let a = vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.0],
            vec![0.0, -1.0],
        ];
        let (v, x) = lp_max_by_vertices(&[1.0, 1.0], &a, &[1.0, 2.0, 0.0, 0.0], 1e-9).unwrap();
        assert_eq!(v, 3.0);
        assert_eq!(x, vec![1.0, 2.0]);
    }

    #[test]
    fn lp_problems() {
        let tri = vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        assert!((lp_star_total(&tri).unwrap() - 1.5).abs() < 1e-12);
        let line = vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ];
        assert!((lp_lower_bounded_radii(&line, 0.5).unwrap() - 1.5).abs() < 1e-12);
        assert!((lp_lower_bounded_radii(&line, 0.0).unwrap() - 2.0).abs() < 1e-12);
    }
}
