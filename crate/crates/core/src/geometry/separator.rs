//! Separator hierarchy over the nearest-neighbor ball system.
//!
//! A node's balls are cut by a sphere (or plane) in the original space:
//! balls strictly inside go left, strictly outside go right, the rest form
//! the separator. Spheres come from the usual conformal construction: lift
//! a sample onto the unit sphere one dimension up, move an approximate
//! centerpoint to the origin and take a random great circle. A median cut
//! on the widest axis competes with them and is always balanced.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::nn_graph::NNOverlapGraph;
use super::GeometricOptions;
use crate::error::{Error, Result};
use crate::metric::{MetricInstance, Norm};

const LEFT: u8 = 0;
const SEP: u8 = 1;
const RIGHT: u8 = 2;
const OUTSIDE: u8 = u8::MAX;

const IMBALANCE_PENALTY: f64 = 0.05;

/// The surface that produced a split.
#[derive(Debug, Clone, PartialEq)]
pub enum CutKind {
    Sphere {
        center: Vec<f64>,
        radius: f64,
    },
    /// `normal . x = offset`; left is the side below.
    Plane {
        normal: Vec<f64>,
        offset: f64,
    },
    /// `x[axis] = threshold`.
    Axis {
        axis: usize,
        threshold: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub separator: Vec<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub cut: CutKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparatorNode {
    /// Sorted point indices.
    pub vertices: Vec<usize>,
    pub split: Option<Split>,
    /// Nodes built on `separator + left` and `separator + right`.
    pub children: Option<[usize; 2]>,
}

/// Node 0 is the root and holds every point.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatorTree {
    pub nodes: Vec<SeparatorNode>,
    pub leaf_size: usize,
    pub balance: f64,
}

impl SeparatorTree {
    pub fn root(&self) -> &SeparatorNode {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes[0].vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn depth(&self) -> usize {
        let mut depth = vec![1usize; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if let Some(children) = node.children {
                for c in children {
                    depth[c] = depth[id] + 1;
                }
            }
        }
        depth.into_iter().max().unwrap_or(0)
    }

    /// Leaves larger than the leaf size. These are nodes where no cut made
    /// progress (an empty side, or a separator holding most of the node).
    pub fn oversized_leaves(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&id| self.nodes[id].children.is_none())
            .filter(|&id| self.nodes[id].vertices.len() > self.leaf_size)
            .collect()
    }

    /// Checks the structural invariants against the graph the tree was
    /// built for.
    pub fn check(&self, graph: &NNOverlapGraph) -> Result<()> {
        let bad = |msg: String| Err(Error::TreeMismatch(msg));
        let n = graph.len();
        if self.nodes.is_empty() || self.nodes[0].vertices != (0..n).collect::<Vec<_>>() {
            return bad("root does not hold every point".into());
        }
        let mut side = vec![OUTSIDE; n];
        for (id, node) in self.nodes.iter().enumerate() {
            let size = node.vertices.len();
            if !node.vertices.windows(2).all(|w| w[0] < w[1]) {
                return bad(format!("node {id}: vertices not sorted"));
            }
            let (split, children) = match (&node.split, node.children) {
                (None, None) => continue,
                (Some(s), Some(c)) => (s, c),
                _ => return bad(format!("node {id}: split without children")),
            };
            let mut parts: Vec<usize> = split
                .left
                .iter()
                .chain(&split.separator)
                .chain(&split.right)
                .copied()
                .collect();
            parts.sort_unstable();
            if parts != node.vertices {
                return bad(format!("node {id}: parts do not partition the vertices"));
            }
            let limit = self.balance * size as f64;
            if split.left.len() as f64 > limit || split.right.len() as f64 > limit {
                return bad(format!("node {id}: unbalanced split"));
            }
            for &v in &split.right {
                side[v] = RIGHT;
            }
            let crossing = split.left.iter().find_map(|&u| {
                graph.adjacency[u]
                    .iter()
                    .find(|&&v| side[v] == RIGHT)
                    .map(|&v| (u, v))
            });
            for &v in &split.right {
                side[v] = OUTSIDE;
            }
            if let Some((u, v)) = crossing {
                return bad(format!("node {id}: edge {u}-{v} joins the two sides"));
            }
            for (c, part) in children.into_iter().zip([&split.left, &split.right]) {
                let mut expect: Vec<usize> = split.separator.iter().chain(part).copied().collect();
                expect.sort_unstable();
                if self.nodes.get(c).map(|ch| &ch.vertices) != Some(&expect) {
                    return bad(format!("node {id}: child {c} has the wrong vertex set"));
                }
            }
        }
        Ok(())
    }
}

struct Balls<'a> {
    dim: usize,
    coords: Vec<f64>,
    norm: Norm,
    delta: &'a [f64],
    adjacency: &'a [Vec<usize>],
}

impl Balls<'_> {
    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Side of ball `i`. Balls on strictly opposite sides of the surface
    /// cannot meet.
    fn classify(&self, cut: &CutKind, i: usize) -> u8 {
        let p = self.point(i);
        let r = self.delta[i];
        let (value, reach) = match cut {
            CutKind::Axis { axis, threshold } => (p[*axis] - threshold, r),
            CutKind::Plane { normal, offset } => {
                let s: f64 = normal.iter().zip(p).map(|(a, x)| a * x).sum();
                (s - offset, r * dual_norm(self.norm, normal))
            }
            CutKind::Sphere { center, radius } => {
                let e = Norm::L2.eval(p, center);
                (e - radius, r * self.norm.euclidean_enclosure(self.dim))
            }
        };
        if value + reach < 0.0 {
            LEFT
        } else if value - reach > 0.0 {
            RIGHT
        } else {
            SEP
        }
    }
}

fn dual_norm(norm: Norm, v: &[f64]) -> f64 {
    let dual = match norm {
        Norm::L1 => Norm::LInf,
        Norm::L2 => Norm::L2,
        Norm::LInf => Norm::L1,
        Norm::Lp(p) => Norm::Lp(p / (p - 1.0)),
    };
    dual.of_abs(v.iter().map(|x| x.abs()))
}

/// Builds the hierarchy with the leaf size, balance and sampling settings
/// of `opts`. Each node draws from its own seeded stream, so the result
/// depends only on the input and `opts.seed`.
pub fn build_separator_tree(
    graph: &NNOverlapGraph,
    inst: &MetricInstance,
    opts: &GeometricOptions,
) -> Result<SeparatorTree> {
    let n = graph.len();
    let dim = inst.dim().ok_or(Error::NotCoordinates)?;
    if inst.len() != n {
        return Err(Error::TreeMismatch(format!(
            "graph has {n} vertices, instance has {}",
            inst.len()
        )));
    }
    let balls = Balls {
        dim,
        coords: (0..n)
            .flat_map(|i| inst.point(i).unwrap().to_vec())
            .collect(),
        norm: inst.norm().unwrap(),
        delta: &graph.delta,
        adjacency: &graph.adjacency,
    };
    let leaf_size = opts.leaf_size.max(1);
    let mut nodes = vec![SeparatorNode {
        vertices: (0..n).collect(),
        split: None,
        children: None,
    }];
    let mut scratch = vec![OUTSIDE; n];
    let mut stack = vec![0usize];
    while let Some(id) = stack.pop() {
        if nodes[id].vertices.len() <= leaf_size {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(id as u64);
        let Some(split) = split_node(&balls, &nodes[id].vertices, opts, &mut rng, &mut scratch)
        else {
            continue;
        };
        let child = |part: &[usize]| {
            let mut v: Vec<usize> = split.separator.iter().chain(part).copied().collect();
            v.sort_unstable();
            SeparatorNode {
                vertices: v,
                split: None,
                children: None,
            }
        };
        let (left, right) = (child(&split.left), child(&split.right));
        let c = nodes.len();
        nodes.push(left);
        nodes.push(right);
        nodes[id].split = Some(split);
        nodes[id].children = Some([c, c + 1]);
        stack.push(c + 1);
        stack.push(c);
    }
    Ok(SeparatorTree {
        nodes,
        leaf_size,
        balance: opts.balance,
    })
}

fn split_node(
    balls: &Balls,
    vs: &[usize],
    opts: &GeometricOptions,
    rng: &mut ChaCha8Rng,
    scratch: &mut [u8],
) -> Option<Split> {
    let m = vs.len();
    let mut candidates = vec![axis_cut(balls, vs)];
    candidates.extend(sphere_cuts(balls, vs, opts, rng));

    let limit = opts.balance * m as f64;
    let mut best: Option<(f64, Vec<u8>, CutKind)> = None;
    for (k, cut) in candidates.into_iter().enumerate() {
        let sides = evaluate(balls, vs, &cut, scratch);
        let count = |s: u8| sides.iter().filter(|&&x| x == s).count();
        let (l, s, r) = (count(LEFT), count(SEP), count(RIGHT));
        // The axis cut is the fallback and is kept even if it fails the test.
        if k > 0 && l.max(r) as f64 > limit {
            continue;
        }
        let score = s as f64 + IMBALANCE_PENALTY * l.abs_diff(r) as f64;
        if best.as_ref().is_none_or(|(b, _, _)| score < *b) {
            best = Some((score, sides, cut));
        }
    }
    let (_, sides, cut) = best?;
    let pick = |s: u8| -> Vec<usize> {
        vs.iter()
            .zip(&sides)
            .filter(|(_, &x)| x == s)
            .map(|(&v, _)| v)
            .collect()
    };
    let (left, separator, right) = (pick(LEFT), pick(SEP), pick(RIGHT));
    if left.is_empty() || right.is_empty() || 2 * separator.len() > m {
        return None;
    }
    Some(Split {
        separator,
        left,
        right,
        cut,
    })
}

/// Classifies every ball of the node, then moves the right end of any
/// remaining left-right edge into the separator.
fn evaluate(balls: &Balls, vs: &[usize], cut: &CutKind, scratch: &mut [u8]) -> Vec<u8> {
    for &v in vs {
        scratch[v] = balls.classify(cut, v);
    }
    for &u in vs {
        if scratch[u] == LEFT {
            for &v in &balls.adjacency[u] {
                if scratch[v] == RIGHT {
                    scratch[v] = SEP;
                }
            }
        }
    }
    let sides = vs.iter().map(|&v| scratch[v]).collect();
    for &v in vs {
        scratch[v] = OUTSIDE;
    }
    sides
}

fn axis_cut(balls: &Balls, vs: &[usize]) -> CutKind {
    let dim = balls.dim;
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for &v in vs {
        for (k, &x) in balls.point(v).iter().enumerate() {
            lo[k] = lo[k].min(x);
            hi[k] = hi[k].max(x);
        }
    }
    let axis = (0..dim)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])).then(b.cmp(&a)))
        .unwrap_or(0);
    let mut xs: Vec<f64> = vs.iter().map(|&v| balls.point(v)[axis]).collect();
    let m = xs.len();
    let (below, &mut upper, _) = xs.select_nth_unstable_by(m / 2, f64::total_cmp);
    let lower = below.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    CutKind::Axis {
        axis,
        threshold: (lower + upper) / 2.0,
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    let mid = xs.len() / 2;
    *xs.select_nth_unstable_by(mid, f64::total_cmp).1
}

fn sphere_cuts(
    balls: &Balls,
    vs: &[usize],
    opts: &GeometricOptions,
    rng: &mut ChaCha8Rng,
) -> Vec<CutKind> {
    let d = balls.dim;
    let big = d + 1;
    let sample: Vec<usize> = if vs.len() <= opts.sample_size {
        vs.to_vec()
    } else {
        vs.choose_multiple(rng, opts.sample_size).copied().collect()
    };
    let origin: Vec<f64> = (0..d)
        .map(|k| median(sample.iter().map(|&v| balls.point(v)[k]).collect()))
        .collect();
    let mut scale = median(
        sample
            .iter()
            .map(|&v| Norm::L2.eval(balls.point(v), &origin))
            .collect(),
    );
    if !(scale > 0.0 && scale.is_finite()) {
        scale = 1.0;
    }
    // Stereographic lift of the normalized sample onto the unit sphere.
    let lifted: Vec<Vec<f64>> = sample
        .iter()
        .map(|&v| {
            let y: Vec<f64> = balls
                .point(v)
                .iter()
                .zip(&origin)
                .map(|(x, o)| (x - o) / scale)
                .collect();
            let q: f64 = y.iter().map(|t| t * t).sum();
            let mut u: Vec<f64> = y.iter().map(|t| 2.0 * t / (q + 1.0)).collect();
            u.push((q - 1.0) / (q + 1.0));
            u
        })
        .collect();
    let c = approximate_centerpoint(lifted, rng);
    let theta = Norm::L2.of_abs(c.iter().map(|x| x.abs()));
    if !(theta < 1.0 - 1e-9) {
        return Vec::new();
    }
    // Householder reflection taking c to theta * e_top.
    let mut h = c.clone();
    h[d] -= theta;
    let hh: f64 = h.iter().map(|x| x * x).sum();
    let reflect = |x: &mut [f64]| {
        if hh > 1e-300 {
            let s = 2.0 * h.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>() / hh;
            for (xi, hi) in x.iter_mut().zip(&h) {
                *xi -= s * hi;
            }
        }
    };
    let alpha = ((1.0 - theta) / (1.0 + theta)).sqrt();

    let mut cuts = Vec::with_capacity(opts.trials);
    for _ in 0..opts.trials {
        let nv: Vec<f64> = (0..big).map(|_| rng.sample(StandardNormal)).collect();
        // Great circle n.w = 0, pulled back through the dilation by alpha:
        // a|z|^2 + 2 b.z + c = 0 in the reflected plane.
        let (a, c0) = (nv[d] * alpha * alpha, -nv[d]);
        let mut m: Vec<f64> = nv[..d].iter().map(|x| alpha * x).collect();
        m.push((a - c0) / 2.0);
        let t = -(a + c0) / 2.0;
        reflect(&mut m);
        let (a, c0) = (m[d] - t, -(m[d] + t));
        let b = &m[..d];
        let bn = Norm::L2.of_abs(b.iter().map(|x| x.abs()));
        let size = a.abs() + bn + c0.abs();
        if !(size > 0.0) || !size.is_finite() {
            continue;
        }
        if a.abs() <= 1e-12 * size {
            if bn <= 1e-12 * size {
                continue;
            }
            let offset = b.iter().zip(&origin).map(|(x, o)| x * o).sum::<f64>() - c0 * scale / 2.0;
            cuts.push(CutKind::Plane {
                normal: b.to_vec(),
                offset,
            });
        } else {
            let o: Vec<f64> = b.iter().map(|x| -x / a).collect();
            let rho2 = o.iter().map(|x| x * x).sum::<f64>() - c0 / a;
            if !(rho2 > 0.0) {
                continue;
            }
            cuts.push(CutKind::Sphere {
                center: o.iter().zip(&origin).map(|(x, q)| q + scale * x).collect(),
                radius: scale * rho2.sqrt(),
            });
        }
    }
    cuts
}

/// Iterated Radon points: shuffle, replace each group of `D + 2` points by
/// its Radon point, repeat while a full group remains, then average.
fn approximate_centerpoint(mut pts: Vec<Vec<f64>>, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let dim = pts[0].len();
    let group = dim + 2;
    while pts.len() >= group {
        pts.shuffle(rng);
        pts = pts.chunks_exact(group).map(radon_point).collect();
    }
    let k = pts.len() as f64;
    (0..dim)
        .map(|j| pts.iter().map(|p| p[j]).sum::<f64>() / k)
        .collect()
}

/// Common point of the convex hulls of the two Radon parts of `pts`
/// (`D + 2` points in `D` dimensions).
fn radon_point(pts: &[Vec<f64>]) -> Vec<f64> {
    let dim = pts[0].len();
    let cols = pts.len();
    let rows = dim + 1;
    // sum lambda_k p_k = 0 and sum lambda_k = 0.
    let mut a: Vec<Vec<f64>> = (0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| if r < dim { pts[c][r] } else { 1.0 })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let best = (row..rows)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[best][col].abs() < 1e-12 {
            continue;
        }
        a.swap(row, best);
        let p = a[row][col];
        for x in a[row].iter_mut() {
            *x /= p;
        }
        for r in 0..rows {
            if r != row {
                let f = a[r][col];
                if f != 0.0 {
                    for c in 0..cols {
                        a[r][c] -= f * a[row][c];
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free = (0..cols).find(|c| !pivots.contains(c)).unwrap_or(cols - 1);
    let mut lambda = vec![0.0; cols];
    lambda[free] = 1.0;
    for (r, &pc) in pivots.iter().enumerate() {
        lambda[pc] = -a[r][free];
    }
    let total: f64 = lambda.iter().filter(|&&l| l > 0.0).sum();
    if !(total > 0.0) {
        return (0..dim)
            .map(|j| pts.iter().map(|p| p[j]).sum::<f64>() / cols as f64)
            .collect();
    }
    (0..dim)
        .map(|j| {
            pts.iter()
                .zip(&lambda)
                .filter(|(_, &l)| l > 0.0)
                .map(|(p, l)| l * p[j])
                .sum::<f64>()
                / total
        })
        .collect()
}
