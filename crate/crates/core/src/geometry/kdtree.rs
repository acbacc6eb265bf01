//! Static kd-tree over the points of a coordinate instance, with per-node
//! bounding boxes and an optional per-point ball radius for overlap queries.

use crate::metric::Norm;

const BUCKET: usize = 8;
const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Node {
    start: usize,
    end: usize,
    children: [usize; 2],
    max_radius: f64,
}

pub(crate) struct KdTree<'a> {
    dim: usize,
    coords: &'a [f64],
    norm: Norm,
    order: Vec<usize>,
    nodes: Vec<Node>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl<'a> KdTree<'a> {
    pub(crate) fn new(coords: &'a [f64], dim: usize, norm: Norm) -> Self {
        let n = coords.len().checked_div(dim).unwrap_or(0);
        let mut tree = KdTree {
            dim,
            coords,
            norm,
            order: (0..n).collect(),
            nodes: Vec::new(),
            lo: Vec::new(),
            hi: Vec::new(),
        };
        if n > 0 {
            tree.build(0, n);
        }
        tree
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            start,
            end,
            children: [NONE, NONE],
            max_radius: 0.0,
        });
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for &i in &self.order[start..end] {
            for (k, &x) in self.coords[i * self.dim..(i + 1) * self.dim]
                .iter()
                .enumerate()
            {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        let axis = (0..self.dim)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap_or(0);
        let spread = hi.get(axis).zip(lo.get(axis)).map_or(0.0, |(h, l)| h - l);
        self.lo.extend_from_slice(&lo);
        self.hi.extend_from_slice(&hi);
        if end - start <= BUCKET || spread <= 0.0 {
            return id;
        }
        let mid = start + (end - start) / 2;
        let (dim, coords) = (self.dim, self.coords);
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            coords[a * dim + axis]
                .total_cmp(&coords[b * dim + axis])
                .then(a.cmp(&b))
        });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id].children = [left, right];
        id
    }

    /// Stores a radius per point and the subtree maxima used by
    /// [`KdTree::overlapping`].
    pub(crate) fn set_radii(&mut self, radii: &[f64]) {
        for id in (0..self.nodes.len()).rev() {
            let node = &self.nodes[id];
            let m = if node.children[0] == NONE {
                self.order[node.start..node.end]
                    .iter()
                    .map(|&i| radii[i])
                    .fold(0.0, f64::max)
            } else {
                self.nodes[node.children[0]]
                    .max_radius
                    .max(self.nodes[node.children[1]].max_radius)
            };
            self.nodes[id].max_radius = m;
        }
    }

    /// Lower bound on the distance from `q` to anything in the node's box.
    fn box_distance(&self, id: usize, q: &[f64]) -> f64 {
        let lo = &self.lo[id * self.dim..(id + 1) * self.dim];
        let hi = &self.hi[id * self.dim..(id + 1) * self.dim];
        let gaps = q
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(&x, (&l, &h))| (l - x).max(x - h).max(0.0));
        self.norm.of_abs(gaps)
    }

    /// Distance from point `i` to its nearest other point.
    pub(crate) fn nearest_other(&self, i: usize, dist: impl Fn(usize, usize) -> f64) -> f64 {
        let q = self.point(i);
        let mut best = f64::INFINITY;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            if self.box_distance(id, q) > best * (1.0 + 1e-12) {
                continue;
            }
            let node = &self.nodes[id];
            if node.children[0] == NONE {
                for &j in &self.order[node.start..node.end] {
                    if j != i {
                        best = best.min(dist(i, j));
                    }
                }
            } else {
                let [a, b] = node.children;
                let (da, db) = (self.box_distance(a, q), self.box_distance(b, q));
                if da <= db {
                    stack.push(b);
                    stack.push(a);
                } else {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        best
    }

    /// Calls `visit(j)` for every point `j` whose box might hold a ball
    /// meeting the ball of radius `radius` around `q`. The caller applies
    /// the exact test.
    pub(crate) fn overlapping(&self, q: &[f64], radius: f64, mut visit: impl FnMut(usize)) {
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            let reach = (radius + node.max_radius) * (1.0 + 1e-9);
            if self.box_distance(id, q) > reach {
                continue;
            }
            if node.children[0] == NONE {
                self.order[node.start..node.end]
                    .iter()
                    .for_each(|&j| visit(j));
            } else {
                stack.extend(node.children);
            }
        }
    }
}
