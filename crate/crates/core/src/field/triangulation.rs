use std::cmp::Ordering;

use super::{GridError, ScalarGrid};

/// A piecewise-linear field on the Freudenthal triangulation of a grid.
///
/// Each cell `(i, j)..(i + 1, j + 1)` is split along the diagonal from
/// `(i, j)` to `(i + 1, j + 1)`. Vertices are totally ordered by value with
/// ties broken by linear index, so the field behaves like a simple Morse
/// function without touching the stored values.
#[derive(Debug, Clone)]
pub struct SimplicialField {
    width: usize,
    height: usize,
    values: Vec<f64>,
    triangles: Vec<[usize; 3]>,
    neighbors: Vec<Vec<usize>>,
    /// Vertex indices in ascending strict order.
    order: Vec<usize>,
    /// Position of each vertex in `order`.
    rank: Vec<usize>,
}

// Neighbor offsets (drow, dcol) in cyclic link order for the chosen diagonal.
const LINK: [(isize, isize); 6] = [(0, 1), (1, 1), (1, 0), (0, -1), (-1, -1), (-1, 0)];

pub fn triangulate(grid: &ScalarGrid) -> Result<SimplicialField, GridError> {
    let (w, h) = (grid.width(), grid.height());
    if w < 2 || h < 2 {
        return Err(GridError::Degenerate {
            width: w,
            height: h,
        });
    }
    let idx = |r: usize, c: usize| r * w + c;

    let mut triangles = Vec::with_capacity(2 * (w - 1) * (h - 1));
    for r in 0..h - 1 {
        for c in 0..w - 1 {
            let a = idx(r, c);
            let b = idx(r, c + 1);
            let d = idx(r + 1, c);
            let e = idx(r + 1, c + 1);
            triangles.push([a, b, e]);
            triangles.push([a, d, e]);
        }
    }

    let mut neighbors = Vec::with_capacity(w * h);
    for r in 0..h {
        for c in 0..w {
            let mut ring = Vec::with_capacity(6);
            for (dr, dc) in LINK {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr >= 0 && nc >= 0 && (nr as usize) < h && (nc as usize) < w {
                    ring.push(idx(nr as usize, nc as usize));
                }
            }
            neighbors.push(ring);
        }
    }

    let values = grid.values().to_vec();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| strict_cmp(&values, a, b));
    let mut rank = vec![0; values.len()];
    for (pos, &v) in order.iter().enumerate() {
        rank[v] = pos;
    }

    Ok(SimplicialField {
        width: w,
        height: h,
        values,
        triangles,
        neighbors,
        order,
        rank,
    })
}

fn strict_cmp(values: &[f64], a: usize, b: usize) -> Ordering {
    values[a].total_cmp(&values[b]).then(a.cmp(&b))
}

impl SimplicialField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn vertex_count(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Vertices sharing an edge with `v` (grid edges plus diagonals).
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    /// All vertices in ascending strict order.
    pub fn ascending(&self) -> &[usize] {
        &self.order
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    /// `true` when `a` comes after `b` in the strict vertex order.
    pub fn is_above(&self, a: usize, b: usize) -> bool {
        self.rank[a] > self.rank[b]
    }

    /// The undirected edge set, each edge as `(low index, high index)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .neighbors
            .iter()
            .enumerate()
            .flat_map(|(v, ns)| ns.iter().filter(move |&&n| n > v).map(move |&n| (v, n)))
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn negated(&self) -> Self {
        let values: Vec<f64> = self.values.iter().map(|v| -v).collect();
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| strict_cmp(&values, a, b));
        let mut rank = vec![0; values.len()];
        for (pos, &v) in order.iter().enumerate() {
            rank[v] = pos;
        }
        Self {
            width: self.width,
            height: self.height,
            values,
            triangles: self.triangles.clone(),
            neighbors: self.neighbors.clone(),
            order,
            rank,
        }
    }
}
