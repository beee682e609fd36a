//! Least concave majorant of a grid path: the upper convex hull of the
//! points `(i, v_i)`, built in one monotone-chain scan.

use super::PathGrid;

/// Relative slope difference below which adjacent segments are merged.
pub const SLOPE_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MajorantHull {
    pub n: usize,
    /// Grid indices of the vertices, from 0 to `n`.
    pub vertex_indices: Vec<usize>,
    pub vertex_values: Vec<f64>,
    /// Time lengths of the segments between consecutive vertices.
    pub segment_lengths: Vec<f64>,
}

/// Linear interpolation at `i` between `(a, va)` and `(c, vc)`, exact at
/// both ends.
fn lerp(va: f64, vc: f64, a: usize, c: usize, i: usize) -> f64 {
    if i == a {
        va
    } else if i == c {
        vc
    } else {
        va + (vc - va) * ((i - a) as f64 / (c - a) as f64)
    }
}

fn chord(values: &[f64], a: usize, c: usize, i: usize) -> f64 {
    lerp(values[a], values[c], a, c, i)
}

/// True when the slopes into and out of `(ib, vb)` decrease strictly
/// beyond the merge tolerance, so it is a genuine corner. With rises `d1`,
/// `d2` over runs `w1`, `w2`, the relative test
/// `s1 - s2 > tol · max(|s1|, |s2|)` is multiplied through by `w1 w2 > 0`
/// to avoid divisions.
#[inline]
fn corner(ia: usize, va: f64, ib: usize, vb: f64, ic: usize, vc: f64) -> bool {
    let x1 = (vb - va) * (ic - ib) as f64;
    let x2 = (vc - vb) * (ib - ia) as f64;
    x1 - x2 > SLOPE_MERGE_TOL * x1.abs().max(x2.abs())
}

fn is_corner(values: &[f64], a: usize, b: usize, c: usize) -> bool {
    corner(a, values[a], b, values[b], c, values[c])
}

impl MajorantHull {
    fn from_vertices(values: &[f64], vertex_indices: Vec<usize>) -> Self {
        let n = values.len() - 1;
        let vertex_values = vertex_indices.iter().map(|&i| values[i]).collect();
        let segment_lengths = vertex_indices
            .windows(2)
            .map(|w| (w[1] - w[0]) as f64 / n as f64)
            .collect();
        Self {
            n,
            vertex_indices,
            vertex_values,
            segment_lengths,
        }
    }

    /// Segment slopes in time units.
    pub fn slopes(&self) -> Vec<f64> {
        self.vertex_indices
            .windows(2)
            .zip(self.vertex_values.windows(2))
            .map(|(i, v)| (v[1] - v[0]) * self.n as f64 / (i[1] - i[0]) as f64)
            .collect()
    }

    /// Majorant at every grid point.
    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n + 1);
        out.push(self.vertex_values[0]);
        for (k, w) in self.vertex_indices.windows(2).enumerate() {
            let (a, c) = (w[0], w[1]);
            let (va, vc) = (self.vertex_values[k], self.vertex_values[k + 1]);
            for i in a + 1..=c {
                out.push(lerp(va, vc, a, c, i));
            }
        }
        out
    }

    /// Index `k` of the segment `[V_k, V_{k+1}]` containing time `u`.
    pub fn segment_at(&self, u: f64) -> usize {
        let pos = u * self.n as f64;
        let k = self.vertex_indices.partition_point(|&v| (v as f64) <= pos);
        k.clamp(1, self.vertex_indices.len() - 1) - 1
    }
}

/// Upper hull of `(i, values[i])` by a monotone-chain scan.
pub fn concave_majorant(path: &PathGrid) -> MajorantHull {
    let values = &path.values;
    let mut stack: Vec<(usize, f64)> = Vec::with_capacity(64);
    for (c, &vc) in values.iter().enumerate() {
        while let [.., (ia, va), (ib, vb)] = stack[..] {
            if corner(ia, va, ib, vb, c, vc) {
                break;
            }
            stack.pop();
        }
        stack.push((c, vc));
    }
    MajorantHull::from_vertices(values, stack.into_iter().map(|(i, _)| i).collect())
}

/// `O(n³)` reference: a point is a vertex iff it is a corner for every
/// pair of points straddling it, and the majorant at `i` is the largest
/// chord value over all pairs `a ≤ i ≤ c`.
pub fn brute_force_majorant(values: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let n = values.len() - 1;
    let mut vertices = vec![0];
    for i in 1..n {
        let corner = (0..i).all(|a| (i + 1..=n).all(|c| is_corner(values, a, i, c)));
        if corner {
            vertices.push(i);
        }
    }
    vertices.push(n);
    let majorant = (0..=n)
        .map(|i| {
            let mut best = values[i];
            for a in 0..=i {
                for c in i..=n {
                    best = best.max(chord(values, a, c, i));
                }
            }
            best
        })
        .collect();
    (vertices, majorant)
}

/// Largest majorant-minus-path value over the grid and where it occurs.
pub fn max_gap(path: &PathGrid, hull: &MajorantHull) -> (f64, usize) {
    hull.values()
        .iter()
        .zip(&path.values)
        .enumerate()
        .fold((0.0, 0), |best, (i, (m, v))| {
            let g = m - v;
            if g > best.0 {
                (g, i)
            } else {
                best
            }
        })
}

/// Length of the hull segment whose time interval contains `u`. A `u` on a
/// vertex is moved half a grid step toward `1/2`.
pub fn covering_length(hull: &MajorantHull, u: f64) -> f64 {
    let pos = u * hull.n as f64;
    let mut u = u;
    if pos.fract() == 0.0 && hull.vertex_indices.binary_search(&(pos as usize)).is_ok() {
        let half_step = 0.5 / hull.n as f64;
        u += if u < 0.5 { half_step } else { -half_step };
    }
    hull.segment_lengths[hull.segment_at(u)]
}
