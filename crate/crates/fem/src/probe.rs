//! Point location and recovered gradients.

use gapstress_core::GradientMatrix;

use crate::error::{FemError, Result};
use crate::space::{Space, barycentric_gradients, local_node_coords, shape_values};

/// Bucket grid over element bounding boxes.
#[derive(Debug, Clone)]
pub struct Probe<'a> {
    space: &'a Space,
    origin: [f64; 2],
    cell: [f64; 2],
    dims: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

fn barycentric(v: [[f64; 2]; 3], p: [f64; 2]) -> [f64; 3] {
    let (gl, _) = barycentric_gradients(v);
    let l1 = gl[1][0] * (p[0] - v[0][0]) + gl[1][1] * (p[1] - v[0][1]);
    let l2 = gl[2][0] * (p[0] - v[0][0]) + gl[2][1] * (p[1] - v[0][1]);
    [1.0 - l1 - l2, l1, l2]
}

impl<'a> Probe<'a> {
    pub fn new(space: &'a Space) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &space.points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let side = (space.n_elements() as f64).sqrt().ceil().max(1.0) as usize;
        let dims = [side, side];
        let cell = [(hi[0] - lo[0]) / side as f64 * (1.0 + 1e-12), (hi[1] - lo[1]) / side as f64 * (1.0 + 1e-12)];
        let mut probe = Self { space, origin: lo, cell, dims, buckets: vec![Vec::new(); side * side] };
        for e in 0..space.n_elements() {
            let v = space.vertices(e);
            let a = probe.bucket_of([v[0][0].min(v[1][0]).min(v[2][0]), v[0][1].min(v[1][1]).min(v[2][1])]);
            let b = probe.bucket_of([v[0][0].max(v[1][0]).max(v[2][0]), v[0][1].max(v[1][1]).max(v[2][1])]);
            for i in a[0]..=b[0] {
                for j in a[1]..=b[1] {
                    probe.buckets[j * dims[0] + i].push(e);
                }
            }
        }
        probe
    }

    fn bucket_of(&self, p: [f64; 2]) -> [usize; 2] {
        let f = |k: usize| (((p[k] - self.origin[k]) / self.cell[k]).floor().max(0.0) as usize).min(self.dims[k] - 1);
        [f(0), f(1)]
    }

    /// Containing element and barycentric coordinates. Points just outside
    /// the discrete boundary (curved boundaries are polygonal here) snap to
    /// the nearest element.
    pub fn locate(&self, p: [f64; 2]) -> Result<(usize, [f64; 3])> {
        let [i, j] = self.bucket_of(p);
        let inside_box = (0..2).all(|k| p[k] >= self.origin[k] && p[k] <= self.origin[k] + self.cell[k] * self.dims[k] as f64);
        if !inside_box {
            return Err(FemError::OutsideMesh(p[0], p[1]));
        }
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &e in &self.buckets[j * self.dims[0] + i] {
            let l = barycentric(self.space.vertices(e), p);
            let worst = l[0].min(l[1]).min(l[2]);
            if worst >= -1e-12 {
                return Ok((e, l));
            }
            if best.is_none_or(|b| worst > b.2) {
                best = Some((e, l, worst));
            }
        }
        match best {
            Some((e, l, worst)) if worst > -0.05 => {
                let c = l.map(|v| v.max(0.0));
                let s = c[0] + c[1] + c[2];
                Ok((e, c.map(|v| v / s)))
            }
            _ => Err(FemError::OutsideMesh(p[0], p[1])),
        }
    }

    pub fn value(&self, u: &[f64], p: [f64; 2]) -> Result<[f64; 2]> {
        let (e, l) = self.locate(p)?;
        Ok(self.space.element_value(e, u, l))
    }

    /// Area-weighted average of element gradients at every node.
    pub fn recover(&self, u: &[f64]) -> Vec<[[f64; 2]; 2]> {
        let space = self.space;
        let mut acc = vec![[[0.0; 2]; 2]; space.n_points()];
        let mut weight = vec![0.0; space.n_points()];
        let coords = local_node_coords(space.order);
        for e in 0..space.n_elements() {
            let (_, area) = barycentric_gradients(space.vertices(e));
            for (a, &node) in space.element(e).iter().enumerate() {
                let g = space.element_gradient(e, u, coords[a]);
                for r in 0..2 {
                    for c in 0..2 {
                        acc[node][r][c] += area * g[r][c];
                    }
                }
                weight[node] += area;
            }
        }
        for (g, w) in acc.iter_mut().zip(&weight) {
            for row in g.iter_mut() {
                for v in row.iter_mut() {
                    *v /= w;
                }
            }
        }
        acc
    }

    /// Recovered gradients interpolated at `points`.
    pub fn gradients(&self, u: &[f64], points: &[[f64; 2]]) -> Result<Vec<GradientMatrix>> {
        if u.len() != self.space.n_dofs() {
            return Err(FemError::Mismatch("field does not belong to this space".into()));
        }
        let nodal = self.recover(u);
        points
            .iter()
            .map(|&p| {
                let (e, l) = self.locate(p)?;
                let n = shape_values(self.space.order, l);
                let mut g = [[0.0; 2]; 2];
                for (a, &node) in self.space.element(e).iter().enumerate() {
                    for r in 0..2 {
                        for c in 0..2 {
                            g[r][c] += n[a] * nodal[node][r][c];
                        }
                    }
                }
                Ok(GradientMatrix::from_2x2(g))
            })
            .collect()
    }

    /// Raw element gradient at a point, without recovery.
    pub fn element_gradient(&self, u: &[f64], p: [f64; 2]) -> Result<GradientMatrix> {
        let (e, l) = self.locate(p)?;
        Ok(GradientMatrix::from_2x2(self.space.element_gradient(e, u, l)))
    }
}
