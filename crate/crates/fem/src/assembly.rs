//! Element stiffness matrices and the energy bilinear form.

use gapstress_core::{GradientMatrix, LameParams, energy_density};

use crate::error::{FemError, Result};
use crate::space::{Space, barycentric_gradients, shape_gradients};

/// Interior three-point rule, exact for quadratics.
const QUAD: [[f64; 3]; 3] = [
    [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
    [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
    [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
];

/// Cached element matrices. Local vector dof `2 a + c` is component `c` of
/// local node `a`.
#[derive(Debug, Clone)]
pub struct Stiffness {
    pub space: Space,
    pub params: LameParams,
    nloc: usize,
    local: Vec<f64>,
}

fn element_stiffness(p: &LameParams, space: &Space, e: usize, out: &mut [f64]) -> Result<()> {
    let (gl, area) = barycentric_gradients(space.vertices(e));
    if !(area > 0.0) {
        return Err(FemError::Mesh(format!("element {e} has area {area}")));
    }
    let npe = space.order.nodes_per_element();
    let nloc = 2 * npe;
    out.fill(0.0);
    for l in QUAD {
        let gn = shape_gradients(space.order, l, &gl);
        let unit: Vec<GradientMatrix> = (0..nloc)
            .map(|k| {
                let (a, c) = (k / 2, k % 2);
                let mut rows = [[0.0; 2]; 2];
                rows[c] = gn[a];
                GradientMatrix::from_2x2(rows)
            })
            .collect();
        let w = area / 3.0;
        for i in 0..nloc {
            for j in i..nloc {
                let v = w * energy_density(p, &unit[i], &unit[j])?;
                out[i * nloc + j] += v;
                if j != i {
                    out[j * nloc + i] += v;
                }
            }
        }
    }
    Ok(())
}

impl Stiffness {
    pub fn new(space: Space, params: LameParams) -> Result<Self> {
        if params.d() != 2 {
            return Err(FemError::Mismatch("the finite element model is two-dimensional".into()));
        }
        let nloc = 2 * space.order.nodes_per_element();
        let mut local = vec![0.0; nloc * nloc * space.n_elements()];
        for (e, block) in local.chunks_mut(nloc * nloc).enumerate() {
            element_stiffness(&params, &space, e, block)?;
        }
        Ok(Self { space, params, nloc, local })
    }

    pub fn local_size(&self) -> usize {
        self.nloc
    }

    pub fn element_matrix(&self, e: usize) -> &[f64] {
        let n = self.nloc * self.nloc;
        &self.local[e * n..(e + 1) * n]
    }

    /// Global dof of local dof `k` on element `e`.
    pub fn global_dof(&self, e: usize, k: usize) -> usize {
        2 * self.space.element(e)[k / 2] + k % 2
    }

    /// Energy bilinear form `a(u, w)` summed element by element.
    pub fn energy(&self, u: &[f64], w: &[f64]) -> Result<f64> {
        let n = self.space.n_dofs();
        if u.len() != n || w.len() != n {
            return Err(FemError::Mismatch(format!("fields of length {} and {}, space has {n} dofs", u.len(), w.len())));
        }
        let nloc = self.nloc;
        let mut total = 0.0;
        let mut ue = vec![0.0; nloc];
        let mut we = vec![0.0; nloc];
        for e in 0..self.space.n_elements() {
            for k in 0..nloc {
                let g = self.global_dof(e, k);
                ue[k] = u[g];
                we[k] = w[g];
            }
            let ke = self.element_matrix(e);
            for i in 0..nloc {
                if ue[i] == 0.0 {
                    continue;
                }
                let row = &ke[i * nloc..(i + 1) * nloc];
                total += ue[i] * row.iter().zip(&we).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        Ok(total)
    }

    /// Largest strain entry over element quadrature points.
    pub fn max_strain(&self, u: &[f64]) -> f64 {
        let mut best: f64 = 0.0;
        for e in 0..self.space.n_elements() {
            for l in QUAD {
                let g = self.space.element_gradient(e, u, l);
                let off = 0.5 * (g[0][1] + g[1][0]);
                best = best.max(g[0][0].abs()).max(g[1][1].abs()).max(off.abs());
            }
        }
        best
    }
}
