//! Lagrange P1/P2 spaces on the matrix triangles of a mesh.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{FemError, Result};
use crate::mesh::{BoundaryTag, Mesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    P1,
    #[default]
    P2,
}

impl Order {
    pub fn nodes_per_element(self) -> usize {
        match self {
            Order::P1 => 3,
            Order::P2 => 6,
        }
    }
}

/// Nodes and elements of the discrete space. Vector fields are stored
/// interleaved: component `c` of node `i` sits at `2 i + c`.
#[derive(Debug, Clone)]
pub struct Space {
    pub order: Order,
    pub points: Vec<[f64; 2]>,
    /// Flat connectivity, `order.nodes_per_element()` entries per element.
    /// P2 local order: three vertices, then midpoints of edges 01, 12, 20.
    pub elements: Vec<usize>,
    /// Boundary tag bits per node.
    pub tags: Vec<u8>,
    pub mesh_h: f64,
}

/// Gradients of the barycentric coordinates and the triangle area.
pub fn barycentric_gradients(v: [[f64; 2]; 3]) -> ([[f64; 2]; 3], f64) {
    let [a, b, c] = v;
    let area = crate::mesh::signed_area(a, b, c);
    let s = 0.5 / area;
    (
        [
            [(b[1] - c[1]) * s, (c[0] - b[0]) * s],
            [(c[1] - a[1]) * s, (a[0] - c[0]) * s],
            [(a[1] - b[1]) * s, (b[0] - a[0]) * s],
        ],
        area,
    )
}

pub fn shape_values(order: Order, l: [f64; 3]) -> [f64; 6] {
    match order {
        Order::P1 => [l[0], l[1], l[2], 0.0, 0.0, 0.0],
        Order::P2 => [
            l[0] * (2.0 * l[0] - 1.0),
            l[1] * (2.0 * l[1] - 1.0),
            l[2] * (2.0 * l[2] - 1.0),
            4.0 * l[0] * l[1],
            4.0 * l[1] * l[2],
            4.0 * l[2] * l[0],
        ],
    }
}

pub fn shape_gradients(order: Order, l: [f64; 3], gl: &[[f64; 2]; 3]) -> [[f64; 2]; 6] {
    let mut g = [[0.0; 2]; 6];
    match order {
        Order::P1 => g[..3].copy_from_slice(gl),
        Order::P2 => {
            for i in 0..3 {
                let s = 4.0 * l[i] - 1.0;
                g[i] = [s * gl[i][0], s * gl[i][1]];
            }
            for (k, (i, j)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
                g[3 + k] = [
                    4.0 * (l[i] * gl[j][0] + l[j] * gl[i][0]),
                    4.0 * (l[i] * gl[j][1] + l[j] * gl[i][1]),
                ];
            }
        }
    }
    g
}

/// Barycentric coordinates of the local nodes.
pub fn local_node_coords(order: Order) -> &'static [[f64; 3]] {
    const P2: [[f64; 3]; 6] = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.5, 0.5, 0.0],
        [0.0, 0.5, 0.5],
        [0.5, 0.0, 0.5],
    ];
    &P2[..order.nodes_per_element()]
}

impl Space {
    pub fn new(mesh: &Mesh, order: Order) -> Result<Self> {
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut points = Vec::new();
        let tris: Vec<[usize; 3]> = mesh.matrix_triangles().map(|t| mesh.triangles[t]).collect();
        if tris.is_empty() {
            return Err(FemError::Mesh("mesh has no matrix triangles".into()));
        }
        for tri in &tris {
            for &v in tri {
                index.entry(v).or_insert_with(|| {
                    points.push(mesh.nodes[v]);
                    points.len() - 1
                });
            }
        }
        let mut tags = vec![0u8; points.len()];
        let mut edge_bits: HashMap<(usize, usize), u8> = HashMap::new();
        for e in &mesh.edges {
            let [a, b] = e.nodes.map(|n| index[&n]);
            tags[a] |= e.tag.bit();
            tags[b] |= e.tag.bit();
            edge_bits.insert((a.min(b), a.max(b)), e.tag.bit());
        }
        let npe = order.nodes_per_element();
        let mut elements = Vec::with_capacity(tris.len() * npe);
        let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &tris {
            let v = tri.map(|n| index[&n]);
            elements.extend_from_slice(&v);
            if order == Order::P2 {
                for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                    let key = (v[i].min(v[j]), v[i].max(v[j]));
                    let id = *mids.entry(key).or_insert_with(|| {
                        let (p, q) = (points[v[i]], points[v[j]]);
                        points.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
                        tags.push(edge_bits.get(&key).copied().unwrap_or(0));
                        points.len() - 1
                    });
                    elements.push(id);
                }
            }
        }
        Ok(Self { order, points, elements, tags, mesh_h: mesh.h_target })
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.points.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len() / self.order.nodes_per_element()
    }

    pub fn element(&self, e: usize) -> &[usize] {
        let n = self.order.nodes_per_element();
        &self.elements[e * n..(e + 1) * n]
    }

    pub fn vertices(&self, e: usize) -> [[f64; 2]; 3] {
        let el = self.element(e);
        [self.points[el[0]], self.points[el[1]], self.points[el[2]]]
    }

    pub fn has_tag(&self, node: usize, tag: BoundaryTag) -> bool {
        self.tags[node] & tag.bit() != 0
    }

    /// Nodal interpolant of a vector function.
    pub fn interpolate(&self, f: impl Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
        self.points.iter().flat_map(|&p| f(p)).collect()
    }

    /// `grad[c][j] = d u_c / d x_j` of a vector field on element `e` at barycentric point `l`.
    pub fn element_gradient(&self, e: usize, u: &[f64], l: [f64; 3]) -> [[f64; 2]; 2] {
        let (gl, _) = barycentric_gradients(self.vertices(e));
        let gn = shape_gradients(self.order, l, &gl);
        let mut g = [[0.0; 2]; 2];
        for (a, &node) in self.element(e).iter().enumerate() {
            for c in 0..2 {
                let val = u[2 * node + c];
                g[c][0] += val * gn[a][0];
                g[c][1] += val * gn[a][1];
            }
        }
        g
    }

    pub fn element_value(&self, e: usize, u: &[f64], l: [f64; 3]) -> [f64; 2] {
        let n = shape_values(self.order, l);
        let mut out = [0.0; 2];
        for (a, &node) in self.element(e).iter().enumerate() {
            out[0] += n[a] * u[2 * node];
            out[1] += n[a] * u[2 * node + 1];
        }
        out
    }
}
