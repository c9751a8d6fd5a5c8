//! Mesh generation for a pair of superellipse (or disk) inclusions, either in
//! an outer disk or in a rectangular period cell.
//!
//! The gap `|x_1| <= R` is covered by a structured block of vertices: columns
//! spaced by `min(h, delta(x_1)/n_layers)` with `n_layers + 1` points between
//! the two true curves. Everything else comes from a constrained Delaunay
//! triangulation refined to a 25 degree angle bound.

use std::collections::{HashMap, HashSet};

use gapstress_core::{InclusionPairGeometry, Outer, Superellipse};
use spade::{
    AngleLimit, ConstrainedDelaunayTriangulation, HasPosition, Point2, RefinementParameters, Triangulation,
};

use crate::error::{FemError, Result};
use crate::mesh::{BoundaryEdge, BoundaryTag, Mesh, Region, signed_area};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOptions {
    /// Far-field element size.
    pub h_target: f64,
    /// Element layers across the gap.
    pub n_layers: usize,
    /// Inclusion boundaries are sampled at most this fraction of `h_target`.
    pub inclusion_fraction: f64,
    /// Lower bound on boundary spacing outside the gap block.
    pub h_min: f64,
    pub angle_limit_deg: f64,
    /// Element size on the outer disk boundary and upper size bound; the
    /// mesh grades from the inclusions out to it. Defaults to `h_target`.
    pub far_h: Option<f64>,
}

impl Default for MeshOptions {
    fn default() -> Self {
        Self { h_target: 0.2, n_layers: 4, inclusion_fraction: 0.5, h_min: 1e-3, angle_limit_deg: 25.0, far_h: None }
    }
}

impl MeshOptions {
    pub fn new(h_target: f64, n_layers: usize) -> Self {
        Self { h_target, n_layers, ..Self::default() }
    }

    pub fn with_far_h(mut self, far_h: f64) -> Self {
        self.far_h = Some(far_h);
        self
    }

    fn far(&self) -> f64 {
        self.far_h.unwrap_or(self.h_target).max(self.h_target)
    }
}

#[derive(Debug, Clone, Copy)]
struct Vx {
    pos: Point2<f64>,
    bits: u8,
}

impl HasPosition for Vx {
    type Scalar = f64;
    fn position(&self) -> Point2<f64> {
        self.pos
    }
}

impl From<Point2<f64>> for Vx {
    fn from(pos: Point2<f64>) -> Self {
        Vx { pos, bits: 0 }
    }
}

fn vx(p: [f64; 2], bits: u8) -> Vx {
    Vx { pos: Point2::new(p[0], p[1]), bits }
}

fn curve_point(shape: Superellipse, center: [f64; 2], theta: f64) -> [f64; 2] {
    let rho = shape.radius_at(theta);
    [center[0] + rho * theta.cos(), center[1] + rho * theta.sin()]
}

/// Marches from `0` to `total` with local step `step(s)`, then rescales so
/// the last step lands on `total`. Returns the interior stations.
fn march(total: f64, step: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut s = vec![0.0];
    loop {
        let last = *s.last().unwrap();
        let next = last + step(last).max(1e-12 * total);
        if next >= total {
            // keep whichever end point leaves the more uniform final step
            let overshoot = next - total;
            let end = if overshoot < 0.5 * (next - last) || s.len() == 1 { next } else { last };
            if end == last {
                s.pop();
            }
            let scale = total / end;
            return s.into_iter().skip(1).map(|v| v * scale).collect();
        }
        s.push(next);
    }
}

/// Points strictly between the two angles along the curve, spaced by `spacing`.
fn sample_arc(
    shape: Superellipse,
    center: [f64; 2],
    th0: f64,
    th1: f64,
    spacing: &dyn Fn([f64; 2]) -> f64,
) -> Vec<[f64; 2]> {
    let n = 4096;
    let mut cum = Vec::with_capacity(n + 1);
    let mut thetas = Vec::with_capacity(n + 1);
    let mut prev = curve_point(shape, center, th0);
    cum.push(0.0);
    thetas.push(th0);
    for k in 1..=n {
        let th = th0 + (th1 - th0) * k as f64 / n as f64;
        let p = curve_point(shape, center, th);
        cum.push(cum[k - 1] + (p[0] - prev[0]).hypot(p[1] - prev[1]));
        thetas.push(th);
        prev = p;
    }
    let total = cum[n];
    let theta_at = |s: f64| {
        let k = cum.partition_point(|&c| c < s).clamp(1, n);
        let t = (s - cum[k - 1]) / (cum[k] - cum[k - 1]);
        thetas[k - 1] + t * (thetas[k] - thetas[k - 1])
    };
    march(total, |s| spacing(curve_point(shape, center, theta_at(s))))
        .into_iter()
        .map(|s| curve_point(shape, center, theta_at(s)))
        .collect()
}

fn sample_segment(a: [f64; 2], b: [f64; 2], h: f64) -> Vec<[f64; 2]> {
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    let k = (len / h).ceil().max(1.0) as usize;
    (1..k)
        .map(|i| {
            let t = i as f64 / k as f64;
            [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
        })
        .collect()
}

/// Column abscissae `0 = x_0 < ... < x_K = half_width` of the gap block.
fn block_columns(g: &InclusionPairGeometry, half_width: f64, h: f64, n_layers: usize) -> Vec<f64> {
    let gap = |x: f64| g.gap_jet(&[x]).v;
    let mut xs = vec![0.0];
    xs.extend(march(half_width, |x| h.min(gap(x) / n_layers as f64)));
    xs.push(half_width);
    xs
}

struct Block {
    /// Columns from `-R` to `R`; each holds `n_layers + 1` points bottom to top.
    columns: Vec<Vec<[f64; 2]>>,
    half_width: f64,
}

fn gap_block(g: &InclusionPairGeometry, opts: &MeshOptions) -> Block {
    let r = g.chart_half_width();
    let pos = block_columns(g, r, opts.h_target, opts.n_layers);
    let xs: Vec<f64> = pos.iter().rev().map(|x| -x).chain(pos.iter().skip(1).copied()).collect();
    let n = opts.n_layers;
    let columns = xs
        .iter()
        .map(|&x| {
            let (lo, hi) = g.surfaces(&[x]);
            (0..=n).map(|j| [x, lo + (hi - lo) * j as f64 / n as f64]).collect()
        })
        .collect();
    Block { columns, half_width: r }
}

/// Dense boundary polyline of a shape, for distance queries.
fn dense_outline(shape: Superellipse, center: [f64; 2]) -> Vec<[f64; 2]> {
    (0..2048).map(|k| curve_point(shape, center, std::f64::consts::TAU * k as f64 / 2048.0)).collect()
}

fn distance_to(points: &[[f64; 2]], p: [f64; 2]) -> f64 {
    points.iter().map(|q| (q[0] - p[0]).hypot(q[1] - p[1])).fold(f64::INFINITY, f64::min)
}

fn angle_about(center: [f64; 2], p: [f64; 2]) -> f64 {
    (p[1] - center[1]).atan2(p[0] - center[0])
}

struct Pslg {
    vertices: Vec<Vx>,
    edges: Vec<[usize; 2]>,
}

impl Pslg {
    fn new() -> Self {
        Self { vertices: Vec::new(), edges: Vec::new() }
    }

    /// Adds a closed loop of constrained vertices.
    fn add_loop(&mut self, pts: &[([f64; 2], u8)]) {
        let base = self.vertices.len();
        for &(p, bits) in pts {
            self.vertices.push(vx(p, bits));
        }
        let k = pts.len();
        for i in 0..k {
            self.edges.push([base + i, base + (i + 1) % k]);
        }
    }

    fn add_free(&mut self, p: [f64; 2]) {
        self.vertices.push(vx(p, 0));
    }
}

fn check_inputs(g: &InclusionPairGeometry, opts: &MeshOptions) -> Result<([Superellipse; 2], [[f64; 2]; 2])> {
    if g.d() != 2 {
        return Err(FemError::Mesh("only 2D geometries can be meshed".into()));
    }
    if opts.n_layers < 4 {
        return Err(FemError::Mesh(format!("need at least 4 gap layers, got {}", opts.n_layers)));
    }
    if !(opts.h_target > 0.0 && opts.h_min > 0.0) {
        return Err(FemError::Mesh("element sizes must be positive".into()));
    }
    let shapes = g.shapes().ok_or_else(|| FemError::Mesh("geometry has no inclusion shapes".into()))?;
    let centers = g.centers().unwrap();
    let diameter = 2.0 * shapes[0].r.max(shapes[1].r);
    if g.eps() < 1e-6 * diameter {
        return Err(FemError::Degenerate(format!("eps = {} below 1e-6 of the inclusion diameter", g.eps())));
    }
    Ok((shapes, centers))
}

/// Triangulates `g` (inclusions in an outer disk, or a period cell).
pub fn build_mesh(g: &InclusionPairGeometry, opts: &MeshOptions) -> Result<Mesh> {
    let (shapes, centers) = check_inputs(g, opts)?;
    let block = gap_block(g, opts);
    let h_inc = opts.h_target * opts.inclusion_fraction;
    let outlines = [dense_outline(shapes[0], centers[0]), dense_outline(shapes[1], centers[1])];
    let spacing_near = |other: usize| {
        let outline = &outlines[other];
        move |p: [f64; 2]| (distance_to(outline, p) / opts.n_layers as f64).clamp(opts.h_min, h_inc)
    };
    let (sp1, sp2) = (spacing_near(1), spacing_near(0));
    let top: Vec<[f64; 2]> = block.columns.iter().map(|c| *c.last().unwrap()).collect();
    let bottom: Vec<[f64; 2]> = block.columns.iter().map(|c| c[0]).collect();
    let (i1, i2) = (BoundaryTag::Inclusion1.bit(), BoundaryTag::Inclusion2.bit());
    let mut pslg = Pslg::new();
    let cell = matches!(g.outer(), Outer::Rect { .. });
    // angles of the block end points about each center
    let (c1, c2) = (centers[0], centers[1]);
    let up_right = angle_about(c1, *top.last().unwrap());
    let up_left = angle_about(c1, top[0]);
    let low_right = angle_about(c2, *bottom.last().unwrap());
    let low_left = angle_about(c2, bottom[0]);
    use std::f64::consts::PI;
    match g.outer() {
        Outer::Disk { radius } => {
            let n_out = ((std::f64::consts::TAU * radius / opts.far()).ceil() as usize).max(16);
            let outer: Vec<([f64; 2], u8)> = (0..n_out)
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / n_out as f64;
                    ([radius * t.cos(), radius * t.sin()], BoundaryTag::Outer.bit())
                })
                .collect();
            pslg.add_loop(&outer);
            // upper inclusion: block top row left to right, then over the top
            let mut loop1: Vec<([f64; 2], u8)> = top.iter().map(|&p| (p, i1)).collect();
            loop1.extend(sample_arc(shapes[0], c1, up_right, up_left + 2.0 * PI, &sp1).into_iter().map(|p| (p, i1)));
            pslg.add_loop(&loop1);
            let mut loop2: Vec<([f64; 2], u8)> = bottom.iter().map(|&p| (p, i2)).collect();
            loop2.extend(sample_arc(shapes[1], c2, low_right, low_left - 2.0 * PI, &sp2).into_iter().map(|p| (p, i2)));
            pslg.add_loop(&loop2);
        }
        Outer::Rect { half_width: l1, half_height: l2 } => {
            let (r1, r2) = (shapes[0].r, shapes[1].r);
            let h = opts.h_target;
            let (side, tb, bb) = (BoundaryTag::CellSide.bit(), BoundaryTag::CellTop.bit(), BoundaryTag::CellBottom.bit());
            let mut poly: Vec<([f64; 2], u8)> = Vec::new();
            let push_all = |poly: &mut Vec<([f64; 2], u8)>, pts: Vec<[f64; 2]>, bits: u8| {
                poly.extend(pts.into_iter().map(|p| (p, bits)));
            };
            let bl = [-l1, -l2];
            let j_bl = [c2[0] - r2, -l2];
            let j_br = [c2[0] + r2, -l2];
            let br = [l1, -l2];
            let tr = [l1, l2];
            let j_tr = [c1[0] + r1, l2];
            let j_tl = [c1[0] - r1, l2];
            let tl = [-l1, l2];
            poly.push((bl, side | bb));
            push_all(&mut poly, sample_segment(bl, j_bl, h), bb);
            poly.push((j_bl, bb | i2));
            push_all(&mut poly, sample_arc(shapes[1], c2, PI, low_left, &sp2), i2);
            push_all(&mut poly, bottom.clone(), i2);
            push_all(&mut poly, sample_arc(shapes[1], c2, low_right, 0.0, &sp2), i2);
            poly.push((j_br, bb | i2));
            push_all(&mut poly, sample_segment(j_br, br, h), bb);
            poly.push((br, side | bb));
            push_all(&mut poly, sample_segment(br, tr, h), side);
            poly.push((tr, side | tb));
            push_all(&mut poly, sample_segment(tr, j_tr, h), tb);
            poly.push((j_tr, tb | i1));
            push_all(&mut poly, sample_arc(shapes[0], c1, 0.0, up_right, &sp1), i1);
            push_all(&mut poly, top.iter().rev().copied().collect(), i1);
            push_all(&mut poly, sample_arc(shapes[0], c1, up_left, -PI, &sp1), i1);
            poly.push((j_tl, tb | i1));
            push_all(&mut poly, sample_segment(j_tl, tl, h), tb);
            poly.push((tl, side | tb));
            push_all(&mut poly, sample_segment(tl, bl, h), side);
            pslg.add_loop(&poly);
        }
    }
    for col in &block.columns {
        for &p in &col[1..col.len() - 1] {
            pslg.add_free(p);
        }
    }
    triangulate(pslg, opts, block.half_width, cell, &shapes, &centers)
}

fn triangulate(
    pslg: Pslg,
    opts: &MeshOptions,
    block_half_width: f64,
    cell: bool,
    shapes: &[Superellipse; 2],
    centers: &[[f64; 2]; 2],
) -> Result<Mesh> {
    let mut cdt = ConstrainedDelaunayTriangulation::<Vx>::bulk_load_cdt(pslg.vertices, pslg.edges)
        .map_err(|e| FemError::Mesh(format!("triangulation failed: {e:?}")))?;
    let h = opts.far();
    let params = RefinementParameters::<f64>::new()
        .with_angle_limit(AngleLimit::from_deg(opts.angle_limit_deg))
        .with_max_allowed_area(3f64.sqrt() / 4.0 * h * h)
        .with_min_required_area(1e-3 * opts.h_min * opts.h_min)
        .keep_constraint_edges()
        .exclude_outer_faces(true)
        .with_max_additional_vertices(4_000_000);
    let result = cdt.refine(params);
    if !result.refinement_complete {
        return Err(FemError::Mesh("refinement ran out of vertices".into()));
    }
    let excluded: HashSet<usize> = result.excluded_faces.iter().map(|f| f.index()).collect();
    let mut used: HashMap<usize, usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut bits = Vec::new();
    let mut triangles = Vec::new();
    let mut regions = Vec::new();
    for face in cdt.inner_faces() {
        let vs = face.vertices();
        let pts: Vec<[f64; 2]> = vs.iter().map(|v| [v.position().x, v.position().y]).collect();
        let region = if excluded.contains(&face.fix().index()) {
            if cell {
                continue;
            }
            let c = [(pts[0][0] + pts[1][0] + pts[2][0]) / 3.0, (pts[0][1] + pts[1][1] + pts[2][1]) / 3.0];
            let inside = |i: usize| shapes[i].level(c[0] - centers[i][0], c[1] - centers[i][1]) < 1.0;
            if inside(0) {
                Region::Inclusion1
            } else if inside(1) {
                Region::Inclusion2
            } else {
                return Err(FemError::Mesh(format!("excluded face at {c:?} is in no inclusion")));
            }
        } else {
            Region::Matrix
        };
        let mut tri = [0usize; 3];
        for (k, v) in vs.iter().enumerate() {
            let id = v.fix().index();
            tri[k] = *used.entry(id).or_insert_with(|| {
                nodes.push(pts[k]);
                bits.push(v.data().bits);
                nodes.len() - 1
            });
        }
        if signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]) < 0.0 {
            tri.swap(1, 2);
        }
        triangles.push(tri);
        regions.push(region);
    }
    let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        if regions[t] != Region::Matrix {
            continue;
        }
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            *edge_count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let mut boundary: Vec<(usize, usize)> = edge_count.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect();
    boundary.sort_unstable();
    let mut edges = Vec::with_capacity(boundary.len());
    for (a, b) in boundary {
        let common = bits[a] & bits[b];
        let tag = BoundaryTag::from_bits(common).ok_or_else(|| {
            FemError::Mesh(format!("boundary edge {:?}-{:?} joins different boundary parts", nodes[a], nodes[b]))
        })?;
        edges.push(BoundaryEdge { nodes: [a, b], tag });
    }
    let mesh = Mesh { nodes, triangles, regions, edges, n_layers: opts.n_layers, h_target: opts.h_target, block_half_width };
    mesh.validate()?;
    Ok(mesh)
}

/// Touching-limit stand-in: the same geometry at `eps0 = 1e-4` times the
/// inclusion diameter.
pub fn touching_geometry(g: &InclusionPairGeometry) -> Result<InclusionPairGeometry> {
    let shapes = g.shapes().ok_or_else(|| FemError::Mesh("geometry has no inclusion shapes".into()))?;
    let diameter = 2.0 * shapes[0].r.max(shapes[1].r);
    Ok(g.with_eps(1e-4 * diameter)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn march_hits_the_end() {
        let s = march(1.0, |_| 0.3);
        assert_eq!(s.len(), 2);
        assert!((s[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!(march(1.0, |_| 2.0).is_empty());
    }

    #[test]
    fn block_columns_resolve_the_gap() {
        let g = InclusionPairGeometry::disks_to_model(1.0, 1.0, 0.01, 4.0).unwrap();
        let xs = block_columns(&g, 0.5, 0.1, 4);
        assert_eq!(xs[0], 0.0);
        assert_eq!(*xs.last().unwrap(), 0.5);
        assert!((xs[1] - 0.0025).abs() < 1e-3);
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
    }
}
