//! Boundary value problems of the inclusion pair and the functionals built
//! from their solutions.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use gapstress_core::{InclusionPairGeometry, LameParams, RigidMotion, rigid_basis};

use crate::assembly::Stiffness;
use crate::error::{FemError, Result};
use crate::mesh::{BoundaryTag, Mesh};
use crate::mesher::{MeshOptions, build_mesh, touching_geometry};
use crate::solve::{Constraint, Role, solve};
use crate::space::{Order, Space};

/// Boundary data on the outer boundary.
pub type BoundaryData<'a> = &'a (dyn Fn([f64; 2]) -> [f64; 2] + Sync);

/// A meshed geometry with cached element matrices.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub geometry: InclusionPairGeometry,
    pub mesh: Mesh,
    pub stiffness: Stiffness,
}

impl Oracle {
    pub fn new(g: &InclusionPairGeometry, p: &LameParams, opts: &MeshOptions, order: Order) -> Result<Self> {
        let mesh = build_mesh(g, opts)?;
        let space = Space::new(&mesh, order)?;
        Ok(Self { geometry: g.clone(), stiffness: Stiffness::new(space, p.with_dim(2)?)?, mesh })
    }

    /// Same inclusions at the touching-limit separation.
    pub fn touching(g: &InclusionPairGeometry, p: &LameParams, opts: &MeshOptions, order: Order) -> Result<Self> {
        Self::new(&touching_geometry(g)?, p, opts, order)
    }

    pub fn space(&self) -> &Space {
        &self.stiffness.space
    }

    pub fn n_dofs(&self) -> usize {
        self.space().n_dofs()
    }

    pub fn energy(&self, u: &[f64], w: &[f64]) -> Result<f64> {
        self.stiffness.energy(u, w)
    }

    /// Nodal vector equal to `f` on nodes carrying any of `tags`, zero elsewhere.
    pub fn boundary_data(&self, tags: &[BoundaryTag], f: impl Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
        let space = self.space();
        let mut out = vec![0.0; space.n_dofs()];
        for (i, &p) in space.points.iter().enumerate() {
            if tags.iter().any(|&t| space.has_tag(i, t)) {
                let v = f(p);
                out[2 * i] = v[0];
                out[2 * i + 1] = v[1];
            }
        }
        out
    }
}

fn psi(alpha: usize) -> RigidMotion {
    RigidMotion::new(2, alpha).expect("2D rigid index in 1..=3")
}

fn psi_fn(alpha: usize) -> impl Fn([f64; 2]) -> [f64; 2] {
    let m = psi(alpha);
    move |p| {
        let v = m.eval(&p);
        [v[0], v[1]]
    }
}

fn inclusion_tag(i: usize) -> BoundaryTag {
    if i == 1 { BoundaryTag::Inclusion1 } else { BoundaryTag::Inclusion2 }
}

/// Index of `(i, alpha)` (both 1-based) in the flattened six-vector.
pub fn pair_index(i: usize, alpha: usize) -> usize {
    3 * (i - 1) + alpha - 1
}

/// `v_0` (data `phi` on the outer boundary) and `v_i^alpha` (data `psi_alpha`
/// on inclusion `i`), all with zero data elsewhere.
#[derive(Debug, Clone)]
pub struct VFamily {
    pub v0: Vec<f64>,
    /// Indexed by [`pair_index`].
    pub v: Vec<Vec<f64>>,
    pub residual: f64,
}

impl VFamily {
    pub fn get(&self, i: usize, alpha: usize) -> &[f64] {
        &self.v[pair_index(i, alpha)]
    }
}

pub fn solve_v_family(o: &Oracle, phi: BoundaryData) -> Result<VFamily> {
    let cons = Constraint::new(o.space(), |_| Role::Fixed)?;
    let mut data = vec![o.boundary_data(&[BoundaryTag::Outer], phi)];
    for i in 1..=2 {
        for alpha in 1..=3 {
            data.push(o.boundary_data(&[inclusion_tag(i)], psi_fn(alpha)));
        }
    }
    let mut s = solve(&o.stiffness, &cons, &data)?;
    let v = s.fields.split_off(1);
    Ok(VFamily { v0: s.fields.pop().unwrap(), v, residual: s.residual })
}

/// Displacement plus rigid coefficients per inclusion (one shared set in
/// the touching limit).
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub u: Vec<f64>,
    /// `constants[group][alpha - 1]`.
    pub constants: Vec<[f64; 3]>,
    pub residual: f64,
}

pub fn solve_full(o: &Oracle, phi: BoundaryData) -> Result<OracleSolution> {
    solve_rigid(o, phi, |t| match t {
        BoundaryTag::Inclusion1 => Role::Rigid(0),
        BoundaryTag::Inclusion2 => Role::Rigid(1),
        _ => Role::Fixed,
    })
}

/// Both inclusions move with one rigid motion; meant for an oracle built
/// with [`Oracle::touching`].
pub fn solve_limit(o: &Oracle, phi: BoundaryData) -> Result<OracleSolution> {
    solve_rigid(o, phi, |t| match t {
        BoundaryTag::Inclusion1 | BoundaryTag::Inclusion2 => Role::Rigid(0),
        _ => Role::Fixed,
    })
}

fn solve_rigid(o: &Oracle, phi: BoundaryData, role: impl Fn(BoundaryTag) -> Role) -> Result<OracleSolution> {
    let cons = Constraint::new(o.space(), role)?;
    let data = vec![o.boundary_data(&[BoundaryTag::Outer], phi)];
    let mut s = solve(&o.stiffness, &cons, &data)?;
    Ok(OracleSolution { u: s.fields.pop().unwrap(), constants: s.masters.pop().unwrap(), residual: s.residual })
}

/// Period-cell fields: `psi_alpha` on the upper inclusion and the top side,
/// zero on the lower inclusion and the bottom side, traction-free sides.
#[derive(Debug, Clone)]
pub struct CellSolution {
    /// Fields for `alpha = 1, 2`.
    pub v: [Vec<f64>; 2],
    /// Energies of the two fields.
    pub energies: [f64; 2],
    pub residual: f64,
}

pub fn solve_cell(o: &Oracle) -> Result<CellSolution> {
    let cons = Constraint::new(o.space(), |t| match t {
        BoundaryTag::CellSide => Role::Natural,
        _ => Role::Fixed,
    })?;
    let top = [BoundaryTag::Inclusion1, BoundaryTag::CellTop];
    let data: Vec<Vec<f64>> = (1..=2).map(|a| o.boundary_data(&top, psi_fn(a))).collect();
    let s = solve(&o.stiffness, &cons, &data)?;
    let energies = [o.energy(&s.fields[0], &s.fields[0])?, o.energy(&s.fields[1], &s.fields[1])?];
    let [a, b]: [Vec<f64>; 2] = s.fields.try_into().expect("two right-hand sides");
    Ok(CellSolution { v: [a, b], energies, residual: s.residual })
}

/// Effective shear and extensional moduli from the cell energies.
pub fn cell_moduli(o: &Oracle, cell: &CellSolution) -> Result<(f64, f64)> {
    let (l1, l2) = match o.geometry.outer() {
        gapstress_core::Outer::Rect { half_width, half_height } => (half_width, half_height),
        _ => return Err(FemError::Mismatch("effective moduli need a period cell".into())),
    };
    let p = &o.stiffness.params;
    let ratio = l2 / l1;
    Ok((ratio * cell.energies[0], p.young() / p.longitudinal() * ratio * cell.energies[1]))
}

/// `a[(i,alpha)][(j,beta)] = a(v_i^alpha, v_j^beta)`.
pub fn capacity(o: &Oracle, vf: &VFamily) -> Result<[[f64; 6]; 6]> {
    let mut a = [[0.0; 6]; 6];
    for r in 0..6 {
        for c in r..6 {
            a[r][c] = o.energy(&vf.v[r], &vf.v[c])?;
            a[c][r] = a[r][c];
        }
    }
    Ok(a)
}

/// `b~_j^beta = -a(v_0, v_j^beta)`, so that the constants solve `sum C a = b~`.
pub fn b_tilde(o: &Oracle, vf: &VFamily) -> Result<[f64; 6]> {
    let mut b = [0.0; 6];
    for (k, v) in vf.v.iter().enumerate() {
        b[k] = -o.energy(&vf.v0, v)?;
    }
    Ok(b)
}

fn to_mat(a: &[[f64; 6]; 6]) -> Mat<f64> {
    Mat::from_fn(6, 6, |i, j| a[i][j])
}

/// Rigid constants from the capacity system; `result[i-1][alpha-1]`.
pub fn constants_from_system(a: &[[f64; 6]; 6], b: &[f64; 6]) -> Result<[[f64; 3]; 2]> {
    let llt = to_mat(a).llt(Side::Lower).map_err(|e| FemError::Solver(format!("capacity matrix: {e:?}")))?;
    let x = llt.solve(Mat::from_fn(6, 1, |i, _| b[i]));
    Ok([[x[(0, 0)], x[(1, 0)], x[(2, 0)]], [x[(3, 0)], x[(4, 0)], x[(5, 0)]]])
}

pub fn min_eigenvalue(a: &[[f64; 6]; 6]) -> Result<f64> {
    let ev = to_mat(a)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| FemError::Solver(format!("eigenvalues: {e:?}")))?;
    Ok(ev.into_iter().fold(f64::INFINITY, f64::min))
}

/// `u_b = sum_alpha C_2^alpha (v_1^alpha + v_2^alpha) + v_0`.
pub fn u_b(vf: &VFamily, c: &[[f64; 3]; 2]) -> Vec<f64> {
    let mut u = vf.v0.clone();
    for alpha in 1..=3 {
        let c2 = c[1][alpha - 1];
        for (k, val) in u.iter_mut().enumerate() {
            *val += c2 * (vf.get(1, alpha)[k] + vf.get(2, alpha)[k]);
        }
    }
    u
}

/// `b_1^beta = -a(u_b, v_1^beta)`.
pub fn b1_from_ub(o: &Oracle, vf: &VFamily, ub: &[f64]) -> Result<[f64; 3]> {
    let mut b = [0.0; 3];
    for beta in 1..=3 {
        b[beta - 1] = -o.energy(ub, vf.get(1, beta))?;
    }
    Ok(b)
}

/// `b_1^beta = sum_alpha (C_1^alpha - C_2^alpha) a_11^{alpha beta}`.
pub fn b1_from_constants(a: &[[f64; 6]; 6], c: &[[f64; 3]; 2]) -> [f64; 3] {
    let mut b = [0.0; 3];
    for beta in 1..=3 {
        for alpha in 1..=3 {
            b[beta - 1] += (c[0][alpha - 1] - c[1][alpha - 1]) * a[pair_index(1, alpha)][pair_index(1, beta)];
        }
    }
    b
}

/// Nodal vector equal to `psi_beta` on inclusion-1 boundary nodes and zero
/// at every other node. Pairing a discrete solution with it gives the
/// boundary moment on inclusion 1 without flux quadrature.
pub fn moment_test_field(o: &Oracle, beta: usize) -> Vec<f64> {
    o.boundary_data(&[BoundaryTag::Inclusion1], psi_fn(beta))
}

/// `b_1^{*beta} = -a(u*, w_beta)` with `w_beta` from [`moment_test_field`].
pub fn b1_star(o: &Oracle, limit: &OracleSolution) -> Result<[f64; 3]> {
    let mut b = [0.0; 3];
    for beta in 1..=3 {
        b[beta - 1] = -o.energy(&limit.u, &moment_test_field(o, beta))?;
    }
    Ok(b)
}

/// `u = sum C_i^alpha v_i^alpha + v_0`.
pub fn reconstruct(vf: &VFamily, c: &[[f64; 3]; 2]) -> Vec<f64> {
    let mut u = vf.v0.clone();
    for i in 1..=2 {
        for alpha in 1..=3 {
            let ci = c[i - 1][alpha - 1];
            for (val, v) in u.iter_mut().zip(vf.get(i, alpha)) {
                *val += ci * v;
            }
        }
    }
    u
}

/// The 2D rigid basis, for callers building boundary data.
pub fn rigid_data(alpha: usize) -> Result<impl Fn([f64; 2]) -> [f64; 2] + Sync> {
    let m = rigid_basis(2)?.get(alpha.wrapping_sub(1)).copied().ok_or(FemError::Mismatch(format!("rigid index {alpha}")))?;
    Ok(move |p: [f64; 2]| {
        let v = m.eval(&p);
        [v[0], v[1]]
    })
}
