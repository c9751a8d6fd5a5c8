//! Condensed linear systems: free dofs, Dirichlet dofs and rigid inclusions
//! carried by three master unknowns each.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use gapstress_core::{RigidMotion, rigid_basis};

use crate::assembly::Stiffness;
use crate::error::{FemError, Result};
use crate::mesh::BoundaryTag;
use crate::space::Space;

/// What a boundary part does in a given problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Traction-free.
    Natural,
    /// Prescribed displacement.
    Fixed,
    /// Rigid motion shared by every node in the group.
    Rigid(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum DofKind {
    Free(usize),
    Fixed,
    Rigid { group: usize, comp: usize },
}

/// Maps each global dof to unknowns or prescribed data.
#[derive(Debug, Clone)]
pub struct Constraint {
    kinds: Vec<DofKind>,
    n_free: usize,
    n_groups: usize,
    basis: Vec<RigidMotion>,
}

impl Constraint {
    pub fn new(space: &Space, role: impl Fn(BoundaryTag) -> Role) -> Result<Self> {
        let mut kinds = Vec::with_capacity(space.n_dofs());
        let mut n_free = 0;
        let mut n_groups = 0;
        for node in 0..space.n_points() {
            let mut node_role = Role::Natural;
            for tag in BoundaryTag::ALL {
                if !space.has_tag(node, tag) {
                    continue;
                }
                node_role = match (node_role, role(tag)) {
                    (Role::Rigid(a), Role::Rigid(b)) if a != b => {
                        return Err(FemError::Mismatch(format!("node {node} belongs to rigid groups {a} and {b}")));
                    }
                    (Role::Rigid(a), _) | (_, Role::Rigid(a)) => Role::Rigid(a),
                    (Role::Fixed, _) | (_, Role::Fixed) => Role::Fixed,
                    _ => Role::Natural,
                };
            }
            for comp in 0..2 {
                kinds.push(match node_role {
                    Role::Natural => {
                        n_free += 1;
                        DofKind::Free(n_free - 1)
                    }
                    Role::Fixed => DofKind::Fixed,
                    Role::Rigid(group) => {
                        n_groups = n_groups.max(group + 1);
                        DofKind::Rigid { group, comp }
                    }
                });
            }
        }
        Ok(Self { kinds, n_free, n_groups, basis: rigid_basis(2)? })
    }

    pub fn n_unknowns(&self) -> usize {
        self.n_free + 3 * self.n_groups
    }

    pub fn n_groups(&self) -> usize {
        self.n_groups
    }

    pub fn is_fixed(&self, dof: usize) -> bool {
        self.kinds[dof] == DofKind::Fixed
    }

    /// Unknowns (with coefficients) that make up `dof`; empty when fixed.
    fn expand(&self, space: &Space, dof: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        match self.kinds[dof] {
            DofKind::Free(i) => out.push((i, 1.0)),
            DofKind::Fixed => {}
            DofKind::Rigid { group, comp } => {
                let p = space.points[dof / 2];
                for (a, psi) in self.basis.iter().enumerate() {
                    let c = psi.eval(&p)[comp];
                    if c != 0.0 {
                        out.push((self.n_free + 3 * group + a, c));
                    }
                }
            }
        }
    }
}

/// Solution fields (full nodal vectors) and rigid coefficients per right-hand side.
#[derive(Debug, Clone)]
pub struct Solved {
    pub fields: Vec<Vec<f64>>,
    /// `masters[k][group][alpha - 1]`.
    pub masters: Vec<Vec<[f64; 3]>>,
    /// Largest relative residual over right-hand sides.
    pub residual: f64,
    pub n_unknowns: usize,
}

/// Compressed sparse rows of the condensed matrix, for residuals.
struct Csr {
    ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl Csr {
    fn from_sorted(n: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut ptr = vec![0; n + 1];
        for &(r, _, _) in entries {
            ptr[r + 1] += 1;
        }
        for i in 0..n {
            ptr[i + 1] += ptr[i];
        }
        Self { ptr, col: entries.iter().map(|e| e.1).collect(), val: entries.iter().map(|e| e.2).collect() }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.ptr.len() - 1)
            .map(|r| (self.ptr[r]..self.ptr[r + 1]).map(|k| self.val[k] * x[self.col[k]]).sum())
            .collect()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves the condensed problem for each set of prescribed values in `data`
/// (full-length nodal vectors; only fixed dofs are read).
pub fn solve(st: &Stiffness, cons: &Constraint, data: &[Vec<f64>]) -> Result<Solved> {
    let space = &st.space;
    let ndof = space.n_dofs();
    if cons.kinds.len() != ndof {
        return Err(FemError::Mismatch("constraint built for another space".into()));
    }
    if let Some(d) = data.iter().find(|d| d.len() != ndof) {
        return Err(FemError::Mismatch(format!("data of length {}, expected {ndof}", d.len())));
    }
    let n = cons.n_unknowns();
    let nloc = st.local_size();
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut rhs = Mat::<f64>::zeros(n, data.len());
    let mut exp: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nloc];
    let mut dofs = vec![0usize; nloc];
    for e in 0..space.n_elements() {
        for k in 0..nloc {
            dofs[k] = st.global_dof(e, k);
            cons.expand(space, dofs[k], &mut exp[k]);
        }
        let ke = st.element_matrix(e);
        for i in 0..nloc {
            for j in 0..nloc {
                let kij = ke[i * nloc + j];
                if kij == 0.0 {
                    continue;
                }
                for &(p, cp) in &exp[i] {
                    if cons.is_fixed(dofs[j]) {
                        for (col, d) in data.iter().enumerate() {
                            let g = d[dofs[j]];
                            if g != 0.0 {
                                rhs[(p, col)] -= cp * kij * g;
                            }
                        }
                    } else {
                        for &(q, cq) in &exp[j] {
                            entries.push((p, q, cp * cq * kij));
                        }
                    }
                }
            }
        }
    }
    entries.sort_unstable_by_key(|e| (e.0, e.1));
    entries.dedup_by(|b, a| {
        if a.0 == b.0 && a.1 == b.1 {
            a.2 += b.2;
            true
        } else {
            false
        }
    });
    let csr = Csr::from_sorted(n, &entries);
    let triplets: Vec<Triplet<usize, usize, f64>> = entries.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| FemError::Solver(format!("matrix assembly: {e:?}")))?;
    let llt = mat.sp_cholesky(Side::Lower).map_err(|e| FemError::Solver(format!("factorization: {e:?}")))?;
    let mut x = llt.solve(&rhs);
    // one step of iterative refinement
    let mut residual: f64 = 0.0;
    for refine in 0..2 {
        let mut r = Mat::<f64>::zeros(n, data.len());
        for col in 0..data.len() {
            let xc: Vec<f64> = (0..n).map(|i| x[(i, col)]).collect();
            let kx = csr.apply(&xc);
            let b: Vec<f64> = (0..n).map(|i| rhs[(i, col)]).collect();
            let res: Vec<f64> = b.iter().zip(&kx).map(|(b, k)| b - k).collect();
            for i in 0..n {
                r[(i, col)] = res[i];
            }
            let scale = norm(&b);
            if refine == 1 {
                residual = residual.max(if scale > 0.0 { norm(&res) / scale } else { norm(&res) });
            }
        }
        if refine == 0 {
            let dx = llt.solve(&r);
            x += dx;
        }
    }
    if !residual.is_finite() {
        return Err(FemError::Solver("non-finite solution".into()));
    }
    let mut fields = Vec::with_capacity(data.len());
    let mut masters = Vec::with_capacity(data.len());
    let mut buf = Vec::new();
    for (col, d) in data.iter().enumerate() {
        let mut u = vec![0.0; ndof];
        for (dof, val) in u.iter_mut().enumerate() {
            if cons.is_fixed(dof) {
                *val = d[dof];
            } else {
                cons.expand(space, dof, &mut buf);
                *val = buf.iter().map(|&(p, c)| c * x[(p, col)]).sum();
            }
        }
        fields.push(u);
        masters.push(
            (0..cons.n_groups)
                .map(|g| {
                    let base = cons.n_free + 3 * g;
                    [x[(base, col)], x[(base + 1, col)], x[(base + 2, col)]]
                })
                .collect(),
        );
    }
    Ok(Solved { fields, masters, residual, n_unknowns: n })
}
