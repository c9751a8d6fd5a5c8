//! Finite element oracle for the plane-strain Lamé system around two nearly
//! touching rigid inclusions.

pub mod assembly;
pub mod error;
pub mod io;
pub mod mesh;
pub mod mesher;
pub mod oracle;
pub mod probe;
pub mod solve;
pub mod space;

pub use error::{FemError, Result};
pub use mesh::{BoundaryEdge, BoundaryTag, Mesh, Region};
pub use assembly::Stiffness;
pub use io::{FunctionalRecord, SolutionRow};
pub use mesher::{MeshOptions, build_mesh, touching_geometry};
pub use solve::{Constraint, Role, Solved, solve};
pub use space::{Order, Space};
pub use oracle::{
    BoundaryData, CellSolution, Oracle, OracleSolution, VFamily, b_tilde, b1_from_constants, b1_from_ub, b1_star, capacity,
    cell_moduli, constants_from_system, min_eigenvalue, pair_index, reconstruct, rigid_data, solve_cell, solve_full, solve_limit,
    solve_v_family, u_b,
};
pub use probe::Probe;
