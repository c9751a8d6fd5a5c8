//! Elastic model for two nearly touching rigid inclusions: Lamé parameters and
//! rigid motions, gap geometry, explicit auxiliary fields and the leading-order
//! asymptotic formulas they feed.

pub mod anisotropy;
pub mod asymptotics;
pub mod auxiliary;
pub mod error;
pub mod geometry;
pub mod model;
pub mod quad;

pub use anisotropy::{AnisotropyIntegrals, anisotropy};
pub use asymptotics::{
    BlowUpFactorVector, CapacityAsymptote, EffectiveModuli, Growth, RateFunctions, a11_leading, blowup_matrix,
    c_diff_leading, effective_moduli, grad_u_asymptotic, rate, theorem_coefficient,
};
pub use auxiliary::{ScalarKeel, VectorAuxField, cancellation_terms, corrector_energy};
pub use error::{CoreError, Result};
pub use geometry::{Chart, InclusionPairGeometry, Outer, Superellipse, pair_kappa};
pub use model::{GradientMatrix, LameParams, RigidMotion, energy_density, rigid_basis, rigid_count, traction_form};
pub use quad::{q_closed_form, q_integral};
