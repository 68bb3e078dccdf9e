//! Local bases, DOF functionals, interpolation and global numbering.
//!
//! | space | location | DOFs | meaning |
//! |-------|----------|------|---------|
//! | stress | face | 6 | face-averaged moments of `sigma n_f` against the traction basis |
//! | displacement | cell | 6 | coefficients in the rigid-body basis |
//! | velocity | face | 1 | mean normal flux `w . n_f` |
//! | pressure | cell | 1 | cell mean |

use std::sync::Arc;

use crate::{Mat3, Vec3};

mod dofmap;
mod interpolate;
mod rigid;
mod traction;

pub use dofmap::{
    build_dof_map, BcError, BcSpec, BoundaryCondition, BoundaryFace, DofMap, FlowBc, MechanicalBc,
};
pub use interpolate::{
    interpolate_displacement, interpolate_pressure, interpolate_stress, interpolate_velocity,
    INTERPOLATION_DEGREE,
};
pub use rigid::{rm_basis, rm_gram, RigidBodyBasis};
pub use traction::{face_traction_basis, FaceTractionBasis};

/// Space-time scalar data `f(x, t)`.
pub type ScalarField = Arc<dyn Fn(&Vec3, f64) -> f64 + Send + Sync>;
/// Space-time vector data.
pub type VectorField = Arc<dyn Fn(&Vec3, f64) -> Vec3 + Send + Sync>;
/// Space-time tensor data.
pub type TensorField = Arc<dyn Fn(&Vec3, f64) -> Mat3 + Send + Sync>;

pub fn scalar_field<F>(f: F) -> ScalarField
where
    F: Fn(&Vec3, f64) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}

pub fn vector_field<F>(f: F) -> VectorField
where
    F: Fn(&Vec3, f64) -> Vec3 + Send + Sync + 'static,
{
    Arc::new(f)
}

pub fn zero_scalar() -> ScalarField {
    scalar_field(|_, _| 0.0)
}

pub fn zero_vector() -> VectorField {
    vector_field(|_, _| Vec3::zeros())
}
