//! Lowest-order four-field virtual element solver for Biot's poroelasticity
//! equations on general polyhedral meshes.
//!
//! The unknowns are the (symmetric) stress, the displacement, the Darcy
//! velocity and the pore pressure. Stress and velocity live on faces, the
//! displacement is a rigid body motion per cell and the pressure is a cell
//! constant. Time integration uses backward Euler.
//!
//! Module map:
//!
//! * [`geometry`]: polyhedral meshes, geometric quantities, quadrature,
//!   structured generation, text/VTK I/O and quality diagnostics.
//! * [`spaces`]: local bases, DOF functionals, interpolation and global
//!   numbering with boundary bookkeeping.
//! * [`local`]: element-level projections, stabilizations and matrices.
//! * [`linalg`]: triplet assembly, compressed storage and the direct solver.
//! * [`system`]: global block assembly, the initial solve and time stepping.
//! * [`verify`]: manufactured solutions, error norms, the footing benchmark,
//!   configuration files and CSV/VTK output.
//!
//! A guide with worked examples lives in the `book/` directory of the
//! repository; its code listings are compiled as doctests of this crate.

pub mod geometry;
pub mod linalg;
pub mod local;
pub mod spaces;
pub mod system;
pub mod verify;

mod error;

pub use error::Error;

/// Points and vectors in physical space.
pub type Vec3 = nalgebra::Vector3<f64>;
/// Dense 3x3 matrices (stress tensors, permeability).
pub type Mat3 = nalgebra::Matrix3<f64>;
/// Six-component vectors: RM coefficients, per-face stress DOFs, symmetric
/// tensor coefficients.
pub type Vec6 = nalgebra::SVector<f64, 6>;
/// Dense 6x6 matrices.
pub type Mat6 = nalgebra::SMatrix<f64, 6, 6>;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/meshes.md")]
    mod meshes {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    mod spaces {}
    #[doc = include_str!("../../../book/src/local-forms.md")]
    mod local_forms {}
    #[doc = include_str!("../../../book/src/time-stepping.md")]
    mod time_stepping {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
