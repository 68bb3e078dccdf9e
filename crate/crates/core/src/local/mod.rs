//! Element-level operators: projections, stabilizations and the local
//! matrices of the four-field system.

mod element;
mod material;
mod rhs;
mod tensor;

pub use element::{LocalBlocks, SYSTEM_DEGREE};
pub use material::{MaterialError, MaterialParams};
pub use rhs::{
    body_force_load, boundary_displacement_load, boundary_pressure_load, cell_mean_load,
};
pub use tensor::{sym_basis, sym_from_coeffs, sym_potential, sym_to_coeffs};
