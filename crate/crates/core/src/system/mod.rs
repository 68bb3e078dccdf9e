//! Global assembly, the initial solve and backward Euler time stepping.
//!
//! Unknowns are ordered `[sigma | u | w | p]` and the step matrix is
//!
//! ```text
//! [  A    E^T   0     A_I^T       ] [sigma]   [ G_u     ]
//! [ -E    0     0     0           ] [u    ] = [ F       ]
//! [  0    0     C    -B^T         ] [w    ]   [ G_p     ]
//! [  A_I  0     dt B  M_p + A_II  ] [p    ]   [ h       ]
//! ```
//!
//! with `h = (M_p + A_II) p^n + dt Psi + A_I sigma^n`.

mod assemble;
mod problem;
mod stepper;

pub use assemble::{assemble, AssemblyOptions, BlockSystem, Discretization, Loads};
pub use problem::{InitialCondition, ProblemSpec, TimeGrid};
pub use stepper::{run, solve_initial, Simulation, State, StepInfo};
