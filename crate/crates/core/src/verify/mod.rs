//! Manufactured solutions, error norms and rates, the footing benchmark,
//! configuration files and CSV/VTK output.

mod config;
mod convergence;
mod export;
mod expr;
mod footing;
mod manufactured;
mod norms;

pub use config::{
    BcSection, ConfigError, Data, DataSection, InitialKind, MaterialSection, MeshSection,
    OutputSection, Permeability, RunConfig, SubTag, TimeSection,
};

pub use convergence::{convergence_study, run_case, CaseRun};
pub use manufactured::{Factor, ManufacturedCase, Separable, Term, TimeFactor};
pub use export::{cell_output, CellOutput, vertex_displacement, write_errors_csv, write_state_vtk};
pub use expr::{Expr, ExprError, Func};
pub use footing::{footing_config, footing_spec, FOOTING_CONFIG};
pub use norms::{compute_errors, rate, ErrorReport, ErrorRow, ERROR_DEGREE};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("exact {field} has zero norm; relative error undefined")]
    ZeroNorm { field: String },
    #[error("unknown manufactured case '{0}' (expected test1 or test2)")]
    UnknownCase(String),
}
