use rayon::prelude::*;

use super::{compute_errors, ErrorReport, ErrorRow, ManufacturedCase};
use crate::geometry::PolyMesh;
use crate::system::{AssemblyOptions, Simulation, State};
use crate::Error;

/// Outcome of one manufactured run.
#[derive(Clone, Debug)]
pub struct CaseRun {
    pub errors: ErrorRow,
    pub state: State,
    /// Largest relative residual over all solves.
    pub max_residual: f64,
}

/// Solves `case` on `mesh` up to its final time and measures the errors.
pub fn run_case(
    case: &ManufacturedCase,
    mesh: PolyMesh,
    options: AssemblyOptions,
) -> Result<CaseRun, Error> {
    let spec = case.problem(mesh)?;
    let sim = Simulation::new(&spec, options)?;
    let mut max_residual: f64 = 0.0;
    let state = sim.run(|_, info| {
        max_residual = max_residual.max(info.report.relative_residual);
        Ok(())
    })?;
    let errors = compute_errors(&spec.mesh, sim.discretization(), &state, case)?;
    log::info!(
        "{}: h = {:.4}, E_u = {:.3e}, E_sigma = {:.3e}, E_p = {:.3e}, E_w = {:.3e}",
        case.name,
        errors.h,
        errors.e_u,
        errors.e_sigma,
        errors.e_p,
        errors.e_w
    );
    Ok(CaseRun {
        errors,
        state,
        max_residual,
    })
}

/// Runs `case` on every mesh (in parallel) and tabulates the errors.
pub fn convergence_study(
    case: &ManufacturedCase,
    meshes: Vec<PolyMesh>,
    options: AssemblyOptions,
) -> Result<ErrorReport, Error> {
    if meshes.len() < 2 {
        return Err(Error::Problem(
            "a convergence study needs at least two meshes".into(),
        ));
    }
    let rows: Result<Vec<ErrorRow>, Error> = meshes
        .into_par_iter()
        .map(|m| run_case(case, m, options).map(|r| r.errors))
        .collect();
    Ok(ErrorReport { rows: rows? })
}
