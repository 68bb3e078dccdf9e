use std::sync::OnceLock;

use super::{AssemblyOptions, BlockSystem, Discretization, InitialCondition, ProblemSpec};
use crate::linalg::{
    DirectSolver, Method, SolveError, SolveReport, SparseMatrix, Triplet, DEFAULT_TOLERANCE,
};
use crate::spaces::DofMap;
use crate::Error;

/// Coefficient vectors at one time instant.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub t: f64,
    /// 6 per face.
    pub sigma: Vec<f64>,
    /// 6 per cell.
    pub u: Vec<f64>,
    /// 1 per face.
    pub w: Vec<f64>,
    /// 1 per cell.
    pub p: Vec<f64>,
}

impl State {
    pub fn zeros(dofs: &DofMap, t: f64) -> Self {
        Self {
            t,
            sigma: vec![0.0; 6 * dofs.num_faces()],
            u: vec![0.0; 6 * dofs.num_cells()],
            w: vec![0.0; dofs.num_faces()],
            p: vec![0.0; dofs.num_cells()],
        }
    }

    pub fn from_vector(dofs: &DofMap, x: &[f64], t: f64) -> Self {
        assert_eq!(x.len(), dofs.num_dofs(), "state vector length");
        Self {
            t,
            sigma: x[..dofs.u_offset()].to_vec(),
            u: x[dofs.u_offset()..dofs.w_offset()].to_vec(),
            w: x[dofs.w_offset()..dofs.p_offset()].to_vec(),
            p: x[dofs.p_offset()..].to_vec(),
        }
    }

    pub fn to_vector(&self) -> Vec<f64> {
        [&self.sigma[..], &self.u, &self.w, &self.p].concat()
    }
}

/// Passed to the per-step callback of [`Simulation::run`].
#[derive(Clone, Copy, Debug)]
pub struct StepInfo {
    /// 0 for the initial state.
    pub step: usize,
    pub time: f64,
    pub report: SolveReport,
}

/// A square system with some unknowns fixed, factorized once.
struct Constrained {
    solver: DirectSolver,
    free: Vec<usize>,
    essential: Vec<usize>,
    coupling: SparseMatrix,
}

impl Constrained {
    fn new(full: &SparseMatrix, essential: &[usize]) -> Result<Self, SolveError> {
        let n = full.nrows();
        let mut local = vec![usize::MAX; n];
        let mut is_ess = vec![false; n];
        for (k, &i) in essential.iter().enumerate() {
            is_ess[i] = true;
            local[i] = k;
        }
        let free: Vec<usize> = (0..n).filter(|&i| !is_ess[i]).collect();
        for (k, &i) in free.iter().enumerate() {
            local[i] = k;
        }
        let mut tff: Vec<Triplet> = Vec::new();
        let mut tfe: Vec<Triplet> = Vec::new();
        for &r in &free {
            for (c, v) in full.row(r) {
                if is_ess[c] {
                    tfe.push((local[r], local[c], v));
                } else {
                    tff.push((local[r], local[c], v));
                }
            }
        }
        let nf = free.len();
        let reduced = SparseMatrix::from_triplets(nf, nf, &tff).expect("indices in range");
        let coupling =
            SparseMatrix::from_triplets(nf, essential.len(), &tfe).expect("indices in range");
        Ok(Self {
            solver: DirectSolver::factor(reduced)?,
            free,
            essential: essential.to_vec(),
            coupling,
        })
    }

    fn solve(&self, rhs: &[f64], values: &[f64]) -> Result<(Vec<f64>, SolveReport), SolveError> {
        let corr = self.coupling.matvec(values);
        let b: Vec<f64> = self
            .free
            .iter()
            .zip(&corr)
            .map(|(&i, c)| rhs[i] - c)
            .collect();
        let (y, report) = self.solver.solve(&b, DEFAULT_TOLERANCE)?;
        let mut x = vec![0.0; rhs.len()];
        for (&i, v) in self.free.iter().zip(&y) {
            x[i] = *v;
        }
        for (&i, v) in self.essential.iter().zip(values) {
            x[i] = *v;
        }
        Ok((x, report))
    }
}

/// A problem with its factorized step matrix.
pub struct Simulation<'a> {
    spec: &'a ProblemSpec,
    disc: Discretization,
    blocks: BlockSystem,
    matrix: SparseMatrix,
    system: OnceLock<Constrained>,
}

impl<'a> Simulation<'a> {
    pub fn new(spec: &'a ProblemSpec, options: AssemblyOptions) -> Result<Self, Error> {
        let disc = Discretization::new(spec, options)?;
        let blocks = disc.block_system();
        let matrix = blocks.step_matrix(&disc.dofs, spec.time.dt, options.symmetrize);
        Ok(Self {
            spec,
            disc,
            blocks,
            matrix,
            system: OnceLock::new(),
        })
    }

    /// Step system, factorized on first use.
    fn system(&self) -> Result<&Constrained, Error> {
        if let Some(s) = self.system.get() {
            return Ok(s);
        }
        let s = Constrained::new(&self.matrix, self.disc.dofs.essential_dofs())?;
        Ok(self.system.get_or_init(|| s))
    }

    pub fn spec(&self) -> &ProblemSpec {
        self.spec
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn blocks(&self) -> &BlockSystem {
        &self.blocks
    }

    /// Full step matrix before constraint elimination.
    pub fn step_matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// State at `t0` according to the problem's initial condition.
    pub fn initial_state(&self) -> Result<(State, SolveReport), Error> {
        let dofs = &self.disc.dofs;
        let t0 = self.spec.time.t0;
        let zero_report = SolveReport {
            relative_residual: 0.0,
            refinement_steps: 0,
            dimension: 0,
            nnz: 0,
            method: Method::Lu,
            success: true,
        };
        if self.spec.initial == InitialCondition::Zero {
            return Ok((State::zeros(dofs, t0), zero_report));
        }

        // equilibrium for (sigma, u, p)
        let symmetrize = self.disc.options.symmetrize;
        let (su, _) = BlockSystem::row_scales(self.spec.time.dt, symmetrize);
        let loads = self.disc.loads(self.spec, t0);
        let mut rhs = vec![0.0; dofs.num_dofs()];
        rhs[..dofs.u_offset()].copy_from_slice(&loads.g_u);
        for (r, v) in rhs[dofs.u_offset()..dofs.w_offset()].iter_mut().zip(&loads.f) {
            *r = su * v;
        }
        rhs[dofs.p_offset()..].copy_from_slice(&self.disc.initial_content_load(self.spec));
        let matrix = self.blocks.initial_matrix(dofs, symmetrize);
        let system = Constrained::new(&matrix, dofs.essential_dofs())?;
        let values = dofs.essential_values(&self.spec.mesh, t0);
        let (x, report) = system.solve(&rhs, &values)?;
        let mut state = State::from_vector(dofs, &x, t0);

        // Darcy's law at t0: C w = G_p + B^T p
        let ow = dofs.w_offset();
        let flux: Vec<(usize, f64)> = dofs
            .essential_dofs()
            .iter()
            .zip(&values)
            .filter(|(&i, _)| i >= ow && i < dofs.p_offset())
            .map(|(&i, &v)| (i - ow, v))
            .collect();
        let bt_p = self.blocks.b.matvec_transpose(&state.p);
        let rhs_w: Vec<f64> = loads.g_p.iter().zip(&bt_p).map(|(g, b)| g + b).collect();
        let idx: Vec<usize> = flux.iter().map(|e| e.0).collect();
        let val: Vec<f64> = flux.iter().map(|e| e.1).collect();
        let flow = Constrained::new(&self.blocks.c, &idx)?;
        let (w, flow_report) = flow.solve(&rhs_w, &val)?;
        state.w = w;
        let report = if flow_report.relative_residual > report.relative_residual {
            flow_report
        } else {
            report
        };
        Ok((state, report))
    }

    /// Right-hand side of the step to `t_next` from `state`.
    pub fn step_rhs(&self, state: &State, t_next: f64) -> Vec<f64> {
        let dofs = &self.disc.dofs;
        let dt = self.spec.time.dt;
        let (su, sw) = BlockSystem::row_scales(dt, self.disc.options.symmetrize);
        let loads = self.disc.loads(self.spec, t_next);
        let mut rhs = vec![0.0; dofs.num_dofs()];
        rhs[..dofs.u_offset()].copy_from_slice(&loads.g_u);
        for (r, v) in rhs[dofs.u_offset()..dofs.w_offset()].iter_mut().zip(&loads.f) {
            *r = su * v;
        }
        for (r, v) in rhs[dofs.w_offset()..dofs.p_offset()].iter_mut().zip(&loads.g_p) {
            *r = sw * v;
        }
        let ai_sigma = self.blocks.a_i.matvec(&state.sigma);
        for (c, r) in rhs[dofs.p_offset()..].iter_mut().enumerate() {
            let mass = self.blocks.m_p[c] + self.blocks.a_ii[c];
            *r = mass * state.p[c] + dt * loads.psi[c] + ai_sigma[c];
        }
        rhs
    }

    /// One backward Euler step to `t_next`.
    pub fn step(&self, state: &State, t_next: f64) -> Result<(State, SolveReport), Error> {
        let dofs = &self.disc.dofs;
        let rhs = self.step_rhs(state, t_next);
        let values = dofs.essential_values(&self.spec.mesh, t_next);
        let (x, report) = self.system()?.solve(&rhs, &values)?;
        Ok((State::from_vector(dofs, &x, t_next), report))
    }

    /// Initial state plus all steps; `callback` sees every state, starting
    /// with the initial one.
    pub fn run<F>(&self, mut callback: F) -> Result<State, Error>
    where
        F: FnMut(&State, &StepInfo) -> Result<(), Error>,
    {
        let grid = self.spec.time;
        let (mut state, report) = self.initial_state()?;
        callback(
            &state,
            &StepInfo {
                step: 0,
                time: grid.t0,
                report,
            },
        )?;
        for n in 1..=grid.steps {
            let t = grid.time(n);
            let (next, report) = self.step(&state, t)?;
            state = next;
            log::debug!("step {n}: t = {t}, residual {:e}", report.relative_residual);
            callback(
                &state,
                &StepInfo {
                    step: n,
                    time: t,
                    report,
                },
            )?;
        }
        Ok(state)
    }
}

/// Initial state of `spec`.
pub fn solve_initial(spec: &ProblemSpec) -> Result<State, Error> {
    Ok(Simulation::new(spec, AssemblyOptions::default())?.initial_state()?.0)
}

/// Runs `spec` to its final time.
pub fn run<F>(spec: &ProblemSpec, callback: F) -> Result<State, Error>
where
    F: FnMut(&State, &StepInfo) -> Result<(), Error>,
{
    Simulation::new(spec, AssemblyOptions::default())?.run(callback)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_structured_cube, BoxDomain};
    use crate::local::MaterialParams;
    use crate::spaces::{zero_scalar, zero_vector, BcSpec, FlowBc, MechanicalBc};
    use crate::system::TimeGrid;
    use crate::verify::ManufacturedCase;
    use crate::Mat3;

    #[test]
    fn zero_data_stays_at_rest() {
        let mesh = build_structured_cube(2, &BoxDomain::unit());
        let bc = BcSpec::uniform(
            mesh.tags(),
            MechanicalBc::Displacement(zero_vector()),
            FlowBc::Pressure(zero_scalar()),
        )
        .unwrap();
        let m = MaterialParams::new(1.0, 1.0, 1.0, 0.1, Mat3::identity()).unwrap();
        let spec = ProblemSpec::new(mesh, m, bc, TimeGrid::new(0.0, 0.2, 0.1).unwrap());
        let last = run(&spec, |_, _| Ok(())).unwrap();
        assert!(last.to_vector().iter().all(|v| *v == 0.0));
        assert_eq!(last.t, 0.2);
    }

    #[test]
    fn state_vector_round_trip() {
        let spec = ManufacturedCase::test1()
            .problem(build_structured_cube(1, &BoxDomain::unit()))
            .unwrap();
        let sim = Simulation::new(&spec, AssemblyOptions::default()).unwrap();
        let dofs = &sim.discretization().dofs;
        let x: Vec<f64> = (0..dofs.num_dofs()).map(|i| i as f64).collect();
        let s = State::from_vector(dofs, &x, 0.5);
        assert_eq!(s.to_vector(), x);
        assert_eq!(s.p[0], dofs.p_offset() as f64);
    }

    #[test]
    fn test1_steps_solve_to_tolerance() {
        let case = ManufacturedCase::test1();
        let spec = case.problem(build_structured_cube(2, &BoxDomain::unit())).unwrap();
        let sim = Simulation::new(&spec, AssemblyOptions::default()).unwrap();
        let (s0, r0) = sim.initial_state().unwrap();
        // the exact solution vanishes at t = 0
        assert!(s0.to_vector().iter().all(|v| v.abs() < 1e-12));
        assert!(r0.success);
        let mut steps = 0;
        let last = sim
            .run(|_, info| {
                assert!(info.report.relative_residual <= DEFAULT_TOLERANCE);
                steps += 1;
                Ok(())
            })
            .unwrap();
        assert_eq!(steps, 21);
        assert!(last.p.iter().all(|p| *p > 0.0));
    }

    #[test]
    fn symmetrized_run_gives_the_same_states() {
        let case = ManufacturedCase::test2();
        let mut spec = case.problem(build_structured_cube(2, &BoxDomain::unit())).unwrap();
        spec.time = TimeGrid::new(0.0, 0.02, 0.01).unwrap();
        let a = Simulation::new(&spec, AssemblyOptions::default())
            .unwrap()
            .run(|_, _| Ok(()))
            .unwrap();
        let opts = AssemblyOptions {
            symmetrize: true,
            ..Default::default()
        };
        let b = Simulation::new(&spec, opts).unwrap().run(|_, _| Ok(())).unwrap();
        let (xa, xb) = (a.to_vector(), b.to_vector());
        let scale = xa.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = xa.iter().zip(&xb).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
        assert!(diff <= 1e-9 * scale, "{diff} vs {scale}");
    }

    #[test]
    fn callback_errors_stop_the_run() {
        let spec = ManufacturedCase::test1()
            .problem(build_structured_cube(1, &BoxDomain::unit()))
            .unwrap();
        let sim = Simulation::new(&spec, AssemblyOptions::default()).unwrap();
        let mut seen = 0;
        let r = sim.run(|_, info| {
            seen += 1;
            if info.step == 2 {
                Err(Error::Problem("stop".into()))
            } else {
                Ok(())
            }
        });
        assert!(r.is_err());
        assert_eq!(seen, 3);
    }
}
