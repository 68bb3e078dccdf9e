use crate::geometry::PolyMesh;
use crate::local::MaterialParams;
use crate::spaces::{zero_scalar, zero_vector, BcSpec, ScalarField, VectorField};
use crate::Error;

/// Uniform time grid `t_n = t0 + n dt`, `n = 0..=steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub tf: f64,
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    /// Fails unless `(tf - t0) / dt` is a positive integer (up to rounding).
    pub fn new(t0: f64, tf: f64, dt: f64) -> Result<Self, Error> {
        if !(dt > 0.0 && dt.is_finite() && t0.is_finite() && tf.is_finite()) {
            return Err(Error::Problem(format!("invalid time step {dt}")));
        }
        let n = (tf - t0) / dt;
        let steps = n.round();
        if steps < 1.0 || (n - steps).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::Problem(format!(
                "(tf - t0) / dt = {n} is not a positive integer"
            )));
        }
        Ok(Self {
            t0,
            tf,
            dt,
            steps: steps as usize,
        })
    }

    pub fn time(&self, n: usize) -> f64 {
        if n == self.steps {
            self.tf
        } else {
            self.t0 + n as f64 * self.dt
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InitialCondition {
    /// Mechanical equilibrium with the initial fluid content, then the
    /// velocity from Darcy's law.
    #[default]
    Equilibrium,
    /// All unknowns zero at `t0`.
    Zero,
}

/// Everything that defines a run.
#[derive(Clone)]
pub struct ProblemSpec {
    pub mesh: PolyMesh,
    /// One entry per cell.
    pub materials: Vec<MaterialParams>,
    pub bc: BcSpec,
    pub body_force: VectorField,
    pub source: ScalarField,
    /// Initial fluid content `eta_0 = s0 p + alpha div u` at `t0`.
    pub initial_content: ScalarField,
    pub time: TimeGrid,
    pub initial: InitialCondition,
}

impl ProblemSpec {
    /// Homogeneous material, zero loads and zero initial content.
    pub fn new(mesh: PolyMesh, material: MaterialParams, bc: BcSpec, time: TimeGrid) -> Self {
        let materials = vec![material; mesh.num_cells()];
        Self {
            mesh,
            materials,
            bc,
            body_force: zero_vector(),
            source: zero_scalar(),
            initial_content: zero_scalar(),
            time,
            initial: InitialCondition::default(),
        }
    }

    pub fn with_body_force(mut self, b: VectorField) -> Self {
        self.body_force = b;
        self
    }

    pub fn with_source(mut self, psi: ScalarField) -> Self {
        self.source = psi;
        self
    }

    pub fn with_initial_content(mut self, eta0: ScalarField) -> Self {
        self.initial_content = eta0;
        self
    }

    pub fn with_initial_condition(mut self, ic: InitialCondition) -> Self {
        self.initial = ic;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.materials.len() != self.mesh.num_cells() {
            return Err(Error::Problem(format!(
                "{} materials for {} cells",
                self.materials.len(),
                self.mesh.num_cells()
            )));
        }
        for m in &self.materials {
            m.validate()?;
        }
        Ok(())
    }
}
