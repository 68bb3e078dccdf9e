use rayon::prelude::*;

use super::ProblemSpec;
use crate::linalg::{SparseMatrix, Triplet};
use crate::local::{
    body_force_load, boundary_displacement_load, boundary_pressure_load, cell_mean_load,
    LocalBlocks, SYSTEM_DEGREE,
};
use crate::spaces::{DofMap, FaceTractionBasis, FlowBc, MechanicalBc};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssemblyOptions {
    /// Quadrature degree for loads and boundary data.
    pub load_degree: usize,
    /// Negate the displacement rows and scale the velocity rows by `-dt`,
    /// which makes the step matrix symmetric.
    pub symmetrize: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            load_degree: SYSTEM_DEGREE,
            symmetrize: false,
        }
    }
}

/// Global blocks, each indexed within its own family.
#[derive(Clone, Debug)]
pub struct BlockSystem {
    /// Stress-stress, `6 N_f x 6 N_f`.
    pub a: SparseMatrix,
    /// Displacement-stress, `6 N_c x 6 N_f`.
    pub e: SparseMatrix,
    /// Velocity-velocity, `N_f x N_f`.
    pub c: SparseMatrix,
    /// Pressure-velocity, `N_c x N_f`.
    pub b: SparseMatrix,
    /// Pressure-stress coupling, `N_c x 6 N_f`.
    pub a_i: SparseMatrix,
    /// Diagonal of `M_p`.
    pub m_p: Vec<f64>,
    /// Diagonal of `A_II`.
    pub a_ii: Vec<f64>,
}

/// Mesh, numbering, face bases and local blocks of a problem.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub dofs: DofMap,
    pub bases: Vec<FaceTractionBasis>,
    pub blocks: Vec<LocalBlocks>,
    pub options: AssemblyOptions,
}

/// Right-hand-side pieces at one time, indexed within each family.
#[derive(Clone, Debug, PartialEq)]
pub struct Loads {
    /// `<g_u, tau n>` over stress DOFs.
    pub g_u: Vec<f64>,
    /// `(b, v)` over displacement DOFs.
    pub f: Vec<f64>,
    /// `-<g_p, z . n>` over velocity DOFs.
    pub g_p: Vec<f64>,
    /// `(psi, q)` over pressure DOFs.
    pub psi: Vec<f64>,
}

impl Discretization {
    pub fn new(spec: &ProblemSpec, options: AssemblyOptions) -> Result<Self, Error> {
        spec.validate()?;
        let mesh = &spec.mesh;
        let dofs = DofMap::new(mesh, &spec.bc)?;
        let bases: Vec<FaceTractionBasis> = (0..mesh.num_faces())
            .into_par_iter()
            .map(|f| FaceTractionBasis::new(mesh, f))
            .collect();
        let blocks: Vec<LocalBlocks> = (0..mesh.num_cells())
            .into_par_iter()
            .map(|c| LocalBlocks::compute(mesh, c, &spec.materials[c], &bases))
            .collect();
        Ok(Self {
            dofs,
            bases,
            blocks,
            options,
        })
    }

    /// Scatters the local blocks. The scatter is serial and in cell order,
    /// so the result does not depend on the thread count.
    pub fn block_system(&self) -> BlockSystem {
        let nf = self.dofs.num_faces();
        let nc = self.dofs.num_cells();
        let mut ta: Vec<Triplet> = Vec::new();
        let mut te: Vec<Triplet> = Vec::new();
        let mut tc: Vec<Triplet> = Vec::new();
        let mut tb: Vec<Triplet> = Vec::new();
        let mut tai: Vec<Triplet> = Vec::new();
        let mut m_p = vec![0.0; nc];
        let mut a_ii = vec![0.0; nc];
        for (cell, lb) in self.blocks.iter().enumerate() {
            let sig: Vec<usize> = lb
                .faces
                .iter()
                .flat_map(|of| 6 * of.face..6 * of.face + 6)
                .collect();
            let vel: Vec<usize> = lb.faces.iter().map(|of| of.face).collect();
            for (i, &gi) in sig.iter().enumerate() {
                for (j, &gj) in sig.iter().enumerate() {
                    ta.push((gi, gj, lb.a[(i, j)]));
                }
                for k in 0..6 {
                    te.push((6 * cell + k, gi, lb.e[(k, i)]));
                }
                tai.push((cell, gi, lb.a_i[i]));
            }
            for (i, &gi) in vel.iter().enumerate() {
                for (j, &gj) in vel.iter().enumerate() {
                    tc.push((gi, gj, lb.c[(i, j)]));
                }
                tb.push((cell, gi, lb.b[i]));
            }
            m_p[cell] = lb.m_p;
            a_ii[cell] = lb.a_ii;
        }
        let build = |r, c, t: &[Triplet]| {
            SparseMatrix::from_triplets(r, c, t).expect("local-to-global indices are in range")
        };
        BlockSystem {
            a: build(6 * nf, 6 * nf, &ta),
            e: build(6 * nc, 6 * nf, &te),
            c: build(nf, nf, &tc),
            b: build(nc, nf, &tb),
            a_i: build(nc, 6 * nf, &tai),
            m_p,
            a_ii,
        }
    }

    /// Loads at time `t`.
    pub fn loads(&self, spec: &ProblemSpec, t: f64) -> Loads {
        let mesh = &spec.mesh;
        let deg = self.options.load_degree;
        let nf = self.dofs.num_faces();
        let nc = self.dofs.num_cells();
        let per_cell: Vec<(crate::Vec6, f64)> = (0..nc)
            .into_par_iter()
            .map(|c| {
                let f = body_force_load(mesh, c, deg, |x| (spec.body_force)(x, t));
                let psi = cell_mean_load(mesh, c, deg, |x| (spec.source)(x, t));
                (f, psi)
            })
            .collect();
        let mut loads = Loads {
            g_u: vec![0.0; 6 * nf],
            f: vec![0.0; 6 * nc],
            g_p: vec![0.0; nf],
            psi: vec![0.0; nc],
        };
        for (c, (f, psi)) in per_cell.iter().enumerate() {
            loads.f[6 * c..6 * c + 6].copy_from_slice(f.as_slice());
            loads.psi[c] = *psi;
        }
        for bf in self.dofs.displacement_faces() {
            let cond = self.dofs.bc().get(&bf.tag).expect("tag covered");
            let MechanicalBc::Displacement(g) = &cond.mechanical else {
                unreachable!("displacement face without displacement data")
            };
            let row = boundary_displacement_load(
                mesh,
                bf.face,
                bf.sign,
                &self.bases[bf.face],
                deg,
                |x| g(x, t),
            );
            loads.g_u[6 * bf.face..6 * bf.face + 6].copy_from_slice(row.as_slice());
        }
        for bf in self.dofs.pressure_faces() {
            let cond = self.dofs.bc().get(&bf.tag).expect("tag covered");
            let FlowBc::Pressure(g) = &cond.flow else {
                unreachable!("pressure face without pressure data")
            };
            loads.g_p[bf.face] = boundary_pressure_load(mesh, bf.face, bf.sign, deg, |x| g(x, t));
        }
        loads
    }

    /// `(eta_0, q)` over pressure DOFs.
    pub fn initial_content_load(&self, spec: &ProblemSpec) -> Vec<f64> {
        let deg = self.options.load_degree;
        let t0 = spec.time.t0;
        (0..self.dofs.num_cells())
            .into_par_iter()
            .map(|c| cell_mean_load(&spec.mesh, c, deg, |x| (spec.initial_content)(x, t0)))
            .collect()
    }
}

impl BlockSystem {
    /// Full step matrix for time step `dt`, in the paper's sign convention
    /// or, with `symmetrize`, the equivalent symmetric form.
    pub fn step_matrix(&self, dofs: &DofMap, dt: f64, symmetrize: bool) -> SparseMatrix {
        let (ou, ow, op) = (dofs.u_offset(), dofs.w_offset(), dofs.p_offset());
        let (su, sw) = if symmetrize { (1.0, -dt) } else { (-1.0, 1.0) };
        let mut t: Vec<Triplet> = Vec::new();
        t.extend(self.a.triplets());
        for (r, c, v) in self.e.triplets() {
            t.push((c, ou + r, v));
            t.push((ou + r, c, su * v));
        }
        for (r, c, v) in self.a_i.triplets() {
            t.push((c, op + r, v));
            t.push((op + r, c, v));
        }
        for (r, c, v) in self.c.triplets() {
            t.push((ow + r, ow + c, sw * v));
        }
        for (r, c, v) in self.b.triplets() {
            t.push((ow + c, op + r, -sw * v));
            t.push((op + r, ow + c, dt * v));
        }
        for (i, (m, a)) in self.m_p.iter().zip(&self.a_ii).enumerate() {
            t.push((op + i, op + i, m + a));
        }
        let n = dofs.num_dofs();
        SparseMatrix::from_triplets(n, n, &t).expect("block offsets are in range")
    }

    /// Row scaling applied by [`step_matrix`](Self::step_matrix) to the
    /// displacement and velocity rows of the right-hand side.
    pub fn row_scales(dt: f64, symmetrize: bool) -> (f64, f64) {
        if symmetrize {
            (-1.0, -dt)
        } else {
            (1.0, 1.0)
        }
    }

    /// Matrix of the initial equilibrium problem over `[sigma | u | p]`
    /// (velocity rows and columns carry an identity to keep the global
    /// numbering). `symmetrize` negates the displacement rows.
    pub fn initial_matrix(&self, dofs: &DofMap, symmetrize: bool) -> SparseMatrix {
        let su = if symmetrize { 1.0 } else { -1.0 };
        let (ou, ow, op) = (dofs.u_offset(), dofs.w_offset(), dofs.p_offset());
        let mut t: Vec<Triplet> = Vec::new();
        t.extend(self.a.triplets());
        for (r, c, v) in self.e.triplets() {
            t.push((c, ou + r, v));
            t.push((ou + r, c, su * v));
        }
        for (r, c, v) in self.a_i.triplets() {
            t.push((c, op + r, v));
            t.push((op + r, c, v));
        }
        for f in 0..dofs.num_faces() {
            t.push((ow + f, ow + f, 1.0));
        }
        for (i, (m, a)) in self.m_p.iter().zip(&self.a_ii).enumerate() {
            t.push((op + i, op + i, m + a));
        }
        let n = dofs.num_dofs();
        SparseMatrix::from_triplets(n, n, &t).expect("block offsets are in range")
    }
}

/// Builds the discretization and the global blocks of `spec`.
pub fn assemble(spec: &ProblemSpec) -> Result<(Discretization, BlockSystem), Error> {
    let disc = Discretization::new(spec, AssemblyOptions::default())?;
    let sys = disc.block_system();
    Ok((disc, sys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_structured_cube, BoxDomain};
    use crate::spaces::interpolate_stress;
    use crate::verify::ManufacturedCase;
    use crate::Mat3;

    fn test1(n: usize) -> ProblemSpec {
        ManufacturedCase::test1()
            .problem(build_structured_cube(n, &BoxDomain::unit()))
            .unwrap()
    }

    fn asym(m: &SparseMatrix) -> f64 {
        m.triplets()
            .map(|(r, c, v)| (v - m.get(c, r)).abs())
            .fold(0.0, f64::max)
            / m.max_abs()
    }

    #[test]
    fn block_shapes_and_symmetry() {
        let spec = test1(2);
        let (disc, sys) = assemble(&spec).unwrap();
        let (nf, nc) = (disc.dofs.num_faces(), disc.dofs.num_cells());
        assert_eq!((sys.a.nrows(), sys.a.ncols()), (6 * nf, 6 * nf));
        assert_eq!((sys.e.nrows(), sys.e.ncols()), (6 * nc, 6 * nf));
        assert_eq!((sys.c.nrows(), sys.b.nrows(), sys.b.ncols()), (nf, nc, nf));
        assert_eq!(sys.a_i.nrows(), nc);
        assert!(asym(&sys.a) < 1e-13);
        assert!(asym(&sys.c) < 1e-13);
    }

    #[test]
    fn constant_stress_has_zero_divergence() {
        let spec = test1(2);
        let (_, sys) = assemble(&spec).unwrap();
        let s = Mat3::new(1.0, 0.5, -0.2, 0.5, 2.0, 0.3, -0.2, 0.3, -1.0);
        let sigma: Vec<f64> = (0..spec.mesh.num_faces())
            .flat_map(|f| interpolate_stress(&spec.mesh, f, |_| s).as_slice().to_vec())
            .collect();
        let div = sys.e.matvec(&sigma);
        assert!(div.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn divergence_columns_cancel_on_interior_faces() {
        let spec = test1(3);
        let (_, sys) = assemble(&spec).unwrap();
        let col = sys.b.matvec_transpose(&vec![1.0; spec.mesh.num_cells()]);
        for f in 0..spec.mesh.num_faces() {
            let area = spec.mesh.face_geometry(f).area;
            if spec.mesh.is_boundary_face(f) {
                assert!((col[f].abs() - area).abs() < 1e-14);
            } else {
                assert!(col[f].abs() < 1e-14);
            }
        }
    }

    #[test]
    fn symmetrized_matrix_is_a_row_scaling() {
        let spec = test1(2);
        let (disc, sys) = assemble(&spec).unwrap();
        let dt = 0.01;
        let plain = sys.step_matrix(&disc.dofs, dt, false);
        let sym = sys.step_matrix(&disc.dofs, dt, true);
        assert!(asym(&sym) == 0.0);
        assert!(asym(&plain) > 1e-3);
        let (su, sw) = BlockSystem::row_scales(dt, true);
        let d = &disc.dofs;
        for (r, c, v) in plain.triplets() {
            let s = if r >= d.p_offset() {
                1.0
            } else if r >= d.w_offset() {
                sw
            } else if r >= d.u_offset() {
                su
            } else {
                1.0
            };
            assert!((sym.get(r, c) - s * v).abs() <= 1e-15 * v.abs().max(1.0));
        }
        let init = sys.initial_matrix(d, true);
        assert!(asym(&init) == 0.0);
    }

    #[test]
    fn loads_vanish_for_zero_data() {
        let mesh = build_structured_cube(2, &BoxDomain::unit());
        let case = ManufacturedCase::test1();
        // phi vanishes on the boundary and at t = 0; its time derivative does not
        let spec = case.problem(mesh).unwrap();
        let disc = Discretization::new(&spec, AssemblyOptions::default()).unwrap();
        let l = disc.loads(&spec, 0.0);
        for v in [&l.g_u, &l.f, &l.g_p] {
            assert!(v.iter().all(|x| x.abs() < 1e-15));
        }
        let l = disc.loads(&spec, 0.2);
        assert!(l.g_u.iter().chain(&l.g_p).all(|x| x.abs() < 1e-15));
        assert!(l.f.iter().any(|x| x.abs() > 1e-6));
    }
}
