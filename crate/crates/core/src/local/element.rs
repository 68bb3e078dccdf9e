use nalgebra::{DMatrix, DVector, SMatrix};

use super::{sym_basis, sym_potential, MaterialParams};
use crate::geometry::{cell_quadrature, face_quadrature, OrientedFace, PolyMesh};
use crate::spaces::{rm_basis, rm_gram, FaceTractionBasis};
use crate::{Mat6, Vec3};

/// Quadrature degree for system matrices; every integrand is a product of
/// two linear fields.
pub const SYSTEM_DEGREE: usize = 2;

/// All local matrices of one cell. Stress DOFs are ordered face by face
/// (6 per face, in the cell's face order), velocity DOFs likewise (1 per
/// face).
#[derive(Clone, Debug)]
pub struct LocalBlocks {
    pub cell: usize,
    pub faces: Vec<OrientedFace>,
    pub volume: f64,
    pub diameter: f64,
    /// Rigid-body Gram matrix `G_kl = int_E r_k . r_l`.
    pub rm_gram: Mat6,
    /// Stress DOFs -> rigid-body coefficients of the divergence.
    pub div_rm: DMatrix<f64>,
    /// Stress DOFs -> coefficients of the constant stress projection in the
    /// orthonormal symmetric basis.
    pub pi_s: DMatrix<f64>,
    /// Stress form: consistency plus stabilization.
    pub a: DMatrix<f64>,
    /// `(v, div tau)_E = v^T E tau` with `v` in rigid-body coefficients.
    pub e: DMatrix<f64>,
    /// Velocity DOFs -> constant projection.
    pub pi_w: DMatrix<f64>,
    /// Velocity DOFs -> divergence value.
    pub div_w: DVector<f64>,
    /// Velocity form: consistency plus stabilization.
    pub c: DMatrix<f64>,
    /// `(q, div z)_E = q B z` for a constant `q`.
    pub b: DVector<f64>,
    /// `(alpha A I q, tau)_E = q A_I tau`.
    pub a_i: DVector<f64>,
    /// `s0 |E|`.
    pub m_p: f64,
    /// `alpha^2 kappa^-1 |E|`.
    pub a_ii: f64,
}

impl LocalBlocks {
    /// `bases` holds the traction basis of every mesh face.
    pub fn compute(
        mesh: &PolyMesh,
        cell: usize,
        material: &MaterialParams,
        bases: &[FaceTractionBasis],
    ) -> Self {
        let cg = mesh.cell_geometry(cell);
        let faces = mesh.cell(cell).to_vec();
        let nf = faces.len();
        let vol = cg.volume;
        let xe = cg.barycenter;
        let h = cg.diameter;
        let rm = rm_basis(cg);
        let gram = rm_gram(mesh, cell);
        let gram_inv = gram
            .cholesky()
            .expect("rigid-body Gram matrix of a valid cell is SPD")
            .inverse();

        // H_mk = int_E p_m . r_k
        let mut hmat = Mat6::zeros();
        for (x, w) in cell_quadrature(mesh, cell, SYSTEM_DEGREE).iter() {
            let r = rm.eval_all(x);
            for m in 0..6 {
                let p = sym_potential(m, &xe, x);
                for k in 0..6 {
                    hmat[(m, k)] += w * p.dot(&r[k]);
                }
            }
        }

        let sym = sym_basis();
        let mut div_rm = DMatrix::zeros(6, 6 * nf);
        let mut boundary_moment = DMatrix::zeros(6, 6 * nf);
        let mut pi_w = DMatrix::zeros(3, nf);
        let mut div_w = DVector::zeros(nf);
        for (l, of) in faces.iter().enumerate() {
            let s = of.signf();
            let basis = &bases[of.face];
            let fg = mesh.face_geometry(of.face);
            // P_kj = int_f r_k . phi_j, L_mj = int_f p_m . phi_j
            let mut pk = Mat6::zeros();
            let mut lm = Mat6::zeros();
            for (x, w) in face_quadrature(mesh, of.face, SYSTEM_DEGREE).iter() {
                let phi = basis.eval_all(x);
                let r = rm.eval_all(x);
                for j in 0..6 {
                    for k in 0..6 {
                        pk[(k, j)] += w * r[k].dot(&phi[j]);
                        lm[(k, j)] += w * sym_potential(k, &xe, x).dot(&phi[j]);
                    }
                }
            }
            let dinv = basis.dof_inverse();
            let block_div = gram_inv * pk * dinv * s;
            let block_bnd = lm * dinv * s;
            div_rm.view_mut((0, 6 * l), (6, 6)).copy_from(&block_div);
            boundary_moment.view_mut((0, 6 * l), (6, 6)).copy_from(&block_bnd);

            let arm = (fg.barycenter - xe) * (s * fg.area / vol);
            pi_w.set_column(l, &arm);
            div_w[l] = s * fg.area / vol;
        }

        // int_E tau : S_m = -int_E div tau . p_m + int_dE (tau n) . p_m
        let hm = DMatrix::from_column_slice(6, 6, hmat.as_slice());
        let pi_s = (boundary_moment - hm * &div_rm) / vol;

        // stress form
        let amat = material.compliance_matrix();
        let amat = DMatrix::from_column_slice(6, 6, amat.as_slice());
        let mut a = pi_s.transpose() * &amat * &pi_s * vol;
        let xi1 = material.xi1();
        for (l, of) in faces.iter().enumerate() {
            let basis = &bases[of.face];
            let n = basis.normal;
            let t = basis.tangents;
            // Q maps tensor coefficients to traction coefficients of S n
            let mut q = SMatrix::<f64, 6, 6>::zeros();
            for (m, sm) in sym.iter().enumerate() {
                let sn = sm * n;
                q[(0, m)] = t[0].dot(&sn);
                q[(1, m)] = t[1].dot(&sn);
                q[(3, m)] = n.dot(&sn);
            }
            let q = DMatrix::from_column_slice(6, 6, q.as_slice());
            let mut r = -(q * &pi_s);
            let dinv = DMatrix::from_column_slice(6, 6, basis.dof_inverse().as_slice());
            let mut block = r.view_mut((0, 6 * l), (6, 6));
            block += dinv;
            let d = DMatrix::from_column_slice(6, 6, basis.dof_matrix().as_slice());
            a += r.transpose() * d * &r * (xi1 * h * basis.area);
        }
        symmetrize(&mut a);

        // velocity form
        let kinv = material.permeability_inv();
        let kinv = DMatrix::from_column_slice(3, 3, kinv.as_slice());
        let mut c = pi_w.transpose() * kinv * &pi_w * vol;
        let xi2 = material.xi2();
        for (l, of) in faces.iter().enumerate() {
            let fg = mesh.face_geometry(of.face);
            let n = fg.normal;
            let mut row = -(pi_w.transpose() * DVector::from_column_slice(n.as_slice())).transpose();
            row[l] += 1.0;
            c += row.transpose() * &row * (xi2 * h * fg.area);
        }
        symmetrize(&mut c);

        let e = DMatrix::from_column_slice(6, 6, gram.as_slice()) * &div_rm;
        let b = &div_w * vol;
        let trace_row = pi_s.row(0) + pi_s.row(1) + pi_s.row(2);
        let a_i = trace_row.transpose() * (material.alpha * vol * material.kappa_inv() / 3.0);

        Self {
            cell,
            faces,
            volume: vol,
            diameter: h,
            rm_gram: gram,
            div_rm,
            pi_s,
            a,
            e,
            pi_w,
            div_w,
            c,
            b,
            a_i,
            m_p: material.s0 * vol,
            a_ii: material.alpha * material.alpha * material.kappa_inv() * vol,
        }
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// Projected constant stress from local stress DOFs.
    pub fn project_stress(&self, dofs: &DVector<f64>) -> crate::Mat3 {
        let c = &self.pi_s * dofs;
        sym_basis()
            .iter()
            .zip(c.iter())
            .map(|(s, &v)| s * v)
            .sum()
    }

    /// Projected constant velocity from local velocity DOFs.
    pub fn project_velocity(&self, dofs: &DVector<f64>) -> Vec3 {
        let v = &self.pi_w * dofs;
        Vec3::new(v[0], v[1], v[2])
    }

    /// Stabilization part of the stress form, `a - |E| Pi^T A Pi`.
    pub fn stress_stabilization(&self, material: &MaterialParams) -> DMatrix<f64> {
        let amat = material.compliance_matrix();
        let amat = DMatrix::from_column_slice(6, 6, amat.as_slice());
        &self.a - self.pi_s.transpose() * amat * &self.pi_s * self.volume
    }

    /// Stabilization part of the velocity form.
    pub fn velocity_stabilization(&self, material: &MaterialParams) -> DMatrix<f64> {
        let kinv = material.permeability_inv();
        let kinv = DMatrix::from_column_slice(3, 3, kinv.as_slice());
        &self.c - self.pi_w.transpose() * kinv * &self.pi_w * self.volume
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{single_hexahedron, single_tetrahedron};
    use crate::spaces::{interpolate_stress, interpolate_velocity};
    use crate::Mat3;

    fn unit_material() -> MaterialParams {
        MaterialParams::new(1.0, 1.0, 1.0, 0.002, Mat3::identity()).unwrap()
    }

    fn setup(mesh: &PolyMesh) -> (Vec<FaceTractionBasis>, LocalBlocks) {
        let bases: Vec<_> = (0..mesh.num_faces()).map(|f| FaceTractionBasis::new(mesh, f)).collect();
        let blocks = LocalBlocks::compute(mesh, 0, &unit_material(), &bases);
        (bases, blocks)
    }

    fn stress_dofs<F: Fn(&Vec3) -> Mat3>(mesh: &PolyMesh, blocks: &LocalBlocks, s: F) -> DVector<f64> {
        let mut d = DVector::zeros(6 * blocks.num_faces());
        for (l, of) in blocks.faces.iter().enumerate() {
            d.rows_mut(6 * l, 6).copy_from(&interpolate_stress(mesh, of.face, &s));
        }
        d
    }

    fn velocity_dofs<F: Fn(&Vec3) -> Vec3>(mesh: &PolyMesh, blocks: &LocalBlocks, w: F) -> DVector<f64> {
        DVector::from_iterator(
            blocks.num_faces(),
            blocks.faces.iter().map(|of| interpolate_velocity(mesh, of.face, &w)),
        )
    }

    #[test]
    fn constant_stress_is_reproduced() {
        for mesh in [single_hexahedron(1.0), single_tetrahedron()] {
            let (_, lb) = setup(&mesh);
            let s0 = Mat3::new(1.0, 0.3, -0.2, 0.3, -2.0, 0.7, -0.2, 0.7, 0.5);
            let d = stress_dofs(&mesh, &lb, |_| s0);
            assert!((lb.project_stress(&d) - s0).norm() < 1e-12);
            assert!((&lb.div_rm * &d).norm() < 1e-12);
            let stab = lb.stress_stabilization(&unit_material());
            assert!((d.transpose() * stab * &d)[0].abs() < 1e-12);
        }
    }

    #[test]
    fn linear_stress_on_unit_cube() {
        let mesh = single_hexahedron(1.0);
        let (_, lb) = setup(&mesh);
        let d = stress_dofs(&mesh, &lb, |x| Mat3::new(x.x, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        let div = &lb.div_rm * &d;
        let expect = DVector::from_column_slice(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!((&div - expect).norm() < 1e-12, "{div}");
        let pi = lb.project_stress(&d);
        assert!((pi - Mat3::new(0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)).norm() < 1e-12);
        // (v, div tau) with v = e1 translation
        let v = DVector::from_column_slice(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(((v.transpose() * &lb.e * &d)[0] - 1.0).abs() < 1e-12);
        assert!(lb.div_rm * DVector::zeros(36) == DVector::zeros(6));
    }

    #[test]
    fn identity_stress_energy_and_coupling() {
        let mesh = single_hexahedron(1.0);
        let (_, lb) = setup(&mesh);
        let d = stress_dofs(&mesh, &lb, |_| Mat3::identity());
        assert!(((d.transpose() * &lb.a * &d)[0] - 0.6).abs() < 1e-12);
        assert!((lb.a_i.dot(&d) - 0.6).abs() < 1e-12);
        assert!((lb.m_p - 0.002).abs() < 1e-15);
        assert!((lb.a_ii - 0.6).abs() < 1e-15);
    }

    #[test]
    fn decoupled_limit() {
        let mesh = single_hexahedron(1.0);
        let bases: Vec<_> = (0..6).map(|f| FaceTractionBasis::new(&mesh, f)).collect();
        let m = MaterialParams::new(1.0, 1.0, 0.0, 0.0, Mat3::identity()).unwrap();
        let lb = LocalBlocks::compute(&mesh, 0, &m, &bases);
        assert_eq!(lb.a_i.norm(), 0.0);
        assert_eq!(lb.a_ii, 0.0);
    }

    #[test]
    fn velocity_operators_on_unit_cube() {
        let mesh = single_hexahedron(1.0);
        let (_, lb) = setup(&mesh);
        let e3 = velocity_dofs(&mesh, &lb, |_| Vec3::z());
        assert!((lb.project_velocity(&e3) - Vec3::z()).norm() < 1e-14);
        assert!(((e3.transpose() * &lb.c * &e3)[0] - 1.0).abs() < 1e-12);
        let lin = velocity_dofs(&mesh, &lb, |x| Vec3::new(x.x, 0.0, 0.0));
        assert!((lb.project_velocity(&lin) - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-14);
        // outward unit flux on x = 1 only
        let right = lb
            .faces
            .iter()
            .position(|of| (mesh.face_geometry(of.face).barycenter.x - 1.0).abs() < 1e-14)
            .unwrap();
        let mut z = DVector::zeros(6);
        z[right] = lb.faces[right].signf();
        assert!((lb.div_w.dot(&z) - 1.0).abs() < 1e-14);
        assert!((lb.b.dot(&z) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn forms_are_symmetric_positive_definite() {
        for mesh in [single_hexahedron(0.3), single_tetrahedron()] {
            let (_, lb) = setup(&mesh);
            for m in [&lb.a, &lb.c] {
                assert!((m - m.transpose()).norm() <= 1e-14 * m.norm());
                let eig = m.clone().symmetric_eigen().eigenvalues;
                let max = eig.max();
                assert!(eig.min() > 1e-12 * max, "min eigenvalue {}", eig.min());
            }
        }
    }
}
