use crate::geometry::{face_quadrature, FaceGeometry, PolyMesh};
use crate::{Mat6, Vec3, Vec6};

/// Basis of the 6-dimensional face traction space, w.r.t. the stored face
/// normal `n`:
///
/// `t1, t2, n x (x - x_f) / h_f, n, (xt / h_f) n, (yt / h_f) n`
///
/// with `xt = (x - x_f) . t1`, `yt = (x - x_f) . t2`. The same six fields,
/// face-averaged, define the stress DOFs, so `dofs = D c` with the DOF
/// matrix `D_ij = (1/|f|) int_f phi_i . phi_j`.
#[derive(Clone, Debug)]
pub struct FaceTractionBasis {
    pub center: Vec3,
    pub normal: Vec3,
    pub tangents: [Vec3; 2],
    pub diameter: f64,
    pub area: f64,
    dof_matrix: Mat6,
    dof_inverse: Mat6,
}

impl FaceTractionBasis {
    pub fn new(mesh: &PolyMesh, face: usize) -> Self {
        let g = mesh.face_geometry(face);
        let mut basis = Self::unscaled(g);
        let q = face_quadrature(mesh, face, 2);
        let mut d = Mat6::zeros();
        for (x, w) in q.iter() {
            let phi = basis.eval_all(x);
            for i in 0..6 {
                for j in 0..6 {
                    d[(i, j)] += w * phi[i].dot(&phi[j]);
                }
            }
        }
        d /= g.area;
        d = (d + d.transpose()) * 0.5;
        basis.dof_inverse = d
            .try_inverse()
            .expect("traction DOF matrix of a non-degenerate face is invertible");
        basis.dof_matrix = d;
        basis
    }

    fn unscaled(g: &FaceGeometry) -> Self {
        Self {
            center: g.barycenter,
            normal: g.normal,
            tangents: g.tangents,
            diameter: g.diameter,
            area: g.area,
            dof_matrix: Mat6::identity(),
            dof_inverse: Mat6::identity(),
        }
    }

    pub fn eval_all(&self, x: &Vec3) -> [Vec3; 6] {
        let d = x - self.center;
        let n = self.normal;
        let h = self.diameter;
        [
            self.tangents[0],
            self.tangents[1],
            n.cross(&d) / h,
            n,
            n * (d.dot(&self.tangents[0]) / h),
            n * (d.dot(&self.tangents[1]) / h),
        ]
    }

    /// Traction `sum_j c_j phi_j(x)`.
    pub fn combine(&self, c: &Vec6, x: &Vec3) -> Vec3 {
        let phi = self.eval_all(x);
        (0..6).map(|j| phi[j] * c[j]).sum()
    }

    pub fn dof_matrix(&self) -> &Mat6 {
        &self.dof_matrix
    }

    pub fn dof_inverse(&self) -> &Mat6 {
        &self.dof_inverse
    }

    /// Basis coefficients of the traction with the given DOF values.
    pub fn coefficients(&self, dofs: &Vec6) -> Vec6 {
        self.dof_inverse * dofs
    }

    /// Coefficients of the constant traction `v` (exact: constants are in
    /// the span of `t1, t2, n`).
    pub fn constant_coefficients(&self, v: &Vec3) -> Vec6 {
        Vec6::new(
            v.dot(&self.tangents[0]),
            v.dot(&self.tangents[1]),
            0.0,
            v.dot(&self.normal),
            0.0,
            0.0,
        )
    }

    /// Condition number estimate of the DOF matrix (1-norm).
    pub fn condition(&self) -> f64 {
        let norm1 = |m: &Mat6| {
            (0..6)
                .map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max)
        };
        norm1(&self.dof_matrix) * norm1(&self.dof_inverse)
    }
}

pub fn face_traction_basis(mesh: &PolyMesh, face: usize) -> FaceTractionBasis {
    FaceTractionBasis::new(mesh, face)
}
