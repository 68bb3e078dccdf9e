use super::{rm_basis, rm_gram, FaceTractionBasis};
use crate::geometry::{cell_quadrature, face_quadrature, PolyMesh};
use crate::{Mat3, Vec3, Vec6};

/// Quadrature degree used to interpolate exact fields.
pub const INTERPOLATION_DEGREE: usize = 4;

/// Face-averaged moments `(1/|f|) int_f (sigma n_f) . phi_i` of the six
/// traction DOF fields.
pub fn interpolate_stress<F>(mesh: &PolyMesh, face: usize, sigma: F) -> Vec6
where
    F: Fn(&Vec3) -> Mat3,
{
    let n = mesh.face_geometry(face).normal;
    traction_moments(mesh, face, |x| sigma(x) * n)
}

/// Face-averaged moments of an arbitrary traction field `g` (w.r.t. the
/// stored normal) against the six DOF fields.
pub(crate) fn traction_moments<F>(mesh: &PolyMesh, face: usize, g: F) -> Vec6
where
    F: Fn(&Vec3) -> Vec3,
{
    let basis = FaceTractionBasis::new(mesh, face);
    let q = face_quadrature(mesh, face, INTERPOLATION_DEGREE);
    let mut m = Vec6::zeros();
    for (x, w) in q.iter() {
        let t = g(x);
        let phi = basis.eval_all(x);
        for i in 0..6 {
            m[i] += w * t.dot(&phi[i]);
        }
    }
    m / mesh.face_geometry(face).area
}

/// Mean normal flux `(1/|f|) int_f w . n_f`.
pub fn interpolate_velocity<F>(mesh: &PolyMesh, face: usize, w: F) -> f64
where
    F: Fn(&Vec3) -> Vec3,
{
    let g = mesh.face_geometry(face);
    face_quadrature(mesh, face, INTERPOLATION_DEGREE).integrate(|x| w(x).dot(&g.normal)) / g.area
}

/// `L^2` projection onto the rigid-body motions of the cell.
pub fn interpolate_displacement<F>(mesh: &PolyMesh, cell: usize, u: F) -> Vec6
where
    F: Fn(&Vec3) -> Vec3,
{
    let basis = rm_basis(mesh.cell_geometry(cell));
    let q = cell_quadrature(mesh, cell, INTERPOLATION_DEGREE);
    let mut rhs = Vec6::zeros();
    for (x, w) in q.iter() {
        let v = u(x);
        for i in 0..6 {
            rhs[i] += w * v.dot(&basis.eval(i, x));
        }
    }
    rm_gram(mesh, cell)
        .cholesky()
        .expect("rigid-body Gram matrix of a valid cell is SPD")
        .solve(&rhs)
}

/// Cell mean.
pub fn interpolate_pressure<F>(mesh: &PolyMesh, cell: usize, p: F) -> f64
where
    F: Fn(&Vec3) -> f64,
{
    let q = cell_quadrature(mesh, cell, INTERPOLATION_DEGREE);
    q.integrate(|x| p(x)) / mesh.cell_geometry(cell).volume
}
