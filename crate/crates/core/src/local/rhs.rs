//! Load, source and natural boundary terms.

use crate::geometry::{cell_quadrature, face_quadrature, PolyMesh};
use crate::spaces::{rm_basis, FaceTractionBasis};
use crate::{Vec3, Vec6};

/// `int_E b . r_k` for the six rigid-body fields.
pub fn body_force_load<F>(mesh: &PolyMesh, cell: usize, degree: usize, b: F) -> Vec6
where
    F: Fn(&Vec3) -> Vec3,
{
    let rm = rm_basis(mesh.cell_geometry(cell));
    let mut out = Vec6::zeros();
    for (x, w) in cell_quadrature(mesh, cell, degree).iter() {
        let v = b(x);
        for k in 0..6 {
            out[k] += w * v.dot(&rm.eval(k, x));
        }
    }
    out
}

/// `int_E f`, the pressure-row load of a scalar source.
pub fn cell_mean_load<F>(mesh: &PolyMesh, cell: usize, degree: usize, f: F) -> f64
where
    F: Fn(&Vec3) -> f64,
{
    cell_quadrature(mesh, cell, degree).integrate(|x| f(x))
}

/// `<g_u, tau n>_f` as a row over the face's six stress DOFs, for a face
/// whose outward normal is `sign * n_f`.
pub fn boundary_displacement_load<F>(
    mesh: &PolyMesh,
    face: usize,
    sign: f64,
    basis: &FaceTractionBasis,
    degree: usize,
    g: F,
) -> Vec6
where
    F: Fn(&Vec3) -> Vec3,
{
    let mut m = Vec6::zeros();
    for (x, w) in face_quadrature(mesh, face, degree).iter() {
        let v = g(x);
        let phi = basis.eval_all(x);
        for j in 0..6 {
            m[j] += w * v.dot(&phi[j]);
        }
    }
    basis.dof_inverse().transpose() * m * sign
}

/// Natural pressure term of the velocity row, `-<g_p, z . n>_f`, for the
/// face's single velocity DOF. The minus sign comes from integrating
/// `grad p` by parts.
pub fn boundary_pressure_load<F>(mesh: &PolyMesh, face: usize, sign: f64, degree: usize, g: F) -> f64
where
    F: Fn(&Vec3) -> f64,
{
    -sign * face_quadrature(mesh, face, degree).integrate(|x| g(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::single_hexahedron;

    #[test]
    fn constant_body_force() {
        let mesh = single_hexahedron(1.0);
        let l = body_force_load(&mesh, 0, 2, |_| Vec3::z());
        assert!((l - Vec6::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn unit_pressure_on_a_face() {
        let mesh = single_hexahedron(2.0);
        // area 4, outward sign +1 on the structured boundary
        assert!((boundary_pressure_load(&mesh, 0, 1.0, 2, |_| 1.0) + 4.0).abs() < 1e-14);
    }

    #[test]
    fn displacement_load_pairs_with_traction() {
        // <g, tau n> for tau n = n (normal DOF 1): equals int_f g . n
        let mesh = single_hexahedron(1.0);
        let basis = FaceTractionBasis::new(&mesh, 3);
        let n = basis.normal;
        let row = boundary_displacement_load(&mesh, 3, 1.0, &basis, 2, |x| Vec3::new(x.y, 2.0, x.z) );
        let dofs = basis.dof_matrix() * basis.constant_coefficients(&n);
        let direct = face_quadrature(&mesh, 3, 2).integrate(|x| Vec3::new(x.y, 2.0, x.z).dot(&n));
        assert!((row.dot(&dofs) - direct).abs() < 1e-14);
    }
}
