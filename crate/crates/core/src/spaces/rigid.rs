use crate::geometry::{cell_quadrature, CellGeometry, PolyMesh};
use crate::{Mat6, Vec3};

/// Translations `e_1, e_2, e_3` followed by rotations `e_i x (x - x_E)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidBodyBasis {
    pub center: Vec3,
}

impl RigidBodyBasis {
    pub fn eval(&self, i: usize, x: &Vec3) -> Vec3 {
        if i < 3 {
            Vec3::ith(i, 1.0)
        } else {
            Vec3::ith(i - 3, 1.0).cross(&(x - self.center))
        }
    }

    pub fn eval_all(&self, x: &Vec3) -> [Vec3; 6] {
        std::array::from_fn(|i| self.eval(i, x))
    }

    /// Gradient of field `i` (constant).
    pub fn gradient(&self, i: usize) -> crate::Mat3 {
        if i < 3 {
            crate::Mat3::zeros()
        } else {
            // d/dx_k (e_i x d)_j = eps_{j i k}
            let w = Vec3::ith(i - 3, 1.0);
            crate::Mat3::from_columns(&[
                w.cross(&Vec3::x()),
                w.cross(&Vec3::y()),
                w.cross(&Vec3::z()),
            ])
        }
    }

    /// The field with coefficients `c`.
    pub fn combine(&self, c: &crate::Vec6, x: &Vec3) -> Vec3 {
        (0..6).map(|i| self.eval(i, x) * c[i]).sum()
    }
}

pub fn rm_basis(geometry: &CellGeometry) -> RigidBodyBasis {
    RigidBodyBasis {
        center: geometry.barycenter,
    }
}

/// `G_ij = int_E r_i . r_j`, exact with degree-2 quadrature.
pub fn rm_gram(mesh: &PolyMesh, cell: usize) -> Mat6 {
    let basis = rm_basis(mesh.cell_geometry(cell));
    let q = cell_quadrature(mesh, cell, 2);
    let mut g = Mat6::zeros();
    for (x, w) in q.iter() {
        let r = basis.eval_all(x);
        for i in 0..6 {
            for j in i..6 {
                g[(i, j)] += w * r[i].dot(&r[j]);
            }
        }
    }
    for i in 0..6 {
        for j in 0..i {
            g[(i, j)] = g[(j, i)];
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::single_hexahedron;

    #[test]
    fn values_at_center() {
        let b = RigidBodyBasis { center: Vec3::new(0.3, -1.0, 2.0) };
        let r = b.eval_all(&b.center);
        for i in 0..3 {
            assert_eq!(r[i], Vec3::ith(i, 1.0));
            assert_eq!(r[i + 3], Vec3::zeros());
        }
    }

    #[test]
    fn rotation_about_e3() {
        let b = RigidBodyBasis { center: Vec3::zeros() };
        assert_eq!(b.eval(5, &Vec3::x()), Vec3::y());
    }

    #[test]
    fn symmetric_gradient_vanishes() {
        let b = RigidBodyBasis { center: Vec3::new(1.0, 2.0, 3.0) };
        let x = Vec3::new(0.1, 0.7, -0.4);
        for i in 0..6 {
            let g = b.gradient(i);
            assert!((g + g.transpose()).norm() < 1e-15);
            // gradient agrees with a difference quotient
            for k in 0..3 {
                let d = (b.eval(i, &(x + Vec3::ith(k, 1.0))) - b.eval(i, &x)) - g.column(k);
                assert!(d.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn gram_of_unit_cube() {
        let mesh = single_hexahedron(1.0);
        let g = rm_gram(&mesh, 0);
        // translations: identity; rotations: int (d_j^2 + d_k^2) = 2/12
        for i in 0..3 {
            assert!((g[(i, i)] - 1.0).abs() < 1e-14);
            assert!((g[(i + 3, i + 3)] - 1.0 / 6.0).abs() < 1e-14);
        }
        assert!((g - Mat6::from_diagonal(&g.diagonal())).norm() < 1e-14);
    }
}
