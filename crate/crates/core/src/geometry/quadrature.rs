//! Quadrature on polygons and polyhedra by fan sub-simplices.
//!
//! Faces are split into triangles `(x_f, v_i, v_{i+1})`, cells into
//! tetrahedra `(x_E, x_f, v_i, v_{i+1})`; each piece carries a simplex rule.
//! Exactness equals that of the simplex rule as long as the polygon
//! (polyhedron) is star-shaped w.r.t. its barycenter.

use std::ops::{AddAssign, Mul};

use super::PolyMesh;
use crate::Vec3;

/// Sub-simplices smaller than this fraction of the parent are dropped.
const SLIVER: f64 = 1e-14;

#[derive(Clone, Debug, Default)]
pub struct QuadratureRule {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sum of weights, i.e. the measure of the integration domain.
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<T, F>(&self, mut f: F) -> T
    where
        T: Default + AddAssign + Mul<f64, Output = T>,
        F: FnMut(&Vec3) -> T,
    {
        let mut acc = T::default();
        for (p, &w) in self.points.iter().zip(&self.weights) {
            acc += f(p) * w;
        }
        acc
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec3, f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// Quadrature on face `face`, exact for polynomials of degree `degree`
/// (1..=4).
pub fn face_quadrature(mesh: &PolyMesh, face: usize, degree: usize) -> QuadratureRule {
    let (bary, wts) = triangle_rule(degree);
    let g = mesh.face_geometry(face);
    let xf = g.barycenter;
    let n = g.points.len();
    let mut rule = QuadratureRule::default();
    for i in 0..n {
        let a = g.points[i];
        let b = g.points[(i + 1) % n];
        let area = 0.5 * (a - xf).cross(&(b - xf)).dot(&g.normal);
        if area.abs() < SLIVER * g.area {
            log::warn!("face {face}: dropping degenerate fan triangle {i}");
            continue;
        }
        for (l, &w) in bary.iter().zip(wts) {
            rule.points.push(xf * l[0] + a * l[1] + b * l[2]);
            rule.weights.push(w * area);
        }
    }
    rule
}

/// Quadrature on cell `cell`, exact for polynomials of degree `degree`
/// (1..=4).
pub fn cell_quadrature(mesh: &PolyMesh, cell: usize, degree: usize) -> QuadratureRule {
    let (bary, wts) = tetrahedron_rule(degree);
    let cg = mesh.cell_geometry(cell);
    let xe = cg.barycenter;
    let mut rule = QuadratureRule::default();
    for of in mesh.cell(cell) {
        let g = mesh.face_geometry(of.face);
        let xf = g.barycenter;
        let n = g.points.len();
        for i in 0..n {
            let a = g.points[i];
            let b = g.points[(i + 1) % n];
            let vol = of.signf() * (xf - xe).dot(&(a - xe).cross(&(b - xe))) / 6.0;
            if vol.abs() < SLIVER * cg.volume {
                log::warn!("cell {cell}: dropping degenerate fan tetrahedron");
                continue;
            }
            for (l, &w) in bary.iter().zip(&wts) {
                rule.points.push(xe * l[0] + xf * l[1] + a * l[2] + b * l[3]);
                rule.weights.push(w * vol);
            }
        }
    }
    rule
}

const TRI1: ([[f64; 3]; 1], [f64; 1]) = ([[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]], [1.0]);
const TRI2: ([[f64; 3]; 3], [f64; 3]) = (
    [
        [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
        [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
    ],
    [1.0 / 3.0; 3],
);
// Dunavant degree-4 rule, 6 points, positive weights.
const D4_A1: f64 = 0.445_948_490_915_964_886_32;
const D4_W1: f64 = 0.223_381_589_678_011_465_70;
const D4_A2: f64 = 0.091_576_213_509_770_743_46;
const D4_W2: f64 = 0.109_951_743_655_321_867_64;
const TRI4: ([[f64; 3]; 6], [f64; 6]) = (
    [
        [D4_A1, D4_A1, 1.0 - 2.0 * D4_A1],
        [D4_A1, 1.0 - 2.0 * D4_A1, D4_A1],
        [1.0 - 2.0 * D4_A1, D4_A1, D4_A1],
        [D4_A2, D4_A2, 1.0 - 2.0 * D4_A2],
        [D4_A2, 1.0 - 2.0 * D4_A2, D4_A2],
        [1.0 - 2.0 * D4_A2, D4_A2, D4_A2],
    ],
    [D4_W1, D4_W1, D4_W1, D4_W2, D4_W2, D4_W2],
);

/// Barycentric points and weights (summing to 1) on the reference triangle.
fn triangle_rule(degree: usize) -> (&'static [[f64; 3]], &'static [f64]) {
    match degree {
        0 | 1 => (&TRI1.0, &TRI1.1),
        2 => (&TRI2.0, &TRI2.1),
        3 | 4 => (&TRI4.0, &TRI4.1),
        d => panic!("triangle rule of degree {d} not available (max 4)"),
    }
}

/// Barycentric points and weights (summing to 1) on the reference
/// tetrahedron. Degrees 3 and 4 use collapsed Gauss-Legendre products, which
/// keep all weights positive.
fn tetrahedron_rule(degree: usize) -> (Vec<[f64; 4]>, Vec<f64>) {
    match degree {
        0 | 1 => (vec![[0.25; 4]], vec![1.0]),
        2 => {
            let b = (5.0 - 5f64.sqrt()) / 20.0;
            let a = 1.0 - 3.0 * b;
            (
                vec![[a, b, b, b], [b, a, b, b], [b, b, a, b], [b, b, b, a]],
                vec![0.25; 4],
            )
        }
        3 => collapsed_rule(3, 3, 2),
        4 => collapsed_rule(4, 3, 3),
        d => panic!("tetrahedron rule of degree {d} not available (max 4)"),
    }
}

/// Duffy map `x = u, y = v (1-u), z = w (1-u)(1-v)` of the unit cube, with
/// Jacobian `(1-u)^2 (1-v)`.
fn collapsed_rule(qu: usize, qv: usize, qw: usize) -> (Vec<[f64; 4]>, Vec<f64>) {
    let (gu, wu) = gauss_legendre_unit(qu);
    let (gv, wv) = gauss_legendre_unit(qv);
    let (gw, ww) = gauss_legendre_unit(qw);
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    for (u, a) in gu.iter().zip(&wu) {
        for (v, b) in gv.iter().zip(&wv) {
            for (w, c) in gw.iter().zip(&ww) {
                let x = *u;
                let y = v * (1.0 - u);
                let z = w * (1.0 - u) * (1.0 - v);
                pts.push([1.0 - x - y - z, x, y, z]);
                // reference volume 1/6, weights normalised to sum 1
                wts.push(6.0 * a * b * c * (1.0 - u).powi(2) * (1.0 - v));
            }
        }
    }
    (pts, wts)
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
fn gauss_legendre_unit(q: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w): (Vec<f64>, Vec<f64>) = match q {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let a = 1.0 / 3f64.sqrt();
            (vec![-a, a], vec![1.0, 1.0])
        }
        3 => {
            let a = (3.0f64 / 5.0).sqrt();
            (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            let a = (3.0 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
            let b = (3.0 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
            let wa = (18.0 + 30f64.sqrt()) / 36.0;
            let wb = (18.0 - 30f64.sqrt()) / 36.0;
            (vec![-b, -a, a, b], vec![wb, wa, wa, wb])
        }
        _ => unreachable!("only 1..=4 point Gauss-Legendre rules are tabulated"),
    };
    (
        x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        w.iter().map(|t| 0.5 * t).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_structured_cube, single_hexahedron, single_tetrahedron, BoxDomain};

    fn monomial(p: &Vec3, e: [i32; 3]) -> f64 {
        p.x.powi(e[0]) * p.y.powi(e[1]) * p.z.powi(e[2])
    }

    // integral of x^a over [lo, hi]
    fn int1d(a: i32, lo: f64, hi: f64) -> f64 {
        (hi.powi(a + 1) - lo.powi(a + 1)) / f64::from(a + 1)
    }

    #[test]
    fn weights_positive_and_sum_to_measure() {
        let mesh = build_structured_cube(2, &BoxDomain::unit());
        for d in 1..=4 {
            for f in 0..mesh.num_faces() {
                let r = face_quadrature(&mesh, f, d);
                assert!(r.weights.iter().all(|&w| w > 0.0));
                let a = mesh.face_geometry(f).area;
                assert!((r.measure() - a).abs() <= 1e-12 * a);
            }
            for c in 0..mesh.num_cells() {
                let r = cell_quadrature(&mesh, c, d);
                assert!(r.weights.iter().all(|&w| w > 0.0));
                let v = mesh.cell_geometry(c).volume;
                assert!((r.measure() - v).abs() <= 1e-12 * v);
            }
        }
    }

    #[test]
    fn unit_square_of_one() {
        let mesh = single_hexahedron(1.0);
        let r = face_quadrature(&mesh, 0, 1);
        assert!((r.integrate(|_| 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cube_xyz_degree3() {
        let mesh = single_hexahedron(1.0);
        let r = cell_quadrature(&mesh, 0, 3);
        assert!((r.integrate(|p| p.x * p.y * p.z) - 0.125).abs() < 1e-14);
    }

    #[test]
    fn monomials_on_a_box_are_exact() {
        let dom = BoxDomain::new(Vec3::new(0.2, -0.3, 1.0), Vec3::new(0.9, 0.4, 1.5));
        let mesh = build_structured_cube(1, &dom);
        for degree in 1..=4usize {
            let r = cell_quadrature(&mesh, 0, degree);
            for a in 0..=degree as i32 {
                for b in 0..=(degree as i32 - a) {
                    for c in 0..=(degree as i32 - a - b) {
                        let exact = int1d(a, 0.2, 0.9) * int1d(b, -0.3, 0.4) * int1d(c, 1.0, 1.5);
                        let approx = r.integrate(|p| monomial(p, [a, b, c]));
                        assert!(
                            (approx - exact).abs() <= 1e-12 * exact.abs().max(1e-3),
                            "degree {degree}, x^{a} y^{b} z^{c}: {approx} vs {exact}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn tetrahedron_degree4() {
        // int over the regular tetrahedron of z^4: exact value from the
        // cross-section area, which scales like (1 - z/H)^2.
        let mesh = single_tetrahedron();
        let g = mesh.cell_geometry(0);
        let h = (2.0f64 / 3.0).sqrt();
        let base = 3f64.sqrt() / 4.0;
        // int_0^H z^4 base (1 - z/H)^2 dz = base H^5 * B(5, 3) = base H^5 * 4! 2! / 7!
        let exact = base * h.powi(5) * 24.0 * 2.0 / 5040.0;
        let r = cell_quadrature(&mesh, 0, 4);
        assert!((r.integrate(|p| p.z.powi(4)) - exact).abs() <= 1e-12 * exact);
        assert!((r.measure() - g.volume).abs() <= 1e-14);
    }
}
