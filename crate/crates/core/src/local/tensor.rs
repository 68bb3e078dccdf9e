//! Orthonormal basis of symmetric 3x3 tensors:
//! `e1e1, e2e2, e3e3, (e1e2 + e2e1)/sqrt2, (e2e3 + e3e2)/sqrt2,
//! (e1e3 + e3e1)/sqrt2`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::{Mat3, Vec3, Vec6};

const PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)];

pub fn sym_basis() -> [Mat3; 6] {
    std::array::from_fn(|m| {
        let (i, j) = PAIRS[m];
        let mut s = Mat3::zeros();
        if i == j {
            s[(i, i)] = 1.0;
        } else {
            s[(i, j)] = FRAC_1_SQRT_2;
            s[(j, i)] = FRAC_1_SQRT_2;
        }
        s
    })
}

/// Coefficients of the symmetric part of `t`.
pub fn sym_to_coeffs(t: &Mat3) -> Vec6 {
    Vec6::from_fn(|m, _| {
        let (i, j) = PAIRS[m];
        if i == j {
            t[(i, i)]
        } else {
            (t[(i, j)] + t[(j, i)]) * FRAC_1_SQRT_2
        }
    })
}

pub fn sym_from_coeffs(c: &Vec6) -> Mat3 {
    sym_basis()
        .iter()
        .zip(c.iter())
        .map(|(s, &v)| s * v)
        .sum()
}

/// Linear vector field whose symmetric gradient is basis tensor `m`,
/// vanishing at `center`.
pub fn sym_potential(m: usize, center: &Vec3, x: &Vec3) -> Vec3 {
    let d = x - center;
    let (i, j) = PAIRS[m];
    if i == j {
        Vec3::ith(i, d[i])
    } else {
        (Vec3::ith(i, d[j]) + Vec3::ith(j, d[i])) * FRAC_1_SQRT_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal() {
        let b = sym_basis();
        for m in 0..6 {
            for n in 0..6 {
                let ip = b[m].component_mul(&b[n]).sum();
                assert!((ip - if m == n { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn round_trip() {
        let t = Mat3::new(1.0, 2.0, 3.0, 2.0, 5.0, -1.0, 3.0, -1.0, 0.5);
        assert!((sym_from_coeffs(&sym_to_coeffs(&t)) - t).norm() < 1e-14);
    }

    #[test]
    fn potentials_have_the_right_gradient() {
        let c = Vec3::new(0.2, 0.4, -0.1);
        let x = Vec3::new(1.0, -0.5, 2.0);
        for (m, s) in sym_basis().iter().enumerate() {
            let mut g = Mat3::zeros();
            for k in 0..3 {
                let col = sym_potential(m, &c, &(x + Vec3::ith(k, 1.0))) - sym_potential(m, &c, &x);
                g.set_column(k, &col);
            }
            assert!(((g + g.transpose()) * 0.5 - s).norm() < 1e-14);
            assert_eq!(sym_potential(m, &c, &c), Vec3::zeros());
        }
    }
}
