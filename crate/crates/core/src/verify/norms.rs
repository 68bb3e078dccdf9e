use nalgebra::DVector;
use rayon::prelude::*;

use super::{ManufacturedCase, VerifyError};
use crate::geometry::{cell_quadrature, mesh_size, PolyMesh};
use crate::spaces::rm_basis;
use crate::system::{Discretization, State};
use crate::{Vec3, Vec6};

/// Degree of the cell quadrature used for error norms.
pub const ERROR_DEGREE: usize = 4;

/// Relative errors on one mesh at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorRow {
    pub h: f64,
    pub e_u: f64,
    pub e_sigma: f64,
    pub e_p: f64,
    pub e_w: f64,
}

impl ErrorRow {
    pub fn values(&self) -> [f64; 4] {
        [self.e_u, self.e_sigma, self.e_p, self.e_w]
    }
}

/// `log(E / E~) / log(h / h~)`.
pub fn rate(e: f64, h: f64, e_next: f64, h_next: f64) -> f64 {
    (e / e_next).ln() / (h / h_next).ln()
}

/// Error rows of a mesh sequence, coarse to fine.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    /// Rates between consecutive rows, `[u, sigma, p, w]`; `None` for the
    /// first row.
    pub fn rates(&self) -> Vec<Option<[f64; 4]>> {
        let mut out = vec![None];
        for w in self.rows.windows(2) {
            let (a, b) = (w[0].values(), w[1].values());
            out.push(Some(std::array::from_fn(|k| {
                rate(a[k], w[0].h, b[k], w[1].h)
            })));
        }
        out.truncate(self.rows.len());
        out
    }

    /// Rates between the two finest meshes.
    pub fn final_rates(&self) -> Option<[f64; 4]> {
        self.rates().last().copied().flatten()
    }
}

/// Relative L2 errors of `state` against `case` at `state.t`.
pub fn compute_errors(
    mesh: &PolyMesh,
    disc: &Discretization,
    state: &State,
    case: &ManufacturedCase,
) -> Result<ErrorRow, VerifyError> {
    let t = state.t;
    // per cell: [err_u, ref_u, err_s, ref_s, err_p, ref_p, err_w, ref_w]
    let sums: Vec<[f64; 8]> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let lb = &disc.blocks[c];
            let sig = DVector::from_iterator(
                6 * lb.faces.len(),
                lb.faces
                    .iter()
                    .flat_map(|of| state.sigma[6 * of.face..6 * of.face + 6].iter().copied()),
            );
            let vel = DVector::from_iterator(
                lb.faces.len(),
                lb.faces.iter().map(|of| state.w[of.face]),
            );
            let s_h = lb.project_stress(&sig);
            let w_h = lb.project_velocity(&vel);
            let rm = rm_basis(mesh.cell_geometry(c));
            let coeffs = Vec6::from_column_slice(&state.u[6 * c..6 * c + 6]);
            let p_h = state.p[c];
            let mut acc = [0.0; 8];
            for (x, wt) in cell_quadrature(mesh, c, ERROR_DEGREE).iter() {
                let u = case.displacement(x, t);
                let s = case.stress(x, t);
                let p = case.pressure(x, t);
                let w: Vec3 = case.velocity(x, t);
                acc[0] += wt * (u - rm.combine(&coeffs, x)).norm_squared();
                acc[1] += wt * u.norm_squared();
                acc[2] += wt * (s - s_h).norm_squared();
                acc[3] += wt * s.norm_squared();
                acc[4] += wt * (p - p_h).powi(2);
                acc[5] += wt * p * p;
                acc[6] += wt * (w - w_h).norm_squared();
                acc[7] += wt * w.norm_squared();
            }
            acc
        })
        .collect();
    let mut tot = [0.0; 8];
    for s in &sums {
        for k in 0..8 {
            tot[k] += s[k];
        }
    }
    let rel = |k: usize, field: &str| {
        if tot[k + 1] == 0.0 {
            Err(VerifyError::ZeroNorm {
                field: field.to_string(),
            })
        } else {
            Ok((tot[k] / tot[k + 1]).sqrt())
        }
    };
    Ok(ErrorRow {
        h: mesh_size(mesh),
        e_u: rel(0, "u")?,
        e_sigma: rel(2, "sigma")?,
        e_p: rel(4, "p")?,
        e_w: rel(6, "w")?,
    })
}
