use thiserror::Error;

use super::tensor::sym_basis;
use crate::{Mat3, Mat6};

#[derive(Debug, Error, PartialEq)]
pub enum MaterialError {
    #[error("invalid material parameter {name} = {value}: {reason}")]
    Invalid {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("permeability is not symmetric positive definite")]
    Permeability,
}

/// Isotropic Biot material, constant on a cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialParams {
    pub lambda: f64,
    pub mu: f64,
    /// Biot-Willis coefficient.
    pub alpha: f64,
    /// Constrained specific storage.
    pub s0: f64,
    /// Permeability (over fluid viscosity).
    pub permeability: Mat3,
}

impl MaterialParams {
    pub fn new(lambda: f64, mu: f64, alpha: f64, s0: f64, permeability: Mat3) -> Result<Self, MaterialError> {
        let m = Self {
            lambda,
            mu,
            alpha,
            s0,
            permeability,
        };
        m.validate()?;
        Ok(m)
    }

    /// Lame parameters from Young's modulus and Poisson's ratio.
    pub fn lame_from_young(young: f64, poisson: f64) -> (f64, f64) {
        let mu = young / (2.0 * (1.0 + poisson));
        let lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
        (lambda, mu)
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        let check = |name, value: f64, ok: bool, reason| {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(MaterialError::Invalid { name, value, reason })
            }
        };
        check("mu", self.mu, self.mu > 0.0, "must be positive")?;
        check("lambda", self.lambda, self.lambda >= 0.0, "must be non-negative")?;
        check("alpha", self.alpha, (0.0..=1.0).contains(&self.alpha), "must lie in [0, 1]")?;
        check("s0", self.s0, self.s0 >= 0.0, "must be non-negative")?;
        let k = self.permeability;
        if !k.iter().all(|v| v.is_finite()) || (k - k.transpose()).norm() > 1e-12 * k.norm() {
            return Err(MaterialError::Permeability);
        }
        if k.cholesky().is_none() {
            return Err(MaterialError::Permeability);
        }
        Ok(())
    }

    /// `kappa = (2 mu + 3 lambda) / 3`.
    pub fn kappa(&self) -> f64 {
        (2.0 * self.mu + 3.0 * self.lambda) / 3.0
    }

    /// `1 / kappa`; tends to zero in the incompressible limit.
    pub fn kappa_inv(&self) -> f64 {
        3.0 / (2.0 * self.mu + 3.0 * self.lambda)
    }

    /// Compliance `A tau = dev(tau) / (2 mu) + tr(tau) I / (9 kappa)`.
    pub fn compliance_apply(&self, tau: &Mat3) -> Mat3 {
        let tr = tau.trace();
        let dev = tau - Mat3::identity() * (tr / 3.0);
        dev / (2.0 * self.mu) + Mat3::identity() * (tr * self.kappa_inv() / 9.0)
    }

    /// Compliance in the orthonormal symmetric basis: `A_mn = S_m : A S_n`.
    pub fn compliance_matrix(&self) -> Mat6 {
        let s = sym_basis();
        Mat6::from_fn(|m, n| {
            let ip = s[m].component_mul(&s[n]).sum();
            let tt = s[m].trace() * s[n].trace();
            (ip - tt / 3.0) / (2.0 * self.mu) + tt * self.kappa_inv() / 9.0
        })
    }

    /// Componentwise trace `sum_ij A_ijij = 5 / (2 mu) + 1 / (3 kappa)`.
    pub fn compliance_trace(&self) -> f64 {
        2.5 / self.mu + self.kappa_inv() / 3.0
    }

    /// Stress stabilization weight `xi_1 = tr(A) / 2`.
    pub fn xi1(&self) -> f64 {
        0.5 * self.compliance_trace()
    }

    pub fn permeability_inv(&self) -> Mat3 {
        self.permeability
            .try_inverse()
            .expect("validated permeability is invertible")
    }

    /// Velocity stabilization weight `xi_2 = tr(K^-1) / 2`.
    pub fn xi2(&self) -> f64 {
        0.5 * self.permeability_inv().trace()
    }
}
