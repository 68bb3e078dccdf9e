use std::sync::OnceLock;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::ldlt::factor::LdltRegularization;
use faer::linalg::solvers::Solve;
use faer::sparse::linalg::cholesky::{factorize_symbolic_cholesky, SymbolicCholesky, SymmetricOrdering};
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet as FaerTriplet};
use faer::{Col, Conj, Mat, Par, Side};
use thiserror::Error;

use super::{norm2, SparseMatrix};

/// Default bound on `||A x - b|| / ||b||`.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
const MAX_REFINEMENT: usize = 10;
/// Pivot threshold and replacement of the LDL^T factorization, relative to
/// the equilibrated matrix.
const PIVOT_REGULARIZATION: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("matrix is not square ({nrows}x{ncols})")]
    NotSquare { nrows: usize, ncols: usize },
    #[error("right-hand side has length {got}, expected {expected}")]
    RhsLength { got: usize, expected: usize },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("relative residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },
}

/// Factorization behind a solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Symmetric indefinite `L D L^T` with AMD ordering and regularized
    /// pivots, corrected by iterative refinement.
    Ldlt,
    /// `L U` with partial pivoting and COLAMD ordering.
    Lu,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveReport {
    /// `||A x - b|| / ||b||` computed with [`SparseMatrix::matvec`]; zero
    /// for a zero right-hand side.
    pub relative_residual: f64,
    pub refinement_steps: usize,
    pub dimension: usize,
    pub nnz: usize,
    pub method: Method,
    pub success: bool,
}

struct LdltFactor {
    symbolic: SymbolicCholesky<usize>,
    values: Vec<f64>,
    /// Symmetric equilibration `A_s = S A S`.
    scale: Vec<f64>,
}

impl LdltFactor {
    fn new(matrix: &SparseMatrix) -> Result<Self, SolveError> {
        let n = matrix.nrows();
        let scale: Vec<f64> = (0..n)
            .map(|r| {
                let m = matrix.row(r).fold(0.0f64, |m, (_, v)| m.max(v.abs()));
                if m > 0.0 {
                    1.0 / m.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let lower: Vec<FaerTriplet<usize, usize, f64>> = matrix
            .triplets()
            .filter(|&(r, c, _)| r >= c)
            .map(|(r, c, v)| FaerTriplet::new(r, c, scale[r] * v * scale[c]))
            .collect();
        let csc = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &lower)
            .map_err(|e| SolveError::Singular(format!("{e:?}")))?;
        let symbolic = factorize_symbolic_cholesky(
            csc.symbolic(),
            Side::Lower,
            SymmetricOrdering::Amd,
            Default::default(),
        )
        .map_err(|e| SolveError::Singular(format!("{e:?}")))?;
        let mut values = vec![0.0; symbolic.len_val()];
        let mut mem = MemBuffer::new(
            symbolic.factorize_numeric_ldlt_scratch::<f64>(Par::Seq, Default::default()),
        );
        let regularization = LdltRegularization {
            dynamic_regularization_signs: None,
            dynamic_regularization_delta: PIVOT_REGULARIZATION,
            dynamic_regularization_epsilon: PIVOT_REGULARIZATION,
        };
        symbolic
            .factorize_numeric_ldlt(
                &mut values,
                csc.as_ref(),
                Side::Lower,
                regularization,
                Par::Seq,
                MemStack::new(&mut mem),
                Default::default(),
            )
            .map_err(|e| SolveError::Singular(format!("{e:?}")))?;
        Ok(Self {
            symbolic,
            values,
            scale,
        })
    }

    fn apply_inverse(&self, b: &[f64]) -> Vec<f64> {
        let ldlt = faer::sparse::linalg::cholesky::LdltRef::new(&self.symbolic, &self.values);
        let mut x = Mat::<f64>::from_fn(b.len(), 1, |i, _| self.scale[i] * b[i]);
        let mut mem = MemBuffer::new(self.symbolic.solve_in_place_scratch::<f64>(1, Par::Seq));
        ldlt.solve_in_place_with_conj(Conj::No, x.as_mut(), Par::Seq, MemStack::new(&mut mem));
        (0..b.len()).map(|i| self.scale[i] * x[(i, 0)]).collect()
    }
}

fn lu_factor(matrix: &SparseMatrix) -> Result<Lu<usize, f64>, SolveError> {
    let n = matrix.nrows();
    let trip: Vec<FaerTriplet<usize, usize, f64>> = matrix
        .triplets()
        .map(|(r, c, v)| FaerTriplet::new(r, c, v))
        .collect();
    let csc = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip)
        .map_err(|e| SolveError::Singular(format!("{e:?}")))?;
    csc.sp_lu()
        .map_err(|e| SolveError::Singular(format!("{e:?}")))
}

fn is_symmetric(matrix: &SparseMatrix) -> bool {
    matrix.nrows() == matrix.ncols() && matrix.triplets().all(|(r, c, v)| matrix.get(c, r) == v)
}

/// Sparse direct solver, reusable across right-hand sides.
///
/// Exactly symmetric matrices are factorized with a regularized `L D L^T`;
/// when refinement cannot meet the tolerance the solver falls back to `L U`
/// with partial pivoting, which is also used for nonsymmetric matrices.
pub struct DirectSolver {
    matrix: SparseMatrix,
    ldlt: Option<LdltFactor>,
    lu: OnceLock<Result<Lu<usize, f64>, String>>,
}

impl std::fmt::Debug for DirectSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DirectSolver")
            .field("dimension", &self.matrix.nrows())
            .field("nnz", &self.matrix.nnz())
            .field("ldlt", &self.ldlt.is_some())
            .finish()
    }
}

impl DirectSolver {
    pub fn factor(matrix: SparseMatrix) -> Result<Self, SolveError> {
        let (n, m) = (matrix.nrows(), matrix.ncols());
        if n != m {
            return Err(SolveError::NotSquare { nrows: n, ncols: m });
        }
        if matrix.values().iter().any(|v| !v.is_finite()) {
            return Err(SolveError::Singular("matrix has non-finite entries".into()));
        }
        // sequential factorization keeps results independent of thread count
        faer::set_global_parallelism(Par::Seq);
        let lu = OnceLock::new();
        let ldlt = if is_symmetric(&matrix) {
            match LdltFactor::new(&matrix) {
                Ok(f) => Some(f),
                Err(e) => {
                    log::debug!("LDL^T failed ({e}), using LU");
                    None
                }
            }
        } else {
            None
        };
        if ldlt.is_none() {
            let _ = lu.set(lu_factor(&matrix).map_err(|e| e.to_string()));
            if let Some(Err(e)) = lu.get() {
                return Err(SolveError::Singular(e.clone()));
            }
        }
        Ok(Self { matrix, ldlt, lu })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// Factorization tried first.
    pub fn method(&self) -> Method {
        if self.ldlt.is_some() {
            Method::Ldlt
        } else {
            Method::Lu
        }
    }

    fn lu(&self) -> Result<&Lu<usize, f64>, SolveError> {
        self.lu
            .get_or_init(|| lu_factor(&self.matrix).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| SolveError::Singular(e.clone()))
    }

    fn apply(&self, method: Method, b: &[f64]) -> Result<Vec<f64>, SolveError> {
        match method {
            Method::Ldlt => Ok(self.ldlt.as_ref().expect("ldlt factor").apply_inverse(b)),
            Method::Lu => {
                let mut x = Col::<f64>::from_fn(b.len(), |i| b[i]);
                self.lu()?.solve_in_place(x.as_mat_mut());
                Ok(x.iter().copied().collect())
            }
        }
    }

    fn refine(
        &self,
        method: Method,
        b: &[f64],
        tol: f64,
    ) -> Result<(Vec<f64>, SolveReport), SolveError> {
        let n = self.matrix.nrows();
        let mut report = SolveReport {
            relative_residual: 0.0,
            refinement_steps: 0,
            dimension: n,
            nnz: self.matrix.nnz(),
            method,
            success: true,
        };
        let bnorm = norm2(b);
        let mut x = self.apply(method, b)?;
        loop {
            if x.iter().any(|v| !v.is_finite()) {
                return Err(SolveError::Singular("solution has non-finite entries".into()));
            }
            let ax = self.matrix.matvec(&x);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            report.relative_residual = norm2(&r) / bnorm;
            if report.relative_residual <= tol {
                return Ok((x, report));
            }
            if report.refinement_steps == MAX_REFINEMENT {
                return Err(SolveError::Residual {
                    residual: report.relative_residual,
                    tolerance: tol,
                });
            }
            let dx = self.apply(method, &r)?;
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
            report.refinement_steps += 1;
        }
    }

    /// Solves `A x = b` with iterative refinement until the residual
    /// contract `||A x - b|| <= tol ||b||` holds.
    pub fn solve(&self, b: &[f64], tol: f64) -> Result<(Vec<f64>, SolveReport), SolveError> {
        let n = self.matrix.nrows();
        if b.len() != n {
            return Err(SolveError::RhsLength {
                got: b.len(),
                expected: n,
            });
        }
        if norm2(b) == 0.0 {
            let report = SolveReport {
                relative_residual: 0.0,
                refinement_steps: 0,
                dimension: n,
                nnz: self.matrix.nnz(),
                method: self.method(),
                success: true,
            };
            return Ok((vec![0.0; n], report));
        }
        match self.method() {
            Method::Lu => self.refine(Method::Lu, b, tol),
            Method::Ldlt => match self.refine(Method::Ldlt, b, tol) {
                Ok(out) => Ok(out),
                Err(e) => {
                    log::warn!("LDL^T refinement failed ({e}), retrying with LU");
                    self.refine(Method::Lu, b, tol)
                }
            },
        }
    }
}

/// One-shot factor and solve.
pub fn solve(
    matrix: &SparseMatrix,
    rhs: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, SolveReport), SolveError> {
    DirectSolver::factor(matrix.clone())?.solve(rhs, tol)
}
