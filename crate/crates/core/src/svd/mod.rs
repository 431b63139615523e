//! Singular values and vectors from factored forms: one-sided Jacobi, the
//! rank-revealing-decomposition algorithm, and bidiagonal QR.

mod bidiag;
mod jacobi;

pub use bidiag::{bidiag_svd, householder_bidiag, svd_conventional, Bidiagonal};
pub use jacobi::jacobi_onesided;

use crate::arith::{Field, FloatCtx, Real};
use crate::matrix::{Ldu, Matrix};

/// Sweep cap for one-sided Jacobi.
pub const MAX_SWEEPS: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SvdError {
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("diagonal factor has a zero entry")]
    ZeroDiagonal,
    #[error("decomposition is not symmetric positive definite (need Y = X^T and D > 0)")]
    NotSymmetricRrd,
}

/// `A = X diag(D) Y` with `X` `m x r`, `Y` `r x n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rrd<T> {
    pub x: Matrix<T>,
    pub d: Vec<T>,
    pub y: Matrix<T>,
    pub kappa_x: Option<f64>,
    pub kappa_y: Option<f64>,
}

impl<T: Field> Rrd<T> {
    pub fn new(x: Matrix<T>, d: Vec<T>, y: Matrix<T>) -> Result<Self, SvdError> {
        if x.cols() != d.len() || y.rows() != d.len() {
            return Err(SvdError::DimensionMismatch("X, D, Y do not conform".into()));
        }
        if d.iter().any(Field::is_exact_zero) {
            return Err(SvdError::ZeroDiagonal);
        }
        Ok(Rrd { x, d, y, kappa_x: None, kappa_y: None })
    }

    /// `X diag(D) X^T`.
    pub fn symmetric(x: Matrix<T>, d: Vec<T>) -> Result<Self, SvdError> {
        let y = x.transpose();
        Rrd::new(x, d, y)
    }

    /// Undoes the pivoting of an LDU factorisation: `X = P^T L`, `Y = U Q^T`.
    pub fn from_ldu(f: &Ldu<T>, ctx: &FloatCtx) -> Result<Self, SvdError> {
        let (m, n, r) = (f.l.rows(), f.u.cols(), f.rank);
        let mut x = Matrix::zeros(m, r, ctx);
        for i in 0..m {
            for k in 0..r {
                x[(f.row_perm[i], k)] = f.l[(i, k)].clone();
            }
        }
        let mut y = Matrix::zeros(r, n, ctx);
        for k in 0..r {
            for j in 0..n {
                y[(k, f.col_perm[j])] = f.u[(k, j)].clone();
            }
        }
        Rrd::new(x, f.d.clone(), y)
    }

    pub fn assemble(&self, ctx: &FloatCtx) -> Matrix<T> {
        self.x.scale_cols(&self.d).matmul(&self.y, ctx)
    }
}

impl<T: Real> Rrd<T> {
    /// Fills `kappa_x`, `kappa_y` from Jacobi SVDs of the factors.
    pub fn estimate_kappas(&mut self, ctx: &FloatCtx) -> Result<(), SvdError> {
        self.kappa_x = Some(kappa(&self.x, ctx)?);
        self.kappa_y = Some(kappa(&self.y.transpose(), ctx)?);
        Ok(())
    }

    /// `max(kappa_x, kappa_y)`, estimating first if needed.
    pub fn kappa(&mut self, ctx: &FloatCtx) -> Result<f64, SvdError> {
        if self.kappa_x.is_none() || self.kappa_y.is_none() {
            self.estimate_kappas(ctx)?;
        }
        Ok(self.kappa_x.unwrap_or(f64::INFINITY).max(self.kappa_y.unwrap_or(f64::INFINITY)))
    }
}

fn kappa<T: Real>(a: &Matrix<T>, ctx: &FloatCtx) -> Result<f64, SvdError> {
    let s = jacobi_onesided(a, ctx)?;
    let hi = s.sigma.first().map_or(0.0, Field::approx_f64);
    let lo = s.sigma.last().map_or(0.0, Field::approx_f64);
    Ok(if lo == 0.0 { f64::INFINITY } else { hi / lo })
}

/// `A = U diag(sigma) V^T`, `sigma` descending and nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct SvdResult<T> {
    pub u: Matrix<T>,
    pub sigma: Vec<T>,
    pub v: Matrix<T>,
    /// `||A - U S V^T||_F / ||A||_F` when the input was available.
    pub residual: Option<f64>,
}

impl<T: Real> SvdResult<T> {
    pub fn sigma_f64(&self) -> Vec<f64> {
        self.sigma.iter().map(Field::approx_f64).collect()
    }

    pub fn reconstruct(&self, ctx: &FloatCtx) -> Matrix<T> {
        self.u.scale_cols(&self.sigma).matmul(&self.v.transpose(), ctx)
    }
}

/// Relative Frobenius distance, evaluated in `f64`.
pub(crate) fn rel_frobenius<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let d = (a[(i, j)].clone() - b[(i, j)].clone()).approx_f64();
            num += d * d;
            den += a[(i, j)].approx_f64().powi(2);
        }
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// Singular values of `X D Y`:
/// 1. `X D = U1 S1 V1^T` by one-sided Jacobi,
/// 2. `W = S1 (V1^T Y)` with that parenthesisation,
/// 3. `W = U2 S V^T` by one-sided Jacobi on `W^T`,
/// 4. `U = U1 U2`.
pub fn rrd_svd<T: Real>(r: &Rrd<T>, ctx: &FloatCtx) -> Result<SvdResult<T>, SvdError> {
    if r.x.rows() < r.x.cols() || r.y.cols() < r.y.rows() {
        return Err(SvdError::DimensionMismatch("rank exceeds matrix dimensions".into()));
    }
    let xd = r.x.scale_cols(&r.d);
    let s1 = jacobi_onesided(&xd, ctx)?;
    let w = s1.v.transpose().matmul(&r.y, ctx).scale_rows(&s1.sigma);
    let s2 = jacobi_onesided(&w.transpose(), ctx)?;
    // W^T = P S Q^T, so W = Q S P^T
    let u = s1.u.matmul(&s2.v, ctx);
    let mut out = SvdResult {
        u,
        sigma: s2.sigma,
        v: s2.u,
        residual: None,
    };
    out.residual = Some(rel_frobenius(&r.assemble(ctx), &out.reconstruct(ctx)));
    Ok(out)
}

/// Eigenvalues of the positive definite `X D X^T`, which equal its
/// singular values.
pub fn posdef_evd_via_rrd<T: Real>(r: &Rrd<T>, ctx: &FloatCtx) -> Result<Vec<T>, SvdError> {
    let zero = T::zero_in(ctx);
    if r.y != r.x.transpose() || r.d.iter().any(|d| *d <= zero) {
        return Err(SvdError::NotSymmetricRrd);
    }
    Ok(rrd_svd(r, ctx)?.sigma)
}
