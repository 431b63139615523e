use num_traits::{Signed, Zero};

use super::StructError;
use crate::arith::{Field, FloatCtx, Rational};
use crate::matrix::{Ldu, Matrix};

/// Diagonally dominant M-matrix in the `(s, b)` parameterisation:
/// `a_ij = -b_ij` off the diagonal and `a_ii = s_i + sum_{j != i} b_ij`, so
/// `s` holds the row sums.
#[derive(Clone, Debug, PartialEq)]
pub struct MMatrixParams {
    offdiag: Matrix<Rational>,
    rowsums: Vec<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MPivot {
    None,
    /// Largest reconstructed diagonal entry, symmetric permutation.
    CompleteDiagonal,
}

impl MMatrixParams {
    /// The diagonal of `offdiag` is ignored.
    pub fn new(offdiag: Matrix<Rational>, rowsums: Vec<Rational>) -> Result<Self, StructError> {
        let n = rowsums.len();
        if offdiag.rows() != n || offdiag.cols() != n {
            return Err(StructError::DimensionMismatch("off-diagonal block must be n x n".into()));
        }
        if rowsums.iter().any(Signed::is_negative) {
            return Err(StructError::NegativeParameter("row sum".into()));
        }
        let offdiag = Matrix::from_fn(n, n, |i, j| if i == j { Rational::zero() } else { offdiag[(i, j)].clone() });
        if offdiag.to_rows().iter().flatten().any(Signed::is_negative) {
            return Err(StructError::NegativeParameter("off-diagonal magnitude".into()));
        }
        Ok(MMatrixParams { offdiag, rowsums })
    }

    pub fn order(&self) -> usize {
        self.rowsums.len()
    }

    pub fn offdiag(&self) -> &Matrix<Rational> {
        &self.offdiag
    }

    pub fn rowsums(&self) -> &[Rational] {
        &self.rowsums
    }

    pub fn to_matrix(&self) -> Matrix<Rational> {
        let n = self.order();
        Matrix::from_fn(n, n, |i, j| {
            if i == j {
                (0..n).fold(self.rowsums[i].clone(), |a, k| a + &self.offdiag[(i, k)])
            } else {
                -self.offdiag[(i, j)].clone()
            }
        })
    }
}

/// LDU of the M-matrix with every Schur complement formed on the
/// parameters: `s'_i = s_i + (b_ik / a_kk) s_k`,
/// `b'_ij = b_ij + (b_ik / a_kk) b_kj`, and each pivot rebuilt as a sum of
/// nonnegative terms.
pub fn mmatrix_ldu<T: Field>(p: &MMatrixParams, pivot: MPivot, ctx: &FloatCtx) -> Result<Ldu<T>, StructError> {
    let n = p.order();
    let order = match pivot {
        MPivot::None => (0..n).collect(),
        MPivot::CompleteDiagonal => {
            let exact: Ldu<Rational> = eliminate(p, (0..n).collect(), true, &FloatCtx::double())?;
            exact.row_perm
        }
    };
    eliminate(p, order, false, ctx)
}

fn eliminate<T: Field>(p: &MMatrixParams, order: Vec<usize>, choose: bool, ctx: &FloatCtx) -> Result<Ldu<T>, StructError> {
    let n = p.order();
    let c = |r: &Rational| T::from_rational(r, ctx);
    let mut perm = order;
    let mut s: Vec<T> = perm.iter().map(|&i| c(&p.rowsums[i])).collect();
    let mut b: Matrix<T> = Matrix::from_fn(n, n, |i, j| c(&p.offdiag[(perm[i], perm[j])]));
    let mut l = Matrix::<T>::zeros(n, n, ctx);
    let mut u = Matrix::<T>::zeros(n, n, ctx);
    let mut d = Vec::with_capacity(n);
    let diag = |s: &[T], b: &Matrix<T>, i: usize, k: usize| {
        (k..n).filter(|&j| j != i).fold(s[i].clone(), |a, j| a + b[(i, j)].clone())
    };
    for k in 0..n {
        if choose {
            let mut best = k;
            let mut best_val = diag(&s, &b, k, k);
            for i in k + 1..n {
                let v = diag(&s, &b, i, k);
                if v > best_val {
                    best = i;
                    best_val = v;
                }
            }
            s.swap(k, best);
            b.swap_rows(k, best);
            b.swap_cols(k, best);
            l.swap_rows(k, best);
            u.swap_cols(k, best);
            perm.swap(k, best);
        }
        let akk = diag(&s, &b, k, k);
        if akk.is_exact_zero() {
            return Err(StructError::SingularPivot { step: k });
        }
        for i in k + 1..n {
            l[(i, k)] = -(b[(i, k)].clone() / akk.clone());
            u[(k, i)] = -(b[(k, i)].clone() / akk.clone());
        }
        for i in k + 1..n {
            let f = b[(i, k)].clone() / akk.clone();
            if f.is_exact_zero() {
                continue;
            }
            s[i] = s[i].clone() + f.clone() * s[k].clone();
            for j in k + 1..n {
                if j != i {
                    b[(i, j)] = b[(i, j)].clone() + f.clone() * b[(k, j)].clone();
                }
            }
        }
        d.push(akk);
    }
    for i in 0..n {
        l[(i, i)] = T::one_in(ctx);
        u[(i, i)] = T::one_in(ctx);
    }
    Ok(Ldu {
        row_perm: perm.clone(),
        col_perm: perm,
        l,
        d,
        u,
        rank: n,
    })
}
