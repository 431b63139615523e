use num_traits::{One, Signed, Zero};

use super::StructError;
use crate::arith::{Field, FloatCtx, Rational};
use crate::matrix::Matrix;

/// Bidiagonal decomposition
/// `A = L(1) .. L(n-1) D U(n-1) .. U(1)` of a nonsingular totally
/// nonnegative matrix, stored as one `n x n` array: `b[i][j]` for `i > j` is
/// the Neville multiplier of row `i` in column `j`, `b[i][i] = d_i`, and
/// `b[i][j]` for `i < j` is the multiplier of column `j` in row `i` (Neville
/// elimination on the transpose).
#[derive(Clone, Debug, PartialEq)]
pub struct BidiagDecomp {
    b: Matrix<Rational>,
}

impl BidiagDecomp {
    pub fn new(params: Matrix<Rational>) -> Result<Self, StructError> {
        if !params.is_square() {
            return Err(StructError::NotSquare);
        }
        if params.to_rows().iter().flatten().any(Signed::is_negative) {
            return Err(StructError::NegativeParameter("bidiagonal factor".into()));
        }
        Ok(BidiagDecomp { b: params })
    }

    pub fn order(&self) -> usize {
        self.b.rows()
    }

    pub fn params(&self) -> &Matrix<Rational> {
        &self.b
    }

    pub fn diag(&self) -> Vec<Rational> {
        (0..self.order()).map(|i| self.b[(i, i)].clone()).collect()
    }

    pub fn lower(&self, i: usize, j: usize) -> &Rational {
        assert!(i > j);
        &self.b[(i, j)]
    }

    pub fn upper(&self, i: usize, j: usize) -> &Rational {
        assert!(i < j);
        &self.b[(i, j)]
    }
}

/// Exact Neville elimination of the rows: returns the multipliers
/// `m[i][j]` (`i > j`) and the pivots on the diagonal.
fn neville(a: &Matrix<Rational>) -> Result<Matrix<Rational>, StructError> {
    let n = a.rows();
    let mut m = a.clone();
    let mut out = Matrix::from_fn(n, n, |_, _| Rational::zero());
    for j in 0..n {
        for i in (j + 1..n).rev() {
            let piv = m[(i - 1, j)].clone();
            let mult = if piv.is_zero() {
                if !m[(i, j)].is_zero() {
                    return Err(StructError::NotTotallyNonnegative);
                }
                Rational::zero()
            } else {
                &m[(i, j)] / &piv
            };
            if !mult.is_zero() {
                for k in j..n {
                    let t = &mult * &m[(i - 1, k)];
                    m[(i, k)] -= t;
                }
            }
            out[(i, j)] = mult;
        }
    }
    for i in 0..n {
        out[(i, i)] = m[(i, i)].clone();
    }
    Ok(out)
}

/// Bidiagonal decomposition by exact Neville elimination on rows and
/// columns. Fails unless every parameter is nonnegative and every pivot
/// positive.
pub fn bd_from_matrix_exact(a: &Matrix<Rational>) -> Result<BidiagDecomp, StructError> {
    if !a.is_square() {
        return Err(StructError::NotSquare);
    }
    let n = a.rows();
    let rows = neville(a)?;
    let cols = neville(&a.transpose())?;
    let b = Matrix::from_fn(n, n, |i, j| if i >= j { rows[(i, j)].clone() } else { cols[(j, i)].clone() });
    let negative = b.to_rows().iter().flatten().any(Signed::is_negative);
    if negative || (0..n).any(|i| !b[(i, i)].is_positive()) {
        return Err(StructError::NotTotallyNonnegative);
    }
    Ok(BidiagDecomp { b })
}

/// Multiplies the factors out from left to right; every operation adds or
/// multiplies nonnegative numbers. Parameters are converted to `T` once.
pub fn bd_assemble<T: Field>(bd: &BidiagDecomp, ctx: &FloatCtx) -> Matrix<T> {
    let n = bd.order();
    let p = |i: usize, j: usize| T::from_rational(&bd.b[(i, j)], ctx);
    let mut acc = Matrix::<T>::identity(n, ctx);
    // times L(k): column c gains l_{c+1} times column c+1
    for k in 1..n {
        for i in n - k..n {
            let l = p(i, i - (n - k));
            if l.is_exact_zero() {
                continue;
            }
            let c = i - 1;
            for r in 0..n {
                let t = acc[(r, i)].clone() * l.clone();
                acc[(r, c)] = acc[(r, c)].clone() + t;
            }
        }
    }
    let d: Vec<T> = (0..n).map(|i| p(i, i)).collect();
    acc = acc.scale_cols(&d);
    // times U(k) for k = n-1 down to 1: column i gains u times column i-1
    for k in (1..n).rev() {
        for i in (n - k..n).rev() {
            let u = p(i - (n - k), i);
            if u.is_exact_zero() {
                continue;
            }
            for r in 0..n {
                let t = acc[(r, i - 1)].clone() * u.clone();
                acc[(r, i)] = acc[(r, i)].clone() + t;
            }
        }
    }
    acc
}

/// Product of the pivots.
pub fn bd_det(bd: &BidiagDecomp) -> Rational {
    (0..bd.order()).fold(Rational::one(), |a, i| a * &bd.b[(i, i)])
}
