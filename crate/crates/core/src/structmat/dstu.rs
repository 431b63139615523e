use super::{StructError, MAX_TU_CHECK};
use crate::arith::{Field, FloatCtx, Rational};
use crate::matrix::{Ldu, Matrix};

/// `A = D1 Z D2` with `Z` totally unimodular.
#[derive(Clone, Debug, PartialEq)]
pub struct DstuMatrix {
    d1: Vec<Rational>,
    z: Matrix<i64>,
    d2: Vec<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DstuPivot {
    None,
    Complete,
}

impl DstuMatrix {
    /// Verifies total unimodularity by enumerating minors when the matrix is
    /// at most `MAX_TU_CHECK` on each side; beyond that `trusted` must be set.
    pub fn new(d1: Vec<Rational>, z: Matrix<i64>, d2: Vec<Rational>, trusted: bool) -> Result<Self, StructError> {
        if d1.len() != z.rows() || d2.len() != z.cols() {
            return Err(StructError::DimensionMismatch("scalings must match Z".into()));
        }
        if z.rows().max(z.cols()) > MAX_TU_CHECK {
            if !trusted {
                return Err(StructError::TooLargeToVerify);
            }
            if z.to_rows().iter().flatten().any(|v| v.abs() > 1) {
                return Err(StructError::NotTotallyUnimodular);
            }
        } else if !is_totally_unimodular(&z) {
            return Err(StructError::NotTotallyUnimodular);
        }
        Ok(DstuMatrix { d1, z, d2 })
    }

    pub fn d1(&self) -> &[Rational] {
        &self.d1
    }

    pub fn z(&self) -> &Matrix<i64> {
        &self.z
    }

    pub fn d2(&self) -> &[Rational] {
        &self.d2
    }

    pub fn to_matrix(&self) -> Matrix<Rational> {
        Matrix::from_fn(self.z.rows(), self.z.cols(), |i, j| {
            &self.d1[i] * Rational::from_integer(self.z[(i, j)].into()) * &self.d2[j]
        })
    }
}

/// Every square minor in `{-1, 0, 1}`, by enumeration.
pub fn is_totally_unimodular(z: &Matrix<i64>) -> bool {
    let (m, n) = (z.rows(), z.cols());
    for k in 1..=m.min(n) {
        for rows in subsets(m, k) {
            for cols in subsets(n, k) {
                if int_det(&z.submatrix(&rows, &cols)).abs() > 1 {
                    return false;
                }
            }
        }
    }
    true
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Bareiss fraction-free determinant.
fn int_det(a: &Matrix<i64>) -> i128 {
    let n = a.rows();
    let mut m: Vec<Vec<i128>> = (0..n).map(|i| a.row(i).iter().map(|&v| v as i128).collect()).collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(p) => {
                    m.swap(k, p);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * m[n - 1][n - 1]
    }
}

/// Gaussian elimination where an update `a_ij - a_ik a_kj / a_kk` with both
/// terms nonzero is set to exact zero, as total unimodularity forces. The
/// remaining updates are single products and quotients. Elimination stops
/// when the trailing block is zero; `rank` reports where.
pub fn dstu_ge<T: Field>(m: &DstuMatrix, pivot: DstuPivot, ctx: &FloatCtx) -> Result<Ldu<T>, StructError> {
    if pivot == DstuPivot::None {
        return eliminate(m, None, pivot, ctx);
    }
    let exact: Ldu<Rational> = eliminate(m, None, pivot, &FloatCtx::double())?;
    eliminate(m, Some((exact.row_perm, exact.col_perm)), pivot, ctx)
}

fn eliminate<T: Field>(
    m: &DstuMatrix,
    fixed: Option<(Vec<usize>, Vec<usize>)>,
    pivot: DstuPivot,
    ctx: &FloatCtx,
) -> Result<Ldu<T>, StructError> {
    let (rows, cols) = (m.z.rows(), m.z.cols());
    let choose = fixed.is_none() && pivot == DstuPivot::Complete;
    let (mut rp, mut cp) = fixed.unwrap_or_else(|| ((0..rows).collect(), (0..cols).collect()));
    let mut a: Matrix<T> = Matrix::from_fn(rows, cols, |i, j| {
        let (oi, oj) = (rp[i], cp[j]);
        let z = m.z[(oi, oj)];
        if z == 0 {
            return T::zero_in(ctx);
        }
        let v = T::from_rational(&m.d1[oi], ctx) * T::from_rational(&m.d2[oj], ctx);
        if z < 0 {
            -v
        } else {
            v
        }
    });
    let mut l = Matrix::<T>::zeros(rows, rows, ctx);
    let mut u = Matrix::<T>::zeros(rows.min(cols), cols, ctx);
    let mut d = Vec::new();
    let mut rank = 0;
    for k in 0..rows.min(cols) {
        let block_zero = (k..rows).all(|i| (k..cols).all(|j| a[(i, j)].is_exact_zero()));
        if block_zero {
            break;
        }
        if choose {
            let mut best = (k, k);
            for i in k..rows {
                for j in k..cols {
                    if a[(i, j)].magnitude() > a[best].magnitude() {
                        best = (i, j);
                    }
                }
            }
            a.swap_rows(k, best.0);
            l.swap_rows(k, best.0);
            rp.swap(k, best.0);
            a.swap_cols(k, best.1);
            u.swap_cols(k, best.1);
            cp.swap(k, best.1);
        }
        let akk = a[(k, k)].clone();
        if akk.is_exact_zero() {
            return Err(StructError::ZeroPivot { step: k });
        }
        for i in k + 1..rows {
            l[(i, k)] = a[(i, k)].clone() / akk.clone();
        }
        for j in k + 1..cols {
            u[(k, j)] = a[(k, j)].clone() / akk.clone();
        }
        for i in k + 1..rows {
            if a[(i, k)].is_exact_zero() {
                continue;
            }
            for j in k + 1..cols {
                if a[(k, j)].is_exact_zero() {
                    continue;
                }
                a[(i, j)] = if a[(i, j)].is_exact_zero() {
                    -(l[(i, k)].clone() * a[(k, j)].clone())
                } else {
                    T::zero_in(ctx)
                };
            }
        }
        d.push(akk);
        rank += 1;
    }
    let l = Matrix::from_fn(rows, rank, |i, j| if i == j { T::one_in(ctx) } else { l[(i, j)].clone() });
    let u = Matrix::from_fn(rank, cols, |i, j| if i == j { T::one_in(ctx) } else { u[(i, j)].clone() });
    Ok(Ldu {
        row_perm: rp,
        col_perm: cp,
        l,
        d,
        u,
        rank,
    })
}
