//! Reference implementations in exact rational arithmetic: cofactor and
//! elimination determinants, inverses, solves and pivoted LDU. These are the
//! oracles the structured kernels are checked against.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::arith::{FloatCtx, Rational};
use crate::matrix::{Ldu, Matrix};

/// Determinant by Laplace expansion along rows, memoised over column subsets.
pub fn det_cofactor(a: &Matrix<Rational>) -> Rational {
    assert!(a.is_square(), "square matrix");
    let n = a.rows();
    assert!(n <= 20, "cofactor expansion limited to n <= 20");
    let mut memo: HashMap<u32, Rational> = HashMap::new();
    fn rec(a: &Matrix<Rational>, row: usize, cols: u32, memo: &mut HashMap<u32, Rational>) -> Rational {
        if row == a.rows() {
            return Rational::one();
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = Rational::zero();
        let mut sign = true;
        for j in 0..a.cols() {
            if cols >> j & 1 == 0 {
                continue;
            }
            let e = &a[(row, j)];
            if !e.is_zero() {
                let sub = rec(a, row + 1, cols & !(1 << j), memo);
                let t = e * sub;
                if sign {
                    acc += t;
                } else {
                    acc -= t;
                }
            }
            sign = !sign;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    let all = if n == 0 { 0 } else { (1u32 << n) - 1 };
    rec(a, 0, all, &mut memo)
}

/// Minor with the given (zero-based) row and column index lists.
pub fn minor(a: &Matrix<Rational>, rows: &[usize], cols: &[usize]) -> Rational {
    det_cofactor(&a.submatrix(rows, cols))
}

/// Determinant by Gaussian elimination with row pivoting on nonzeros.
pub fn det_ge(a: &Matrix<Rational>) -> Rational {
    assert!(a.is_square(), "square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut det = Rational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[(i, k)].is_zero()) else {
            return Rational::zero();
        };
        if p != k {
            m.swap_rows(p, k);
            det = -det;
        }
        let piv = m[(k, k)].clone();
        det *= &piv;
        for i in k + 1..n {
            let f = &m[(i, k)] / &piv;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let t = &f * &m[(k, j)];
                m[(i, j)] -= t;
            }
        }
    }
    det
}

/// Solves `a z = b`; `None` if singular.
pub fn solve(a: &Matrix<Rational>, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.rows();
    assert!(a.is_square() && b.len() == n);
    let mut m = Matrix::from_fn(n, n + 1, |i, j| if j < n { a[(i, j)].clone() } else { b[i].clone() });
    for k in 0..n {
        let p = (k..n).find(|&i| !m[(i, k)].is_zero())?;
        m.swap_rows(p, k);
        let piv = m[(k, k)].clone();
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = &m[(i, k)] / &piv;
            if f.is_zero() {
                continue;
            }
            for j in k..=n {
                let t = &f * &m[(k, j)];
                m[(i, j)] -= t;
            }
        }
    }
    Some((0..n).map(|i| &m[(i, n)] / &m[(i, i)]).collect())
}

/// Inverse; `None` if singular.
pub fn inverse(a: &Matrix<Rational>) -> Option<Matrix<Rational>> {
    let n = a.rows();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Rational> = (0..n).map(|i| if i == j { Rational::one() } else { Rational::zero() }).collect();
        cols.push(solve(a, &e)?);
    }
    Some(Matrix::from_fn(n, n, |i, j| cols[j][i].clone()))
}

/// Pivot rule for [`ldu`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OraclePivot {
    /// No pivoting; stops at the first zero pivot.
    None,
    /// Largest magnitude in the trailing block, first in row-major order on ties.
    Complete,
    /// Largest diagonal entry of the trailing block (symmetric permutation).
    Diagonal,
}

/// Exact LDU by Gaussian elimination. Elimination stops when the trailing
/// block has no admissible nonzero pivot; `rank` is the number of steps
/// taken.
pub fn ldu(a: &Matrix<Rational>, pivot: OraclePivot) -> Ldu<Rational> {
    let (n, mcols) = (a.rows(), a.cols());
    let mut m = a.clone();
    let mut rp: Vec<usize> = (0..n).collect();
    let mut cp: Vec<usize> = (0..mcols).collect();
    let kmax = n.min(mcols);
    let mut rank = 0;
    for k in 0..kmax {
        let choice = match pivot {
            OraclePivot::None => (!m[(k, k)].is_zero()).then_some((k, k)),
            OraclePivot::Complete => {
                let mut best: Option<(usize, usize)> = None;
                for i in k..n {
                    for j in k..mcols {
                        if !m[(i, j)].is_zero() && best.map_or(true, |(bi, bj)| m[(i, j)].abs() > m[(bi, bj)].abs()) {
                            best = Some((i, j));
                        }
                    }
                }
                best
            }
            OraclePivot::Diagonal => {
                let mut best: Option<usize> = None;
                for i in k..kmax {
                    if !m[(i, i)].is_zero() && best.map_or(true, |b| m[(i, i)].abs() > m[(b, b)].abs()) {
                        best = Some(i);
                    }
                }
                best.map(|i| (i, i))
            }
        };
        let Some((pi, pj)) = choice else { break };
        m.swap_rows(k, pi);
        rp.swap(k, pi);
        m.swap_cols(k, pj);
        cp.swap(k, pj);
        let piv = m[(k, k)].clone();
        for i in k + 1..n {
            let f = &m[(i, k)] / &piv;
            for j in k + 1..mcols {
                let t = &f * &m[(k, j)];
                m[(i, j)] -= t;
            }
            m[(i, k)] = f;
        }
        for j in k + 1..mcols {
            m[(k, j)] = &m[(k, j)] / &piv;
        }
        rank += 1;
    }
    let l = Matrix::from_fn(n, rank, |i, j| {
        if i == j {
            Rational::one()
        } else if i > j {
            m[(i, j)].clone()
        } else {
            Rational::zero()
        }
    });
    let u = Matrix::from_fn(rank, mcols, |i, j| {
        if i == j {
            Rational::one()
        } else if j > i {
            m[(i, j)].clone()
        } else {
            Rational::zero()
        }
    });
    let d = (0..rank).map(|k| m[(k, k)].clone()).collect();
    Ldu {
        row_perm: rp,
        col_perm: cp,
        l,
        d,
        u,
        rank,
    }
}

/// Exact product check helper: `ldu.assemble() == a`.
pub fn ldu_reproduces(f: &Ldu<Rational>, a: &Matrix<Rational>) -> bool {
    &f.assemble(&FloatCtx::double()) == a
}
