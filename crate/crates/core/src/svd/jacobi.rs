use super::{rel_frobenius, SvdError, SvdResult, MAX_SWEEPS};
use crate::arith::{Field, FloatCtx, Real};
use crate::matrix::Matrix;

/// One-sided Jacobi SVD of an `m x n` matrix, `m >= n`.
///
/// Column pairs are visited cyclically by rows; a pair is rotated when
/// `|a_i . a_j| > n eps ||a_i|| ||a_j||`. Singular values are the final
/// column norms.
pub fn jacobi_onesided<T: Real>(a: &Matrix<T>, ctx: &FloatCtx) -> Result<SvdResult<T>, SvdError> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(SvdError::DimensionMismatch(format!("need rows >= cols, got {m} x {n}")));
    }
    let zero = T::zero_in(ctx);
    let one = T::one_in(ctx);
    let two = T::of_int(2, ctx);
    let tol = T::of_int(n.max(1) as i64, ctx) * T::eps_in(ctx);
    let mut g = a.clone();
    let mut v = Matrix::<T>::identity(n, ctx);
    let dot = |g: &Matrix<T>, i: usize, j: usize| (0..m).fold(zero.clone(), |s, k| s + g[(k, i)].clone() * g[(k, j)].clone());
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let alpha = dot(&g, i, i);
                let beta = dot(&g, j, j);
                let gamma = dot(&g, i, j);
                if gamma.is_exact_zero() || gamma.magnitude() <= tol.clone() * alpha.clone().sqrt() * beta.clone().sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (two.clone() * gamma);
                let za = zeta.magnitude();
                let root = if za > one {
                    let inv = one.clone() / za.clone();
                    za.clone() * (one.clone() + inv.clone() * inv).sqrt()
                } else {
                    (one.clone() + za.clone() * za.clone()).sqrt()
                };
                let mut t = one.clone() / (za + root);
                if zeta < zero {
                    t = -t;
                }
                let c = one.clone() / (one.clone() + t.clone() * t.clone()).sqrt();
                let s = c.clone() * t;
                rotate(&mut g, i, j, &c, &s);
                rotate(&mut v, i, j, &c, &s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(SvdError::NoConvergence(MAX_SWEEPS));
    }
    let norms: Vec<T> = (0..n).map(|j| dot(&g, j, j).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| norms[q].partial_cmp(&norms[p]).expect("comparable"));
    let sigma: Vec<T> = order.iter().map(|&j| norms[j].clone()).collect();
    let u = Matrix::from_fn(m, n, |k, c| {
        let j = order[c];
        if norms[j].is_exact_zero() {
            zero.clone()
        } else {
            g[(k, j)].clone() / norms[j].clone()
        }
    });
    let v = Matrix::from_fn(n, n, |k, c| v[(k, order[c])].clone());
    let mut out = SvdResult { u, sigma, v, residual: None };
    out.residual = Some(rel_frobenius(a, &out.reconstruct(ctx)));
    Ok(out)
}

/// `[a_i, a_j] <- [c a_i - s a_j, s a_i + c a_j]`.
fn rotate<T: Field>(g: &mut Matrix<T>, i: usize, j: usize, c: &T, s: &T) {
    for k in 0..g.rows() {
        let (x, y) = (g[(k, i)].clone(), g[(k, j)].clone());
        g[(k, i)] = c.clone() * x.clone() - s.clone() * y.clone();
        g[(k, j)] = s.clone() * x + c.clone() * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_permutation() {
        let ctx = FloatCtx::double();
        let s = jacobi_onesided(&Matrix::from_rows(vec![vec![3.0, 0.0], vec![0.0, 2.0]]), &ctx).unwrap();
        assert_eq!(s.sigma, vec![3.0, 2.0]);
        assert_eq!(s.u, Matrix::identity(2, &ctx));
        assert_eq!(s.v, Matrix::identity(2, &ctx));
        let p = jacobi_onesided(&Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]), &ctx).unwrap();
        assert_eq!(p.sigma, vec![1.0, 1.0]);
    }

    #[test]
    fn small_dense() {
        let ctx = FloatCtx::double();
        let a = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0], vec![0.0, 0.0]]);
        let s = jacobi_onesided(&a, &ctx).unwrap();
        assert!((s.sigma[0] - 3.0).abs() < 1e-15 && (s.sigma[1] - 1.0).abs() < 1e-15);
        assert!(s.residual.unwrap() < 1e-15);
    }

    #[test]
    fn wide_rejected() {
        let ctx = FloatCtx::double();
        assert!(jacobi_onesided(&Matrix::from_rows(vec![vec![1.0, 2.0]]), &ctx).is_err());
    }
}
