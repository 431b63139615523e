use std::collections::HashMap;

use num_traits::One;

use super::{check_minor_sets, StructError, MAX_SCHUR_WEIGHT};
use crate::arith::{Field, FloatCtx, Rational};
use crate::exprdag::{DagBuilder, ExprDag};
use crate::matrix::Matrix;

/// `V_ij = x_i^j` (zero-based `j`).
#[derive(Clone, Debug, PartialEq)]
pub struct VandermondeParams {
    pub nodes: Vec<Rational>,
}

impl VandermondeParams {
    pub fn new(nodes: Vec<Rational>) -> Self {
        VandermondeParams { nodes }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn to_matrix(&self) -> Matrix<Rational> {
        let n = self.order();
        Matrix::from_fn(n, n, |i, j| num_traits::pow(self.nodes[i].clone(), j))
    }
}

/// `prod_{i > j} (x_i - x_j)`, one difference node per pair, multiplied left
/// to right. Inputs are the nodes.
pub fn vandermonde_det(p: &VandermondeParams) -> Result<(ExprDag, Rational), StructError> {
    let n = p.order();
    let mut b = DagBuilder::new(n);
    let mut factors = Vec::new();
    for i in 1..n {
        for j in 0..i {
            let (xi, xj) = (b.input(i), b.input(j));
            factors.push(b.sub(xi, xj));
        }
    }
    let root = match b.product(&factors) {
        Some(r) => r,
        None => b.constant(Rational::one()),
    };
    let dag = b.finish(root)?;
    let v = dag.oracle_eval(&p.nodes)?;
    Ok((dag, v))
}

/// Minor on the given zero-based rows and columns (as sets).
///
/// With column exponents `e_1 < .. < e_k` the partition is
/// `lambda_b = e_{k+1-b} - (k - b)` and the minor is
/// `s_lambda(x_rows) * prod_{a < b} (x_{r_b} - x_{r_a})`.
pub fn vandermonde_minor(p: &VandermondeParams, rows: &[usize], cols: &[usize]) -> Result<Rational, StructError> {
    let n = p.order();
    let (rows, cols) = check_minor_sets(rows, cols, n, n)?;
    let k = cols.len();
    let lambda: Vec<u32> = (0..k).map(|b| (cols[k - 1 - b] - (k - 1 - b)) as u32).collect();
    let xs: Vec<Rational> = rows.iter().map(|&r| p.nodes[r].clone()).collect();
    let ctx = FloatCtx::double();
    let s = schur_function(&lambda, &xs, &ctx)?;
    let mut prod = Rational::one();
    for b in 0..k {
        for a in 0..b {
            prod *= &xs[b] - &xs[a];
        }
    }
    Ok(s * prod)
}

/// Schur function `s_lambda(x_1, .., x_m)` as the sum over semistandard
/// tableaux, built with the branching rule (strip off the horizontal strip
/// filled with `m`). Only additions and multiplications of the inputs occur,
/// so it is NIC for positive arguments.
pub fn schur_function<T: Field>(lambda: &[u32], x: &[T], ctx: &FloatCtx) -> Result<T, StructError> {
    let weight: u32 = lambda.iter().sum();
    if weight > MAX_SCHUR_WEIGHT {
        return Err(StructError::SchurTooLarge(weight));
    }
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(StructError::BadIndexSet("partition must be non-increasing".into()));
    }
    let lam: Vec<u32> = lambda.iter().copied().filter(|&p| p > 0).collect();
    let mut memo = HashMap::new();
    Ok(schur_rec(&lam, x.len(), x, ctx, &mut memo))
}

fn schur_rec<T: Field>(
    lam: &[u32],
    m: usize,
    x: &[T],
    ctx: &FloatCtx,
    memo: &mut HashMap<(Vec<u32>, usize), T>,
) -> T {
    if lam.is_empty() {
        return T::one_in(ctx);
    }
    if lam.len() > m {
        return T::zero_in(ctx);
    }
    if let Some(v) = memo.get(&(lam.to_vec(), m)) {
        return v.clone();
    }
    let total: u32 = lam.iter().sum();
    let mut strips = Vec::new();
    horizontal_strips(lam, 0, &mut Vec::new(), &mut strips);
    let mut acc: Option<T> = None;
    for mu in strips {
        let sub = schur_rec(&mu, m - 1, x, ctx, memo);
        if sub.is_exact_zero() {
            continue;
        }
        let d = total - mu.iter().sum::<u32>();
        let term = (0..d).fold(sub, |t, _| t * x[m - 1].clone());
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    let v = acc.unwrap_or_else(|| T::zero_in(ctx));
    memo.insert((lam.to_vec(), m), v.clone());
    v
}

/// All `mu` with `lam_1 >= mu_1 >= lam_2 >= mu_2 >= ..`, trailing zeros dropped.
fn horizontal_strips(lam: &[u32], i: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if i == lam.len() {
        let mut mu = cur.clone();
        while mu.last() == Some(&0) {
            mu.pop();
        }
        out.push(mu);
        return;
    }
    let lo = lam.get(i + 1).copied().unwrap_or(0);
    for v in lo..=lam[i] {
        cur.push(v);
        horizontal_strips(lam, i + 1, cur, out);
        cur.pop();
    }
}

/// Solves `V z = b` (polynomial interpolation) with the two bidiagonal
/// sweeps: Newton divided differences, then conversion to the monomial
/// basis.
pub fn vandermonde_bp_solve<T: Field>(
    p: &VandermondeParams,
    b: &[Rational],
    ctx: &FloatCtx,
) -> Result<Vec<T>, StructError> {
    let n = p.order();
    if b.len() != n {
        return Err(StructError::DimensionMismatch(format!("expected {n} right-hand side entries")));
    }
    let x: Vec<T> = p.nodes.iter().map(|v| T::from_rational(v, ctx)).collect();
    let mut c: Vec<T> = b.iter().map(|v| T::from_rational(v, ctx)).collect();
    for k in 0..n.saturating_sub(1) {
        for i in (k + 1..n).rev() {
            let den = x[i].clone() - x[i - k - 1].clone();
            if den.is_exact_zero() {
                return Err(StructError::Singular);
            }
            c[i] = (c[i].clone() - c[i - 1].clone()) / den;
        }
    }
    for k in (0..n.saturating_sub(1)).rev() {
        for i in k..n - 1 {
            c[i] = c[i].clone() - x[k].clone() * c[i + 1].clone();
        }
    }
    Ok(c)
}
