use num_traits::{One, Zero};

use super::StructError;
use crate::arith::{Field, FloatCtx, Rational};
use crate::exprdag::{DagBuilder, ExprDag, NodeId};
use crate::matrix::{Ldu, Matrix};

/// `a_ij = u_i v_j / (x_i + y_j)`; the scalings default to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyParams {
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
    pub u: Option<Vec<Rational>>,
    pub v: Option<Vec<Rational>>,
}

impl CauchyParams {
    pub fn new(x: Vec<Rational>, y: Vec<Rational>) -> Self {
        CauchyParams { x, y, u: None, v: None }
    }

    pub fn scaled(x: Vec<Rational>, y: Vec<Rational>, u: Vec<Rational>, v: Vec<Rational>) -> Result<Self, StructError> {
        if u.len() != x.len() || v.len() != y.len() {
            return Err(StructError::DimensionMismatch("scalings must match node counts".into()));
        }
        Ok(CauchyParams { x, y, u: Some(u), v: Some(v) })
    }

    /// Hilbert matrix `1/(i + j - 1)`: `x = (1..n)`, `y = (0..n-1)`.
    pub fn hilbert(n: usize) -> Self {
        let r = |k: usize| Rational::from_integer((k as i64).into());
        CauchyParams::new((1..=n).map(r).collect(), (0..n).map(r).collect())
    }

    pub fn rows(&self) -> usize {
        self.x.len()
    }

    pub fn cols(&self) -> usize {
        self.y.len()
    }

    fn is_scaled(&self) -> bool {
        self.u.is_some() || self.v.is_some()
    }

    fn u_at(&self, i: usize) -> Rational {
        self.u.as_ref().map_or_else(Rational::one, |u| u[i].clone())
    }

    fn v_at(&self, j: usize) -> Rational {
        self.v.as_ref().map_or_else(Rational::one, |v| v[j].clone())
    }

    pub fn check(&self) -> Result<(), StructError> {
        for (i, xi) in self.x.iter().enumerate() {
            for (j, yj) in self.y.iter().enumerate() {
                if (xi + yj).is_zero() {
                    return Err(StructError::EntryUndefined { i, j });
                }
            }
        }
        Ok(())
    }

    pub fn entry(&self, i: usize, j: usize) -> Result<Rational, StructError> {
        let s = &self.x[i] + &self.y[j];
        if s.is_zero() {
            return Err(StructError::EntryUndefined { i, j });
        }
        Ok(self.u_at(i) * self.v_at(j) / s)
    }

    pub fn to_matrix(&self) -> Result<Matrix<Rational>, StructError> {
        self.check()?;
        Ok(Matrix::from_fn(self.rows(), self.cols(), |i, j| self.entry(i, j).expect("checked")))
    }

    /// DAG input vector: `x`, `y`, then `u` and `v` when scaled.
    pub fn dag_inputs(&self) -> Vec<Rational> {
        let n = self.rows();
        let mut v: Vec<Rational> = self.x.iter().chain(&self.y).cloned().collect();
        if self.is_scaled() {
            v.extend((0..n).map(|i| self.u_at(i)));
            v.extend((0..self.cols()).map(|j| self.v_at(j)));
        }
        v
    }

    fn input_count(&self) -> usize {
        if self.is_scaled() {
            2 * (self.rows() + self.cols())
        } else {
            self.rows() + self.cols()
        }
    }
}

struct Inputs {
    n: usize,
    m: usize,
}

impl Inputs {
    fn x(&self, b: &mut DagBuilder, i: usize) -> NodeId {
        b.input(i)
    }
    fn y(&self, b: &mut DagBuilder, j: usize) -> NodeId {
        b.input(self.n + j)
    }
    fn u(&self, b: &mut DagBuilder, i: usize) -> NodeId {
        b.input(self.n + self.m + i)
    }
    fn v(&self, b: &mut DagBuilder, j: usize) -> NodeId {
        b.input(2 * self.n + self.m + j)
    }
}

fn quotient(b: &mut DagBuilder, num: &[NodeId], den: &[NodeId]) -> NodeId {
    let d = b.product(den).expect("nonempty denominator");
    match b.product(num) {
        Some(n) => b.div(n, d),
        None => {
            let one = b.constant(Rational::one());
            b.div(one, d)
        }
    }
}

/// Determinant as a quotient of products of node differences, sums and
/// scalings. Inputs follow [`CauchyParams::dag_inputs`].
pub fn cauchy_det(p: &CauchyParams) -> Result<(ExprDag, Rational), StructError> {
    let n = p.rows();
    if n != p.cols() || n == 0 {
        return Err(StructError::NotSquare);
    }
    p.check()?;
    let io = Inputs { n, m: n };
    let mut b = DagBuilder::new(p.input_count());
    let mut num = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (xi, xj) = (io.x(&mut b, i), io.x(&mut b, j));
            num.push(b.sub(xj, xi));
            let (yi, yj) = (io.y(&mut b, i), io.y(&mut b, j));
            num.push(b.sub(yj, yi));
        }
    }
    if p.is_scaled() {
        for i in 0..n {
            let u = io.u(&mut b, i);
            num.push(u);
        }
        for j in 0..n {
            let v = io.v(&mut b, j);
            num.push(v);
        }
    }
    let mut den = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (xi, yj) = (io.x(&mut b, i), io.y(&mut b, j));
            den.push(b.add(xi, yj));
        }
    }
    let root = quotient(&mut b, &num, &den);
    let dag = b.finish(root)?;
    let val = dag.oracle_eval(&p.dag_inputs())?;
    Ok((dag, val))
}

fn check_nonsingular(p: &CauchyParams) -> Result<usize, StructError> {
    let n = p.rows();
    if n != p.cols() || n == 0 {
        return Err(StructError::NotSquare);
    }
    p.check()?;
    let distinct = |v: &[Rational]| (0..v.len()).all(|i| (i + 1..v.len()).all(|j| v[i] != v[j]));
    let nonzero = |s: &Option<Vec<Rational>>| s.as_ref().map_or(true, |s| s.iter().all(|a| !a.is_zero()));
    if !distinct(&p.x) || !distinct(&p.y) || !nonzero(&p.u) || !nonzero(&p.v) {
        return Err(StructError::Singular);
    }
    Ok(n)
}

/// Entries of the inverse, each a quotient of products of sums and
/// differences of the parameters.
pub fn cauchy_inverse(p: &CauchyParams) -> Result<Matrix<ExprDag>, StructError> {
    let n = check_nonsingular(p)?;
    let io = Inputs { n, m: n };
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut b = DagBuilder::new(p.input_count());
            let mut num = Vec::new();
            for k in 0..n {
                let (xj, yk) = (io.x(&mut b, j), io.y(&mut b, k));
                num.push(b.add(xj, yk));
                let (xk, yi) = (io.x(&mut b, k), io.y(&mut b, i));
                num.push(b.add(xk, yi));
            }
            let (xj, yi) = (io.x(&mut b, j), io.y(&mut b, i));
            let mut den = vec![b.add(xj, yi)];
            for k in (0..n).filter(|&k| k != j) {
                let xk = io.x(&mut b, k);
                den.push(b.sub(xj, xk));
            }
            for k in (0..n).filter(|&k| k != i) {
                let yk = io.y(&mut b, k);
                den.push(b.sub(yi, yk));
            }
            if p.is_scaled() {
                let v = io.v(&mut b, i);
                let u = io.u(&mut b, j);
                den.push(v);
                den.push(u);
            }
            let root = quotient(&mut b, &num, &den);
            out.push(b.finish(root)?);
        }
    }
    let mut it = out.into_iter();
    Ok(Matrix::from_fn(n, n, |_, _| it.next().expect("n*n entries")))
}

/// Exact values of [`cauchy_inverse`].
pub fn cauchy_inverse_values(p: &CauchyParams) -> Result<Matrix<Rational>, StructError> {
    let dags = cauchy_inverse(p)?;
    let x = p.dag_inputs();
    let vals: Result<Vec<Rational>, _> = dags.to_rows().iter().flatten().map(|d| d.oracle_eval(&x)).collect();
    let vals = vals?;
    Ok(Matrix::from_fn(p.rows(), p.rows(), |i, j| vals[i * p.rows() + j].clone()))
}

/// Gaussian elimination with complete pivoting, using the structured
/// Schur-complement update
/// `a'_ij = a_ij (x_i - x_k)(y_j - y_k) / ((x_k + y_j)(x_i + y_k))`.
///
/// The pivot order comes from an exact rational pass; the run in `T` then
/// works on the permuted parameters without further pivoting.
pub fn cauchy_gecp_ldu<T: Field>(p: &CauchyParams, ctx: &FloatCtx) -> Result<Ldu<T>, StructError> {
    check_nonsingular(p)?;
    let exact: Ldu<Rational> = eliminate(p, None, &FloatCtx::double())?;
    let perm = (exact.row_perm, exact.col_perm);
    eliminate(p, Some(perm), ctx)
}

fn eliminate<T: Field>(
    p: &CauchyParams,
    fixed: Option<(Vec<usize>, Vec<usize>)>,
    ctx: &FloatCtx,
) -> Result<Ldu<T>, StructError> {
    let n = p.rows();
    let c = |r: &Rational| T::from_rational(r, ctx);
    let (rp, cp) = fixed.clone().unwrap_or_else(|| ((0..n).collect(), (0..n).collect()));
    let mut x: Vec<T> = rp.iter().map(|&i| c(&p.x[i])).collect();
    let mut y: Vec<T> = cp.iter().map(|&j| c(&p.y[j])).collect();
    let mut u: Vec<T> = rp.iter().map(|&i| c(&p.u_at(i))).collect();
    let mut v: Vec<T> = cp.iter().map(|&j| c(&p.v_at(j))).collect();
    let (mut rp, mut cp) = (rp, cp);
    let scaled = p.is_scaled();
    let mut a: Matrix<T> = Matrix::from_fn(n, n, |i, j| {
        let s = x[i].clone() + y[j].clone();
        if scaled {
            u[i].clone() * v[j].clone() / s
        } else {
            T::one_in(ctx) / s
        }
    });
    let mut l = Matrix::<T>::zeros(n, n, ctx);
    let mut uu = Matrix::<T>::zeros(n, n, ctx);
    let mut d = Vec::with_capacity(n);
    for k in 0..n {
        if fixed.is_none() {
            let mut best = (k, k);
            for i in k..n {
                for j in k..n {
                    if a[(i, j)].magnitude() > a[best].magnitude() {
                        best = (i, j);
                    }
                }
            }
            let (bi, bj) = best;
            a.swap_rows(k, bi);
            l.swap_rows(k, bi);
            x.swap(k, bi);
            u.swap(k, bi);
            rp.swap(k, bi);
            a.swap_cols(k, bj);
            uu.swap_cols(k, bj);
            y.swap(k, bj);
            v.swap(k, bj);
            cp.swap(k, bj);
        }
        let piv = a[(k, k)].clone();
        if piv.is_exact_zero() {
            return Err(StructError::Singular);
        }
        for i in k + 1..n {
            l[(i, k)] = a[(i, k)].clone() / piv.clone();
            uu[(k, i)] = a[(k, i)].clone() / piv.clone();
        }
        for i in k + 1..n {
            let ri = (x[i].clone() - x[k].clone()) / (x[i].clone() + y[k].clone());
            for j in k + 1..n {
                let cj = (y[j].clone() - y[k].clone()) / (x[k].clone() + y[j].clone());
                a[(i, j)] = a[(i, j)].clone() * ri.clone() * cj;
            }
        }
        d.push(piv);
    }
    let lfix = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            T::one_in(ctx)
        } else if i > j {
            l[(i, j)].clone()
        } else {
            T::zero_in(ctx)
        }
    });
    let ufix = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            T::one_in(ctx)
        } else if j > i {
            uu[(i, j)].clone()
        } else {
            T::zero_in(ctx)
        }
    });
    Ok(Ldu {
        row_perm: rp,
        col_perm: cp,
        l: lfix,
        d,
        u: ufix,
        rank: n,
    })
}
