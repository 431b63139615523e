use super::SvdError;
use crate::arith::{Field, FloatCtx, Real};
use crate::matrix::Matrix;

/// Upper bidiagonal matrix; zeros anywhere are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct Bidiagonal<T> {
    pub diag: Vec<T>,
    pub superdiag: Vec<T>,
}

impl<T: Field> Bidiagonal<T> {
    pub fn new(diag: Vec<T>, superdiag: Vec<T>) -> Result<Self, SvdError> {
        if superdiag.len() + 1 != diag.len().max(1) {
            return Err(SvdError::DimensionMismatch("superdiagonal must have n - 1 entries".into()));
        }
        Ok(Bidiagonal { diag, superdiag })
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn to_matrix(&self, ctx: &FloatCtx) -> Matrix<T> {
        let n = self.order();
        let mut m = Matrix::zeros(n, n, ctx);
        for i in 0..n {
            m[(i, i)] = self.diag[i].clone();
            if i + 1 < n {
                m[(i, i + 1)] = self.superdiag[i].clone();
            }
        }
        m
    }
}

fn max<T: Field>(a: T, b: T) -> T {
    if a >= b {
        a
    } else {
        b
    }
}

fn min<T: Field>(a: T, b: T) -> T {
    if a <= b {
        a
    } else {
        b
    }
}

/// `(c, s, r)` with `[c s; -s c] [f; g] = [r; 0]`.
fn rot<T: Real>(f: &T, g: &T, ctx: &FloatCtx) -> (T, T, T) {
    if g.is_exact_zero() {
        return (T::one_in(ctx), T::zero_in(ctx), f.clone());
    }
    if f.is_exact_zero() {
        return (T::zero_in(ctx), T::one_in(ctx), g.clone());
    }
    let (fa, ga) = (f.magnitude(), g.magnitude());
    let big = max(fa, ga);
    let (fs, gs) = (f.clone() / big.clone(), g.clone() / big.clone());
    let r = big * (fs.clone() * fs.clone() + gs.clone() * gs.clone()).sqrt();
    (f.clone() / r.clone(), g.clone() / r.clone(), r)
}

/// Singular values of `[f g; 0 h]`, smaller first, to high relative accuracy.
fn sv2<T: Real>(f: &T, g: &T, h: &T, ctx: &FloatCtx) -> (T, T) {
    let one = T::one_in(ctx);
    let two = T::of_int(2, ctx);
    let (fa, ga, ha) = (f.magnitude(), g.magnitude(), h.magnitude());
    let fhmn = min(fa.clone(), ha.clone());
    let fhmx = max(fa, ha);
    if fhmn.is_exact_zero() {
        let smax = if fhmx.is_exact_zero() {
            ga
        } else {
            let (a, b) = (max(fhmx.clone(), ga.clone()), min(fhmx, ga));
            let q = b / a.clone();
            a * (one + q.clone() * q).sqrt()
        };
        return (T::zero_in(ctx), smax);
    }
    if ga < fhmx {
        let as_ = one.clone() + fhmn.clone() / fhmx.clone();
        let at = (fhmx.clone() - fhmn.clone()) / fhmx.clone();
        let au = (ga.clone() / fhmx.clone()) * (ga / fhmx.clone());
        let c = two / ((as_.clone() * as_ + au.clone()).sqrt() + (at.clone() * at + au).sqrt());
        (fhmn * c.clone(), fhmx / c)
    } else {
        let au = fhmx.clone() / ga.clone();
        if au.is_exact_zero() {
            return ((fhmn * fhmx) / ga.clone(), ga);
        }
        let as_ = one.clone() + fhmn.clone() / fhmx.clone();
        let at = (fhmx.clone() - fhmn.clone()) / fhmx;
        let p = as_ * au.clone();
        let q = at * au.clone();
        let c = one.clone() / ((one.clone() + p.clone() * p).sqrt() + (one + q.clone() * q).sqrt());
        let smin = (fhmn * c.clone()) * au;
        (smin.clone() + smin, ga / (c.clone() + c))
    }
}

/// Singular values of an upper bidiagonal matrix by implicit QR sweeps,
/// chasing from the larger end of each unreduced block. A sweep uses zero
/// shift whenever a shift could spoil the smallest singular value, so all
/// singular values keep high relative accuracy. Off-diagonal entries are
/// dropped by the relative recurrence tests `|e_j| <= tol mu_j`.
pub fn bidiag_svd<T: Real>(b: &Bidiagonal<T>, ctx: &FloatCtx) -> Result<Vec<T>, SvdError> {
    let n = b.order();
    let mut d = b.diag.clone();
    let mut e = b.superdiag.clone();
    let zero = T::zero_in(ctx);
    let eps = T::eps_in(ctx);
    let tol = T::of_int(8, ctx) * eps.clone();
    let max_iter = 30 * n * n;
    let mut iter = 0usize;
    let mut hh = n;
    while hh > 1 {
        // deflation tests over the active part
        let mut mu = d[0].magnitude();
        for j in 0..hh - 1 {
            if !e[j].is_exact_zero() && e[j].magnitude() <= tol.clone() * mu.clone() {
                e[j] = zero.clone();
            }
            mu = if e[j].is_exact_zero() {
                d[j + 1].magnitude()
            } else {
                let ea = e[j].magnitude();
                d[j + 1].magnitude() * (mu.clone() / (mu + ea))
            };
        }
        let mut lam = d[hh - 1].magnitude();
        for j in (0..hh - 1).rev() {
            if !e[j].is_exact_zero() && e[j].magnitude() <= tol.clone() * lam.clone() {
                e[j] = zero.clone();
            }
            lam = if e[j].is_exact_zero() {
                d[j].magnitude()
            } else {
                let ea = e[j].magnitude();
                d[j].magnitude() * (lam.clone() / (lam + ea))
            };
        }
        if e[hh - 2].is_exact_zero() {
            hh -= 1;
            continue;
        }
        let mut ll = hh - 2;
        while ll > 0 && !e[ll - 1].is_exact_zero() {
            ll -= 1;
        }
        if hh - ll == 2 {
            let (smin, smax) = sv2(&d[ll], &e[ll], &d[ll + 1], ctx);
            d[ll] = smax;
            d[ll + 1] = smin;
            e[ll] = zero.clone();
            hh -= 1;
            continue;
        }
        iter += hh - ll;
        if iter > max_iter {
            return Err(SvdError::NoConvergence(max_iter));
        }
        if d[hh - 1].magnitude() > d[ll].magnitude() {
            d[ll..hh].reverse();
            e[ll..hh - 1].reverse();
        }
        let smax = d[ll..hh]
            .iter()
            .chain(&e[ll..hh - 1])
            .map(Field::magnitude)
            .fold(zero.clone(), max);
        let sminl = block_smin(&d[ll..hh], &e[ll..hh - 1], ctx);
        let nt = T::of_int(n as i64, ctx) * tol.clone();
        let small = max(eps.clone(), T::from_rational(&crate::arith::Rational::new(1.into(), 100.into()), ctx) * tol.clone());
        let mut shift = zero.clone();
        if !smax.is_exact_zero() && nt * (sminl / smax) > small {
            let sll = d[ll].magnitude();
            let (s, _) = sv2(&d[hh - 2], &e[hh - 2], &d[hh - 1], ctx);
            shift = s;
            if !sll.is_exact_zero() {
                let r = shift.clone() / sll;
                if r.clone() * r < eps {
                    shift = zero.clone();
                }
            }
        }
        if shift.is_exact_zero() {
            zero_shift_sweep(&mut d[ll..hh], &mut e[ll..hh - 1], ctx);
        } else {
            shifted_sweep(&mut d[ll..hh], &mut e[ll..hh - 1], &shift, ctx);
        }
    }
    let mut s: Vec<T> = d.iter().map(Field::magnitude).collect();
    s.sort_by(|a, b| b.partial_cmp(a).expect("comparable"));
    Ok(s)
}

/// Lower estimate of the smallest singular value from the forward recurrence.
fn block_smin<T: Real>(d: &[T], e: &[T], ctx: &FloatCtx) -> T {
    let mut mu = d[0].magnitude();
    let mut smin = mu.clone();
    for j in 0..e.len() {
        let ea = e[j].magnitude();
        mu = if (mu.clone() + ea.clone()).is_exact_zero() {
            T::zero_in(ctx)
        } else {
            d[j + 1].magnitude() * (mu.clone() / (mu + ea))
        };
        smin = min(smin, mu.clone());
    }
    smin
}

fn zero_shift_sweep<T: Real>(d: &mut [T], e: &mut [T], ctx: &FloatCtx) {
    let n = d.len();
    let mut cs = T::one_in(ctx);
    let mut oldcs = T::one_in(ctx);
    let mut oldsn = T::zero_in(ctx);
    for i in 0..n - 1 {
        let (c, sn, r) = rot(&(d[i].clone() * cs.clone()), &e[i], ctx);
        cs = c;
        if i > 0 {
            e[i - 1] = oldsn.clone() * r.clone();
        }
        let (oc, os, di) = rot(&(oldcs.clone() * r), &(d[i + 1].clone() * sn), ctx);
        oldcs = oc;
        oldsn = os;
        d[i] = di;
    }
    let h = d[n - 1].clone() * cs;
    e[n - 2] = h.clone() * oldsn;
    d[n - 1] = h * oldcs;
}

fn shifted_sweep<T: Real>(d: &mut [T], e: &mut [T], shift: &T, ctx: &FloatCtx) {
    let n = d.len();
    let one = T::one_in(ctx);
    let sign = if d[0] < T::zero_in(ctx) { -one.clone() } else { one };
    let mut f = (d[0].magnitude() - shift.clone()) * (sign + shift.clone() / d[0].clone());
    let mut g = e[0].clone();
    for i in 0..n - 1 {
        let (cosr, sinr, r) = rot(&f, &g, ctx);
        if i > 0 {
            e[i - 1] = r;
        }
        f = cosr.clone() * d[i].clone() + sinr.clone() * e[i].clone();
        e[i] = cosr.clone() * e[i].clone() - sinr.clone() * d[i].clone();
        g = sinr * d[i + 1].clone();
        d[i + 1] = cosr * d[i + 1].clone();
        let (cosl, sinl, r) = rot(&f, &g, ctx);
        d[i] = r;
        f = cosl.clone() * e[i].clone() + sinl.clone() * d[i + 1].clone();
        d[i + 1] = cosl.clone() * d[i + 1].clone() - sinl.clone() * e[i].clone();
        if i + 2 < n {
            g = sinl * e[i + 1].clone();
            e[i + 1] = cosl * e[i + 1].clone();
        }
    }
    e[n - 2] = f;
}

/// Householder reduction to upper bidiagonal form (`m >= n`).
pub fn householder_bidiag<T: Real>(a: &Matrix<T>, ctx: &FloatCtx) -> Result<Bidiagonal<T>, SvdError> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(SvdError::DimensionMismatch(format!("need rows >= cols, got {m} x {n}")));
    }
    let mut w = a.clone();
    let mut d = Vec::with_capacity(n);
    let mut e = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n {
        let col: Vec<T> = (k..m).map(|i| w[(i, k)].clone()).collect();
        if let Some((v, beta, alpha)) = reflector(&col, ctx) {
            for j in k..n {
                let s = (0..v.len()).fold(T::zero_in(ctx), |acc, t| acc + v[t].clone() * w[(k + t, j)].clone());
                let f = beta.clone() * s;
                for t in 0..v.len() {
                    w[(k + t, j)] = w[(k + t, j)].clone() - f.clone() * v[t].clone();
                }
            }
            d.push(alpha);
        } else {
            d.push(w[(k, k)].clone());
        }
        if k + 1 < n {
            let row: Vec<T> = (k + 1..n).map(|j| w[(k, j)].clone()).collect();
            if let Some((v, beta, alpha)) = reflector(&row, ctx) {
                for i in k..m {
                    let s = (0..v.len()).fold(T::zero_in(ctx), |acc, t| acc + w[(i, k + 1 + t)].clone() * v[t].clone());
                    let f = beta.clone() * s;
                    for t in 0..v.len() {
                        w[(i, k + 1 + t)] = w[(i, k + 1 + t)].clone() - f.clone() * v[t].clone();
                    }
                }
                e.push(alpha);
            } else {
                e.push(w[(k, k + 1)].clone());
            }
        }
    }
    Bidiagonal::new(d, e)
}

/// `(v, beta, alpha)` with `(I - beta v v^T) x = alpha e_1`; `None` when
/// `x` is already a multiple of `e_1`.
fn reflector<T: Real>(x: &[T], ctx: &FloatCtx) -> Option<(Vec<T>, T, T)> {
    if x[1..].iter().all(Field::is_exact_zero) {
        return None;
    }
    let scale = x.iter().map(Field::magnitude).fold(T::zero_in(ctx), max);
    let norm = scale.clone()
        * x.iter()
            .fold(T::zero_in(ctx), |s, v| {
                let t = v.clone() / scale.clone();
                s + t.clone() * t
            })
            .sqrt();
    let alpha = if x[0] >= T::zero_in(ctx) { -norm } else { norm };
    let mut v = x.to_vec();
    v[0] = v[0].clone() - alpha.clone();
    let vv = v.iter().fold(T::zero_in(ctx), |s, t| s + t.clone() * t.clone());
    let beta = T::of_int(2, ctx) / vv;
    Some((v, beta, alpha))
}

/// Singular values by Householder bidiagonalisation followed by
/// [`bidiag_svd`]: the usual dense approach, backward stable but only
/// absolutely accurate.
pub fn svd_conventional<T: Real>(a: &Matrix<T>, ctx: &FloatCtx) -> Result<Vec<T>, SvdError> {
    let b = if a.rows() >= a.cols() {
        householder_bidiag(a, ctx)?
    } else {
        householder_bidiag(&a.transpose(), ctx)?
    };
    bidiag_svd(&b, ctx)
}
