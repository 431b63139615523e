//! Random instance generators and independent oracles shared by the
//! integration tests.
#![allow(dead_code)]

use hiacc::arith::Rational;
use hiacc::matrix::Matrix;
use hiacc::poly::SparsePoly;
use hiacc::structmat::{
    BidiagDecomp, CauchyParams, DstuMatrix, GreensParams, MMatrixParams, VandermondeParams,
};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn qq(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `p / q` with `|p| <= range`, `1 <= q <= range`.
pub fn small_rational(r: &mut ChaCha8Rng, range: i64) -> Rational {
    qq(r.gen_range(-range..=range), r.gen_range(1..=range))
}

pub fn positive_rational(r: &mut ChaCha8Rng, range: i64) -> Rational {
    qq(r.gen_range(1..=range), r.gen_range(1..=range))
}

/// Positive rational spread over many binary orders of magnitude.
pub fn graded_positive(r: &mut ChaCha8Rng, max_exp: i64) -> Rational {
    let e = r.gen_range(-max_exp..=max_exp);
    let base = positive_rational(r, 9);
    if e >= 0 {
        base * q(1i64 << e)
    } else {
        base / q(1i64 << -e)
    }
}

pub fn distinct_rationals(r: &mut ChaCha8Rng, n: usize, range: i64, positive: bool) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    while out.len() < n {
        let v = if positive {
            positive_rational(r, range)
        } else {
            small_rational(r, range)
        };
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

pub fn random_cauchy(r: &mut ChaCha8Rng, n: usize, m: usize) -> CauchyParams {
    let x = distinct_rationals(r, n, 12, true);
    let y = distinct_rationals(r, m, 12, true);
    if r.gen_bool(0.5) {
        let u = (0..n).map(|_| small_nonzero(r, 5)).collect();
        let v = (0..m).map(|_| small_nonzero(r, 5)).collect();
        CauchyParams::scaled(x, y, u, v).unwrap()
    } else {
        CauchyParams::new(x, y)
    }
}

pub fn small_nonzero(r: &mut ChaCha8Rng, range: i64) -> Rational {
    loop {
        let v = small_rational(r, range);
        if !v.is_zero() {
            return v;
        }
    }
}

pub fn random_vandermonde(r: &mut ChaCha8Rng, n: usize) -> VandermondeParams {
    VandermondeParams::new(distinct_rationals(r, n, 9, false))
}

pub fn random_mmatrix(r: &mut ChaCha8Rng, n: usize, graded: bool) -> MMatrixParams {
    let off = Matrix::from_fn(n, n, |i, j| {
        if i == j || r.gen_bool(0.3) {
            q(0)
        } else if graded {
            graded_positive(r, 12)
        } else {
            positive_rational(r, 9)
        }
    });
    let s = (0..n)
        .map(|_| if graded { graded_positive(r, 20) } else { positive_rational(r, 9) })
        .collect();
    MMatrixParams::new(off, s).unwrap()
}

/// Interval matrix (consecutive ones in every column) with random column
/// signs; such matrices are totally unimodular.
pub fn random_tu(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<i64> {
    let mut z = Matrix::from_fn(rows, cols, |_, _| 0i64);
    for j in 0..cols {
        let a = r.gen_range(0..rows);
        let b = r.gen_range(a..rows);
        let s = if r.gen_bool(0.5) { 1 } else { -1 };
        for i in a..=b {
            z[(i, j)] = s;
        }
    }
    if r.gen_bool(0.5) && rows == cols {
        z = z.transpose();
    }
    z
}

pub fn random_dstu(r: &mut ChaCha8Rng, n: usize, graded: bool) -> DstuMatrix {
    let z = random_tu(r, n, n);
    let scale = |r: &mut ChaCha8Rng| {
        let v = if graded { graded_positive(r, 20) } else { positive_rational(r, 9) };
        if r.gen_bool(0.5) {
            -v
        } else {
            v
        }
    };
    let d1 = (0..n).map(|_| scale(r)).collect();
    let d2 = (0..n).map(|_| scale(r)).collect();
    DstuMatrix::new(d1, z, d2, false).unwrap()
}

pub fn random_greens(r: &mut ChaCha8Rng, n: usize) -> GreensParams {
    let v = |r: &mut ChaCha8Rng| (0..n).map(|_| small_nonzero(r, 7)).collect::<Vec<_>>();
    if r.gen_bool(0.5) {
        let (a, b) = (v(r), v(r));
        GreensParams::symmetric(a, b).unwrap()
    } else {
        let (a, b, c, d) = (v(r), v(r), v(r), v(r));
        GreensParams::new(a, b, c, d).unwrap()
    }
}

/// Edges of a random forest on `rows + cols` vertices.
pub fn random_forest(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<(usize, usize, Rational)> {
    let mut cand: Vec<(usize, usize)> = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).collect();
    cand.shuffle(r);
    let mut parent: Vec<usize> = (0..rows + cols).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            i = p[i];
        }
        i
    }
    let mut out = Vec::new();
    for (i, j) in cand {
        if r.gen_bool(0.3) {
            continue;
        }
        let (a, b) = (find(&mut parent, i), find(&mut parent, rows + j));
        if a != b {
            parent[a] = b;
            out.push((i, j, small_nonzero(r, 9)));
        }
    }
    out
}

pub fn random_tn(r: &mut ChaCha8Rng, n: usize) -> BidiagDecomp {
    // Zeros obey the staircase rule that makes the decomposition unique: a
    // zero multiplier forces zeros below it (and to its right above the
    // diagonal).
    let low: Vec<usize> = (0..n).map(|j| if r.gen_bool(0.3) { r.gen_range(j + 1..=n) } else { n }).collect();
    let up: Vec<usize> = (0..n).map(|i| if r.gen_bool(0.3) { r.gen_range(i + 1..=n) } else { n }).collect();
    let p = Matrix::from_fn(n, n, |i, j| {
        if (i > j && i >= low[j]) || (i < j && j >= up[i]) {
            q(0)
        } else {
            positive_rational(r, 9)
        }
    });
    BidiagDecomp::new(p).unwrap()
}

/// Sorted random subset of `0..n` of size `k`.
pub fn subset(r: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(r);
    v.truncate(k);
    v.sort_unstable();
    v
}

/// Relative error of `computed` against a nonzero `exact`, as a rational.
pub fn rel(computed: &Rational, exact: &Rational) -> Rational {
    use num_traits::Signed;
    ((computed - exact) / exact).abs()
}

// --- allowable-factor oracle -------------------------------------------

/// An allowable linear form `x_i`, `x_i - x_j` or `x_i + x_j`, as
/// `(i, j, sign)` with `j = None` for a single variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub i: usize,
    pub j: Option<usize>,
    pub plus: bool,
}

pub fn all_forms(n: usize) -> Vec<Form> {
    let mut out: Vec<Form> = (0..n).map(|i| Form { i, j: None, plus: true }).collect();
    for i in 0..n {
        for j in i + 1..n {
            out.push(Form { i, j: Some(j), plus: false });
            out.push(Form { i, j: Some(j), plus: true });
        }
    }
    out
}

pub fn form_poly(f: Form, n: usize) -> SparsePoly {
    let xi = SparsePoly::var(n, f.i);
    match f.j {
        None => xi,
        Some(j) if f.plus => &xi + &SparsePoly::var(n, j),
        Some(j) => &xi - &SparsePoly::var(n, j),
    }
}

/// Order of vanishing of `p` on the hyperplane of `f`, by substitution:
/// `x_i -> t` (single variable), `x_i -> x_j + t` or `x_i -> t - x_j`, with
/// `t` a fresh variable; the answer is the lowest power of `t` present.
pub fn vanishing_order(p: &SparsePoly, f: Form) -> u32 {
    let n = p.nvars();
    let t = SparsePoly::var(n + 1, n);
    let subs: Vec<SparsePoly> = (0..n)
        .map(|k| {
            if k != f.i {
                return SparsePoly::var(n + 1, k);
            }
            match f.j {
                None => t.clone(),
                Some(j) if f.plus => &t - &SparsePoly::var(n + 1, j),
                Some(j) => &t + &SparsePoly::var(n + 1, j),
            }
        })
        .collect();
    let s = p.compose(&subs);
    s.terms().map(|(e, _)| e[n]).min().unwrap_or(0)
}

/// Allowable factor multiplicities and the constant, or `None` when `p` is
/// not a constant times a product of allowable forms. A nonzero `p` is such
/// a product exactly when the orders of vanishing add up to its degree.
pub fn allowable_oracle(p: &SparsePoly) -> Option<(Rational, Vec<(Form, u32)>)> {
    if p.is_zero() {
        return Some((q(0), vec![]));
    }
    if !p.constant_term().is_zero() {
        return None;
    }
    let n = p.nvars();
    let mult: Vec<(Form, u32)> = all_forms(n)
        .into_iter()
        .map(|f| (f, vanishing_order(p, f)))
        .filter(|(_, k)| *k > 0)
        .collect();
    let total: u32 = mult.iter().map(|(_, k)| k).sum();
    if total != p.degree().unwrap_or(0) {
        return None;
    }
    // the constant: ratio of leading coefficients
    let prod = mult
        .iter()
        .fold(SparsePoly::constant(n, 1), |acc, (f, k)| &acc * &form_poly(*f, n).pow(*k));
    let (e, c) = p.leading().unwrap();
    let c2 = prod.coeff(e);
    if c2.is_zero() {
        return None;
    }
    let c = Rational::new(c.clone(), c2);
    Some((c, mult))
}

pub fn random_form_product(r: &mut ChaCha8Rng, n: usize, max_deg: u32) -> SparsePoly {
    let forms = all_forms(n);
    let deg = r.gen_range(1..=max_deg);
    let mut p = SparsePoly::constant(n, r.gen_range(1..=3i64) * if r.gen_bool(0.5) { 1 } else { -1 });
    for _ in 0..deg {
        p = &p * &form_poly(*forms.choose(r).unwrap(), n);
    }
    p
}

/// Random polynomial with at most `terms` monomials of degree at most
/// `max_deg` and coefficients in `[-3, 3]`.
pub fn random_sparse(r: &mut ChaCha8Rng, n: usize, max_deg: u32, terms: usize) -> SparsePoly {
    let mut t = Vec::new();
    for _ in 0..r.gen_range(1..=terms) {
        let d = r.gen_range(0..=max_deg);
        let mut e = vec![0u32; n];
        for _ in 0..d {
            e[r.gen_range(0..n)] += 1;
        }
        t.push((r.gen_range(-3..=3i64).into(), e));
    }
    SparsePoly::from_terms(n, t)
}

pub fn one() -> Rational {
    Rational::one()
}
