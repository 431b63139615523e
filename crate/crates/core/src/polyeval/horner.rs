use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::PolyEvalError;
use crate::arith::{pow2_rational, Field, FloatCtx, Rational};
use crate::exprdag::{DagBuilder, ExprDag, NodeId, Op};
use crate::poly::{Monomial, SparsePoly};

/// Caller-supplied lower bound `p_min > 0` of `p` on the box `[-r, r]^n`,
/// and the target relative accuracy `eta`.
#[derive(Clone, Debug, PartialEq)]
pub struct PositivityCert {
    pub p_min: Rational,
    pub radius: Rational,
    pub eta: Rational,
}

impl PositivityCert {
    /// Spot-checks `p >= p_min` on a uniform grid with `per_axis` points per
    /// coordinate. This is not a proof.
    pub fn check_on_grid(&self, p: &SparsePoly, per_axis: usize) -> Result<(), PolyEvalError> {
        if !self.p_min.is_positive() || !self.eta.is_positive() || self.radius.is_negative() {
            return Err(PolyEvalError::NonPositiveCertificateMissing("need p_min > 0, eta > 0, r >= 0".into()));
        }
        let n = p.nvars();
        let k = per_axis.max(2);
        let coord = |i: usize| {
            let t = Rational::new(BigInt::from(2 * i as i64), BigInt::from((k - 1) as i64)) - Rational::one();
            &self.radius * t
        };
        let mut idx = vec![0usize; n];
        loop {
            let x: Vec<Rational> = idx.iter().map(|&i| coord(i)).collect();
            if p.eval_rational(&x) < self.p_min {
                return Err(PolyEvalError::NonPositiveCertificateMissing(format!("p < p_min at {x:?}")));
            }
            let mut d = 0;
            while d < n {
                idx[d] += 1;
                if idx[d] < k {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == n {
                return Ok(());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HornerEval<T> {
    pub value: T,
    /// Largest unit roundoff for which the certificate guarantees relative
    /// error at most `eta`.
    pub eps_required: Rational,
}

/// Nested Horner scheme: Horner in `x1` whose coefficients are Horner
/// schemes in `x2, ..`, and so on. Integer coefficients are constants.
pub fn horner_dag(p: &SparsePoly) -> ExprDag {
    let n = p.nvars();
    let mut b = DagBuilder::new(n);
    let terms: Vec<(Monomial, BigInt)> = p.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
    let root = if terms.is_empty() {
        b.constant(Rational::zero())
    } else {
        build(&mut b, &terms, 0, n)
    };
    b.finish(root).expect("valid dag")
}

fn build(b: &mut DagBuilder, terms: &[(Monomial, BigInt)], var: usize, n: usize) -> NodeId {
    if var == n {
        return b.constant(Rational::from_integer(terms[0].1.clone()));
    }
    let mut groups: BTreeMap<u32, Vec<(Monomial, BigInt)>> = BTreeMap::new();
    for t in terms {
        groups.entry(t.0[var]).or_default().push(t.clone());
    }
    let x = b.input(var);
    let top = *groups.keys().next_back().expect("nonempty");
    let mut acc = build(b, &groups[&top], var + 1, n);
    for e in (0..top).rev() {
        acc = b.mul(acc, x);
        if let Some(g) = groups.get(&e) {
            let q = build(b, g, var + 1, n);
            acc = b.add(acc, q);
        }
    }
    acc
}

/// For each term of the expanded result, its monomial, coefficient and the
/// number of rounding nodes on its path through the DAG.
pub fn term_paths(dag: &ExprDag) -> Result<Vec<(Monomial, BigInt, u32)>, PolyEvalError> {
    let n = dag.nvars();
    let mut vals: Vec<Vec<(Monomial, BigInt, u32)>> = Vec::with_capacity(dag.nodes().len());
    for node in dag.nodes() {
        let r = node.rounds as u32;
        let a = |k: usize| &vals[node.args[k]];
        let v = match &node.op {
            Op::Input(i) => {
                let mut e = vec![0; n];
                e[*i] = 1;
                vec![(e, BigInt::one(), 0)]
            }
            Op::Const(c) => {
                if !c.is_integer() {
                    return Err(crate::exprdag::DagError::NotPolynomial.into());
                }
                vec![(vec![0; n], c.to_integer(), 0)]
            }
            Op::Neg => a(0).iter().map(|(e, c, l)| (e.clone(), -c, *l)).collect(),
            Op::Add | Op::Sub => {
                let neg = node.op == Op::Sub;
                a(0).iter()
                    .map(|(e, c, l)| (e.clone(), c.clone(), l + r))
                    .chain(a(1).iter().map(|(e, c, l)| (e.clone(), if neg { -c } else { c.clone() }, l + r)))
                    .collect()
            }
            Op::Mul => {
                let mut out = Vec::new();
                for (e1, c1, l1) in a(0) {
                    for (e2, c2, l2) in a(1) {
                        let e = e1.iter().zip(e2).map(|(p, q)| p + q).collect();
                        out.push((e, c1 * c2, l1 + l2 + r));
                    }
                }
                out
            }
            Op::Div | Op::BlackBox(_) => return Err(crate::exprdag::DagError::NotPolynomial.into()),
        };
        vals.push(v);
    }
    Ok(vals.swap_remove(dag.root()))
}

/// `max |c_t| r^{|e_t|}` over the expanded terms: a bound on every term on
/// `[-r, r]^n`.
pub fn term_bound_on_box(terms: &[(Monomial, BigInt, u32)], radius: &Rational) -> Rational {
    terms
        .iter()
        .map(|(e, c, _)| {
            let deg: u32 = e.iter().sum();
            Rational::from_integer(c.abs()) * num_traits::pow(radius.clone(), deg as usize)
        })
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
}

/// Evaluates by [`horner_dag`] and reports the unit roundoff that the
/// certificate needs: with `N = sum_t (2^{L_t} - 1)` over expanded terms
/// and `C` from [`term_bound_on_box`], `|p_comp - p| <= C N eps`, so
/// `eps = eta p_min / (C N)` gives relative error at most `eta`.
pub fn horner_positive_eval<T: Field>(
    p: &SparsePoly,
    x: &[T],
    cert: Option<&PositivityCert>,
    ctx: &FloatCtx,
) -> Result<HornerEval<T>, PolyEvalError> {
    let cert = cert.ok_or_else(|| PolyEvalError::NonPositiveCertificateMissing("no certificate supplied".into()))?;
    if !cert.p_min.is_positive() || !cert.eta.is_positive() {
        return Err(PolyEvalError::NonPositiveCertificateMissing("need p_min > 0 and eta > 0".into()));
    }
    if x.len() != p.nvars() {
        return Err(PolyEvalError::DimensionMismatch {
            expected: p.nvars(),
            got: x.len(),
        });
    }
    let dag = horner_dag(p);
    let paths = term_paths(&dag)?;
    let c = term_bound_on_box(&paths, &cert.radius);
    let count: BigInt = paths.iter().map(|(_, _, l)| (BigInt::one() << *l as usize) - 1).sum();
    let eps_required = if count.is_zero() || c.is_zero() {
        Rational::one()
    } else {
        let e = &cert.eta * &cert.p_min / (c * Rational::from_integer(count));
        e.min(Rational::one())
    };
    let value = dag.eval_float(x, ctx)?;
    Ok(HornerEval { value, eps_required })
}

/// `2^k` with `2^(k-1) < m <= 2^k` for `m > 0`.
fn ceil_log2(m: &Rational) -> i64 {
    let (num, den) = (m.numer(), m.denom());
    let mut k = num.bits() as i64 - den.bits() as i64;
    while pow2_rational(k) < *m {
        k += 1;
    }
    while pow2_rational(k - 1) >= *m {
        k -= 1;
    }
    k
}

/// Homogeneous `p` of degree `d`: scale `x` by `2^-k` with
/// `k = ceil(log2 max|x_i|)`, evaluate by Horner on the scaled point, and
/// multiply by `2^(k d)`. Both scalings are exact.
pub fn homogeneous_positive_eval<T: Field>(p: &SparsePoly, x: &[T], ctx: &FloatCtx) -> Result<T, PolyEvalError> {
    if !p.is_homogeneous() {
        return Err(PolyEvalError::NotHomogeneous);
    }
    if x.len() != p.nvars() {
        return Err(PolyEvalError::DimensionMismatch {
            expected: p.nvars(),
            got: x.len(),
        });
    }
    let d = p.degree().unwrap_or(0) as i64;
    let m = x.iter().map(|v| v.to_rational().abs()).fold(Rational::zero(), |a, b| if b > a { b } else { a });
    let dag = horner_dag(p);
    if m.is_zero() {
        return Ok(dag.eval_float(x, ctx)?);
    }
    let k = ceil_log2(&m);
    let down = T::from_rational(&pow2_rational(-k), ctx);
    let y: Vec<T> = x.iter().map(|v| v.clone() * down.clone()).collect();
    let v = dag.eval_float(&y, ctx)?;
    Ok(v * T::from_rational(&pow2_rational(k * d), ctx))
}
