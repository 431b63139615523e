use num_traits::{One, Signed, Zero};

use super::{DagError, ExprDag, Op};
use crate::arith::{round_rational, Dyadic, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    One,
    Two,
    Inf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapOp {
    Add,
    Sub,
}

fn forward(dag: &ExprDag, x: &[Rational]) -> Result<Vec<Rational>, DagError> {
    if x.len() != dag.nvars() {
        return Err(DagError::DimensionMismatch {
            expected: dag.nvars(),
            got: x.len(),
        });
    }
    let mut v: Vec<Rational> = Vec::with_capacity(dag.nodes().len());
    for (id, n) in dag.nodes().iter().enumerate() {
        let a = |k: usize| &v[n.args[k]];
        let val = match &n.op {
            Op::Input(i) => x[*i].clone(),
            Op::Const(c) => c.clone(),
            Op::Neg => -a(0),
            Op::Add => a(0) + a(1),
            Op::Sub => a(0) - a(1),
            Op::Mul => a(0) * a(1),
            Op::Div => {
                if a(1).is_zero() {
                    return Err(DagError::DivisionByZero { node: id });
                }
                a(0) / a(1)
            }
            Op::BlackBox(name) => {
                let args: Vec<Rational> = n.args.iter().map(|&j| v[j].clone()).collect();
                dag.boxes()[name].poly.eval_rational(&args)
            }
        };
        v.push(val);
    }
    Ok(v)
}

/// Exact gradient of the root value with respect to the inputs, by a reverse
/// sweep over the unperturbed computation.
pub fn grad_reverse(dag: &ExprDag, x: &[Rational]) -> Result<Vec<Rational>, DagError> {
    Ok(value_and_grad(dag, x)?.1)
}

fn value_and_grad(dag: &ExprDag, x: &[Rational]) -> Result<(Rational, Vec<Rational>), DagError> {
    let v = forward(dag, x)?;
    let nodes = dag.nodes();
    let mut adj = vec![Rational::zero(); nodes.len()];
    adj[dag.root()] = Rational::one();
    let mut g = vec![Rational::zero(); dag.nvars()];
    for id in (0..=dag.root()).rev() {
        let w = std::mem::take(&mut adj[id]);
        if w.is_zero() {
            continue;
        }
        let n = &nodes[id];
        match &n.op {
            Op::Input(i) => g[*i] += w,
            Op::Const(_) => {}
            Op::Neg => adj[n.args[0]] -= w,
            Op::Add => {
                adj[n.args[0]] += &w;
                adj[n.args[1]] += w;
            }
            Op::Sub => {
                adj[n.args[0]] += &w;
                adj[n.args[1]] -= w;
            }
            Op::Mul => {
                let (a, b) = (n.args[0], n.args[1]);
                let da = &w * &v[b];
                let db = &w * &v[a];
                adj[a] += da;
                adj[b] += db;
            }
            Op::Div => {
                let (a, b) = (n.args[0], n.args[1]);
                let da = &w / &v[b];
                let db = -(&w * &v[a]) / (&v[b] * &v[b]);
                adj[a] += da;
                adj[b] += db;
            }
            Op::BlackBox(name) => {
                let poly = &dag.boxes()[name].poly;
                let args: Vec<Rational> = n.args.iter().map(|&j| v[j].clone()).collect();
                for (k, &j) in n.args.iter().enumerate() {
                    let d = poly.derivative(k).eval_rational(&args);
                    adj[j] += &w * d;
                }
            }
        }
    }
    Ok((v[dag.root()].clone(), g))
}

/// Structured condition number `||(x_i dp/dx_i)_i|| / |p(x)|`.
///
/// The 2-norm result is exact when it is rational and otherwise correctly
/// rounded to 128 bits.
pub fn kappa_struct(dag: &ExprDag, x: &[Rational], norm: Norm) -> Result<Rational, DagError> {
    let (p, g) = value_and_grad(dag, x)?;
    if p.is_zero() {
        return Err(DagError::IllPosed);
    }
    let terms: Vec<Rational> = x.iter().zip(&g).map(|(xi, gi)| (xi * gi).abs()).collect();
    let p = p.abs();
    Ok(match norm {
        Norm::One => terms.iter().fold(Rational::zero(), |a, t| a + t) / p,
        Norm::Inf => terms.iter().fold(Rational::zero(), |a, t| a.max(t.clone())) / p,
        Norm::Two => {
            let sq = terms.iter().fold(Rational::zero(), |a, t| a + t * t) / (&p * &p);
            sqrt_rational(&sq)
        }
    })
}

fn sqrt_rational(r: &Rational) -> Rational {
    let (n, d) = (r.numer(), r.denom());
    let (sn, sd) = (num_integer::Roots::sqrt(n), num_integer::Roots::sqrt(d));
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        return Rational::new(sn, sd);
    }
    let approx = round_rational(r, 300);
    let m = crate::arith::MpFloat::new(&approx, &crate::arith::FloatCtx::new(128).expect("valid"));
    let s: Dyadic = crate::arith::Real::sqrt(&m).into_value();
    s.to_rational()
}

/// `|x op y| / (|x| + |y|)`.
pub fn rel_gap(x: &Rational, y: &Rational, op: GapOp) -> Result<Rational, DagError> {
    let r = match op {
        GapOp::Add => x + y,
        GapOp::Sub => x - y,
    };
    if r.is_zero() {
        return Err(DagError::IllPosed);
    }
    Ok(r.abs() / (x.abs() + y.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::pow2_rational;
    use crate::exprdag::DagBuilder;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn product_gradient() {
        let mut b = DagBuilder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let m = b.mul(x, y);
        let d = b.finish(m).unwrap();
        assert_eq!(grad_reverse(&d, &[q(3), q(5)]).unwrap(), vec![q(5), q(3)]);
    }

    #[test]
    fn square_of_difference() {
        let mut b = DagBuilder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let s = b.sub(x, y);
        let m = b.mul(s, s);
        let d = b.finish(m).unwrap();
        assert_eq!(grad_reverse(&d, &[q(2), q(1)]).unwrap(), vec![q(2), q(-2)]);
        assert_eq!(kappa_struct(&d, &[q(1), q(1)], Norm::One), Err(DagError::IllPosed));
    }

    #[test]
    fn kappa_examples() {
        let mut b = DagBuilder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let s = b.sub(x, y);
        let d = b.finish(s).unwrap();
        assert_eq!(kappa_struct(&d, &[q(3), q(1)], Norm::One).unwrap(), q(2));
        let mut b = DagBuilder::new(1);
        let x = b.input(0);
        let p = b.power(x, 7);
        let d = b.finish(p).unwrap();
        for norm in [Norm::One, Norm::Two, Norm::Inf] {
            assert_eq!(kappa_struct(&d, &[Rational::new(3.into(), 7.into())], norm).unwrap(), q(7));
        }
    }

    #[test]
    fn two_norm_irrational() {
        let mut b = DagBuilder::new(2);
        let (x, y) = (b.input(0), b.input(1));
        let s = b.add(x, y);
        let d = b.finish(s).unwrap();
        // ||(1,1)||_2 / 2 = 1/sqrt(2)
        let k = kappa_struct(&d, &[q(1), q(1)], Norm::Two).unwrap();
        let f = crate::arith::rational_to_f64(&k);
        assert!((f - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);
    }

    #[test]
    fn gaps() {
        assert_eq!(rel_gap(&q(3), &q(1), GapOp::Sub).unwrap(), Rational::new(1.into(), 2.into()));
        assert_eq!(rel_gap(&q(1), &q(1), GapOp::Add).unwrap(), q(1));
        let a = q(1) + pow2_rational(-40);
        let g = rel_gap(&a, &q(1), GapOp::Sub).unwrap();
        assert_eq!(g, pow2_rational(-40) / (q(2) + pow2_rational(-40)));
        assert!(rel_gap(&q(1), &q(1), GapOp::Sub).is_err());
    }
}
