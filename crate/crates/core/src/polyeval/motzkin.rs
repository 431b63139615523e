use num_bigint::BigInt;

use crate::arith::Rational;
use crate::exprdag::{BranchEvaluator, DagBuilder, DagError, ExprDag, Guard, NodeId};
use crate::poly::{parse_poly_in, SparsePoly};

/// `x1^2 x2^2 (x1^2 + x2^2 - 3 x3^2) + x3^6`.
pub fn motzkin_poly() -> SparsePoly {
    motzkin_family(1, 3)
}

/// `j x3^6 + x1^2 x2^2 (j x1^2 + j x2^2 - k x3^2)`.
pub fn motzkin_family(j: i64, k: i64) -> SparsePoly {
    parse_poly_in(&format!("{j}*x3^6 + x1^2*x2^2*({j}*x1^2 + {j}*x2^2 - {k}*x3^2)"), 3).expect("valid polynomial")
}

fn c(b: &mut DagBuilder, v: i64) -> NodeId {
    b.constant(Rational::from_integer(v.into()))
}

/// The expansion around the ray `x1 = x2 = x3`, in `a = y1 - y3`,
/// `b = y2 - y3`, `z = y3` with `y = (s1 x1, s2 x2, x3)`.
fn near_dag(s1: bool, s2: bool) -> ExprDag {
    let mut g = DagBuilder::new(3);
    let (x1, x2, z) = (g.input(0), g.input(1), g.input(2));
    let y1 = if s1 { x1 } else { g.neg(x1) };
    let y2 = if s2 { x2 } else { g.neg(x2) };
    let a = g.sub(y1, z);
    let b = g.sub(y2, z);
    let aa = g.mul(a, a);
    let bb = g.mul(b, b);
    let ab = g.mul(a, b);
    let a3 = g.power(a, 3);
    let b3 = g.power(b, 3);
    let a4 = g.power(a, 4);
    let b4 = g.power(b, 4);
    let z2 = g.mul(z, z);
    let z3 = g.power(z, 3);
    let z4 = g.power(z, 4);

    // z^4 * (4 * ((a a + b b) + a b))
    let s = g.add(aa, bb);
    let s = g.add(s, ab);
    let k4 = c(&mut g, 4);
    let s = g.mul(k4, s);
    let t4 = g.mul(z4, s);

    // z^3 * (2 * (2 a^3 + 5 b a a + 5 b b a + 2 b^3))
    let k2 = c(&mut g, 2);
    let u1 = g.mul(k2, a3);
    let k5 = c(&mut g, 5);
    let u2 = g.mul(k5, b);
    let u2 = g.mul(u2, a);
    let u2 = g.mul(u2, a);
    let u3 = g.mul(k5, b);
    let u3 = g.mul(u3, b);
    let u3 = g.mul(u3, a);
    let u4 = g.mul(k2, b3);
    let s = g.add(u1, u2);
    let s = g.add(s, u3);
    let s = g.add(s, u4);
    let s = g.mul(k2, s);
    let t3 = g.mul(z3, s);

    // z z * (a^4 + 8 b a^3 + b^4 + 9 b b a a + 8 b^3 a)
    let k8 = c(&mut g, 8);
    let k9 = c(&mut g, 9);
    let v2 = g.mul(k8, b);
    let v2 = g.mul(v2, a3);
    let v4 = g.mul(k9, b);
    let v4 = g.mul(v4, b);
    let v4 = g.mul(v4, a);
    let v4 = g.mul(v4, a);
    let v5 = g.mul(k8, b3);
    let v5 = g.mul(v5, a);
    let s = g.add(a4, v2);
    let s = g.add(s, b4);
    let s = g.add(s, v4);
    let s = g.add(s, v5);
    let t2 = g.mul(z2, s);

    // z * (2 b a (a^3 + b^3 + 2 b a a + 2 b b a))
    let w3 = g.mul(k2, b);
    let w3 = g.mul(w3, a);
    let w3 = g.mul(w3, a);
    let w4 = g.mul(k2, b);
    let w4 = g.mul(w4, b);
    let w4 = g.mul(w4, a);
    let s = g.add(a3, b3);
    let s = g.add(s, w3);
    let s = g.add(s, w4);
    let f = g.mul(k2, b);
    let f = g.mul(f, a);
    let s = g.mul(f, s);
    let t1 = g.mul(z, s);

    // b b a a (a a + b b)
    let p = g.mul(bb, a);
    let p = g.mul(p, a);
    let q = g.add(aa, bb);
    let t0 = g.mul(p, q);

    let s = g.add(t4, t3);
    let s = g.add(s, t2);
    let s = g.add(s, t1);
    let root = g.add(s, t0);
    g.finish(root).expect("valid dag")
}

/// The defining formula evaluated directly.
fn far_dag() -> ExprDag {
    let mut g = DagBuilder::new(3);
    let (x1, x2, x3) = (g.input(0), g.input(1), g.input(2));
    let z6 = g.power(x3, 6);
    let a = g.mul(x1, x1);
    let p = g.mul(a, x2);
    let p = g.mul(p, x2);
    let b = g.mul(x2, x2);
    let s = g.add(a, b);
    let k3 = c(&mut g, 3);
    let t = g.mul(k3, x3);
    let t = g.mul(t, x3);
    let s = g.sub(s, t);
    let p = g.mul(p, s);
    let root = g.add(z6, p);
    g.finish(root).expect("valid dag")
}

/// Monomial-by-monomial evaluation of the expanded polynomial; inaccurate
/// near the zero set.
pub fn motzkin_naive_dag() -> ExprDag {
    let mut g = DagBuilder::new(3);
    let mut terms = Vec::new();
    for (e, coeff) in motzkin_poly().terms() {
        let mut factors = Vec::new();
        if *coeff != BigInt::from(1) {
            factors.push(g.constant(Rational::from_integer(coeff.clone())));
        }
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                let x = g.input(i);
                factors.push(g.power(x, k));
            }
        }
        terms.push(g.product(&factors).expect("nonconstant monomial"));
    }
    let root = terms[1..].iter().fold(terms[0], |acc, &t| g.add(acc, t));
    g.finish(root).expect("valid dag")
}

fn guard(conds: &[String]) -> Guard {
    Guard::new(conds.iter().map(|s| parse_poly_in(s, 3).expect("valid guard")).collect())
}

/// Eight branches: for each sign class `(s1, s2)` of `(x1 x3, x2 x3)`, a
/// branch on the cone `|s_i x_i - x3| <= |x3| / 2` around the zero ray,
/// using the expansion about that ray, and a branch for the rest of the
/// class using the defining formula. Cone branches come first.
pub fn motzkin_eval() -> Result<BranchEvaluator, DagError> {
    let classes = [(true, true), (false, true), (true, false), (false, false)];
    let sgn = |s: bool| if s { "" } else { "-" };
    let mut branches = Vec::new();
    for &(s1, s2) in &classes {
        let g = guard(&[
            format!("x3^2 - 4*({}x1 - x3)^2", sgn(s1)),
            format!("x3^2 - 4*({}x2 - x3)^2", sgn(s2)),
        ]);
        branches.push((g, near_dag(s1, s2)));
    }
    for &(s1, s2) in &classes {
        let g = guard(&[format!("{}x1*x3", sgn(s1)), format!("{}x2*x3", sgn(s2))]);
        branches.push((g, far_dag()));
    }
    BranchEvaluator::new(motzkin_poly(), branches)
}
