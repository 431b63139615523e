use num_bigint::BigInt;
use num_traits::Zero;

use super::{check_minor_sets, StructError};
use crate::arith::Rational;
use crate::exprdag::{BlackBox, DagBuilder, ExprDag, NodeId};
use crate::matrix::Matrix;
use crate::poly::SparsePoly;

/// `F_ij = b_i a_j` for `i >= j` and `c_i d_j` for `i < j`. With `c = a`,
/// `d = b` this is the symmetric `G_ij = a_min(i,j) b_max(i,j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GreensParams {
    pub a: Vec<Rational>,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
    pub d: Vec<Rational>,
    symmetric: bool,
}

impl GreensParams {
    pub fn new(a: Vec<Rational>, b: Vec<Rational>, c: Vec<Rational>, d: Vec<Rational>) -> Result<Self, StructError> {
        let n = a.len();
        if b.len() != n || c.len() != n || d.len() != n {
            return Err(StructError::DimensionMismatch("a, b, c, d must have equal length".into()));
        }
        Ok(GreensParams { a, b, c, d, symmetric: false })
    }

    pub fn symmetric(a: Vec<Rational>, b: Vec<Rational>) -> Result<Self, StructError> {
        if a.len() != b.len() {
            return Err(StructError::DimensionMismatch("a and b must have equal length".into()));
        }
        Ok(GreensParams {
            c: a.clone(),
            d: b.clone(),
            a,
            b,
            symmetric: true,
        })
    }

    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn to_matrix(&self) -> Matrix<Rational> {
        let n = self.order();
        Matrix::from_fn(n, n, |i, j| if i >= j { &self.b[i] * &self.a[j] } else { &self.c[i] * &self.d[j] })
    }

    /// DAG inputs: `a, b` when symmetric, otherwise `a, b, c, d`.
    pub fn dag_inputs(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.a.iter().chain(&self.b).cloned().collect();
        if !self.symmetric {
            v.extend(self.c.iter().chain(&self.d).cloned());
        }
        v
    }

    fn input_count(&self) -> usize {
        if self.symmetric {
            2 * self.order()
        } else {
            4 * self.order()
        }
    }
}

/// Which family an index of the minor came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Row,
    Col,
}

/// Leaf of the factored minor: a parameter, identified by its family and
/// index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Param {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
}

fn alpha(idx: usize, s: Side) -> Param {
    match s {
        Side::Col => Param::A(idx),
        Side::Row => Param::C(idx),
    }
}

fn beta(idx: usize, s: Side) -> Param {
    match s {
        Side::Row => Param::B(idx),
        Side::Col => Param::D(idx),
    }
}

/// `alpha(k_1) * prod det2(..) * beta(l_p)`, or `None` for a zero minor.
#[allow(clippy::type_complexity)]
fn factor(rows: &[usize], cols: &[usize]) -> Option<(Param, Vec<[Param; 4]>, Param)> {
    let pairs: Vec<((usize, Side), (usize, Side))> = rows
        .iter()
        .zip(cols)
        .map(|(&i, &j)| if j <= i { ((j, Side::Col), (i, Side::Row)) } else { ((i, Side::Row), (j, Side::Col)) })
        .collect();
    let mut dets = Vec::new();
    for w in pairs.windows(2) {
        let (_, (l, ls)) = w[0];
        let ((k, ks), _) = w[1];
        if l > k || (l == k && ls == Side::Row && ks == Side::Col) {
            return None;
        }
        dets.push([alpha(k, ks), beta(l, ls), alpha(l, ls), beta(k, ks)]);
    }
    let ((k1, s1), _) = pairs[0];
    let (_, (lp, sp)) = *pairs.last().expect("nonempty");
    Some((alpha(k1, s1), dets, beta(lp, sp)))
}

impl GreensParams {
    fn value(&self, p: Param) -> &Rational {
        match p {
            Param::A(i) => &self.a[i],
            Param::B(i) => &self.b[i],
            Param::C(i) => &self.c[i],
            Param::D(i) => &self.d[i],
        }
    }

    fn input(&self, p: Param) -> usize {
        let n = self.order();
        match (p, self.symmetric) {
            (Param::A(i), _) | (Param::C(i), true) => i,
            (Param::B(i), _) | (Param::D(i), true) => n + i,
            (Param::C(i), false) => 2 * n + i,
            (Param::D(i), false) => 3 * n + i,
        }
    }
}

/// Minor on zero-based row and column sets, as a product of single
/// parameters and 2x2 determinants of parameters.
pub fn greens_minor(g: &GreensParams, rows: &[usize], cols: &[usize]) -> Result<Rational, StructError> {
    let n = g.order();
    let (rows, cols) = check_minor_sets(rows, cols, n, n)?;
    if rows.is_empty() {
        return Ok(Rational::from_integer(1.into()));
    }
    let Some((first, dets, last)) = factor(&rows, &cols) else {
        return Ok(Rational::zero());
    };
    let mut v = g.value(first).clone();
    for [p, q, r, s] in dets {
        v *= g.value(p) * g.value(q) - g.value(r) * g.value(s);
    }
    Ok(v * g.value(last))
}

/// The 2x2 determinant box `x1 x2 - x3 x4`.
pub fn det2_box() -> BlackBox {
    let e = |k: usize| {
        let mut m = vec![0u32; 4];
        m[k] = 1;
        m
    };
    let mono = |i: usize, j: usize| {
        let a = e(i);
        let b = e(j);
        a.iter().zip(&b).map(|(x, y)| x + y).collect::<Vec<u32>>()
    };
    let poly = SparsePoly::from_terms(4, [(BigInt::from(1), mono(0, 1)), (BigInt::from(-1), mono(2, 3))]);
    BlackBox::new("det2", poly, false).expect("nonzero polynomial")
}

/// The same factorisation as a DAG: parameters are inputs (see
/// [`GreensParams::dag_inputs`]), each 2x2 determinant is one `det2` box
/// node, and the factors are multiplied left to right.
pub fn greens_minor_dag(g: &GreensParams, rows: &[usize], cols: &[usize]) -> Result<ExprDag, StructError> {
    let n = g.order();
    let (rows, cols) = check_minor_sets(rows, cols, n, n)?;
    let mut b = DagBuilder::new(g.input_count());
    if rows.is_empty() {
        let one = b.constant(Rational::from_integer(1.into()));
        return Ok(b.finish(one)?);
    }
    let Some((first, dets, last)) = factor(&rows, &cols) else {
        let z = b.constant(Rational::zero());
        return Ok(b.finish(z)?);
    };
    b.register_box(det2_box());
    let mut factors: Vec<NodeId> = vec![b.input(g.input(first))];
    for quad in dets {
        let args: Vec<NodeId> = quad.iter().map(|&p| b.input(g.input(p))).collect();
        factors.push(b.call("det2", args));
    }
    factors.push(b.input(g.input(last)));
    let root = b.product(&factors).expect("nonempty");
    Ok(b.finish(root)?)
}
