//! Expression DAGs with per-node rounding slots: exact, perturbed and
//! floating-point evaluation, NIC classification, derivatives and
//! adversarial rounding search.

mod branch;
mod frac;
mod grad;
mod nic;
mod search;
mod text;

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{Field, FloatCtx, Rational};
use crate::poly::SparsePoly;

pub use branch::{BranchEvaluator, Guard};
pub use grad::{grad_reverse, kappa_struct, rel_gap, GapOp, Norm};
pub use nic::{classify_nic, nic_error_bound, NicReport, SignInfo, Violation};
pub use search::adversarial_search;

use frac::Frac;

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    /// Zero-based input index.
    Input(usize),
    Const(Rational),
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    BlackBox(String),
}

impl Op {
    fn arity(&self) -> Option<usize> {
        match self {
            Op::Input(_) | Op::Const(_) => Some(0),
            Op::Neg => Some(1),
            Op::Add | Op::Sub | Op::Mul | Op::Div => Some(2),
            Op::BlackBox(_) => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Op::Input(_) | Op::Const(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub op: Op,
    pub args: Vec<NodeId>,
    pub rounds: bool,
}

/// A black-box operation: a polynomial evaluated exactly and rounded once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlackBox {
    pub name: String,
    pub arity: usize,
    pub poly: SparsePoly,
    pub affine: bool,
}

impl BlackBox {
    pub fn new(name: &str, poly: SparsePoly, affine: bool) -> Result<Self, DagError> {
        if poly.is_zero() {
            return Err(DagError::Invalid(format!("black box {name} has a zero polynomial")));
        }
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(DagError::Invalid(format!("bad black box name {name:?}")));
        }
        Ok(BlackBox {
            name: name.to_string(),
            arity: poly.nvars(),
            poly,
            affine,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DagError {
    #[error("division by zero at node n{node}")]
    DivisionByZero { node: NodeId },
    #[error("invalid dag: {0}")]
    Invalid(String),
    #[error("dag is not NIC")]
    NotNic,
    #[error("problem is ill-posed: the computed quantity is zero")]
    IllPosed,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("dag does not compute a polynomial with integer coefficients")]
    NotPolynomial,
    #[error("branch {branch} does not expand to the target polynomial")]
    SymbolicMismatch { branch: usize },
    #[error("no branch guard holds at this point")]
    NoBranch,
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Rounding errors for every rounding node, in node order.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaAssignment {
    deltas: Vec<Rational>,
}

impl DeltaAssignment {
    pub fn zero(r: usize) -> Self {
        DeltaAssignment {
            deltas: vec![Rational::zero(); r],
        }
    }

    /// Checks `|δ_i| <= eps` for every entry.
    pub fn new(deltas: Vec<Rational>, eps: &Rational) -> Result<Self, DagError> {
        if let Some(i) = deltas.iter().position(|d| d.abs() > *eps) {
            return Err(DagError::Invalid(format!("delta {i} exceeds epsilon")));
        }
        Ok(DeltaAssignment { deltas })
    }

    pub fn values(&self) -> &[Rational] {
        &self.deltas
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExprDag {
    nvars: usize,
    nodes: Vec<Node>,
    root: NodeId,
    boxes: BTreeMap<String, BlackBox>,
}

impl ExprDag {
    pub fn new(
        nvars: usize,
        nodes: Vec<Node>,
        root: NodeId,
        boxes: BTreeMap<String, BlackBox>,
    ) -> Result<Self, DagError> {
        let bad = |m: String| Err(DagError::Invalid(m));
        if root >= nodes.len() {
            return bad(format!("root n{root} out of range"));
        }
        for (id, n) in nodes.iter().enumerate() {
            if let Some(&a) = n.args.iter().find(|&&a| a >= id) {
                return bad(format!("n{id} uses n{a}, which does not precede it"));
            }
            let want = match &n.op {
                Op::BlackBox(name) => match boxes.get(name) {
                    Some(b) => b.arity,
                    None => return bad(format!("n{id} calls unregistered box {name}")),
                },
                op => op.arity().expect("fixed arity"),
            };
            if n.args.len() != want {
                return bad(format!("n{id} has {} args, expected {want}", n.args.len()));
            }
            match &n.op {
                Op::Input(i) if *i >= nvars => return bad(format!("n{id} reads input {i}")),
                Op::Input(_) | Op::Const(_) | Op::Neg if n.rounds => {
                    return bad(format!("n{id} cannot round"))
                }
                _ => {}
            }
        }
        Ok(ExprDag {
            nvars,
            nodes,
            root,
            boxes,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn boxes(&self) -> &BTreeMap<String, BlackBox> {
        &self.boxes
    }

    /// Ids of rounding nodes, in node order; δ slot `k` belongs to entry `k`.
    pub fn rounding_nodes(&self) -> Vec<NodeId> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].rounds).collect()
    }

    pub fn num_roundings(&self) -> usize {
        self.nodes.iter().filter(|n| n.rounds).count()
    }

    fn check_len(&self, got: usize) -> Result<(), DagError> {
        if got != self.nvars {
            return Err(DagError::DimensionMismatch {
                expected: self.nvars,
                got,
            });
        }
        Ok(())
    }

    /// Exact value with all δ = 0.
    pub fn oracle_eval(&self, x: &[Rational]) -> Result<Rational, DagError> {
        self.eval_perturbed(x, &DeltaAssignment::zero(self.num_roundings()))
    }

    /// Exact value of the computation with node `k`'s result multiplied by
    /// `1 + δ_k` at every rounding node.
    pub fn eval_perturbed(&self, x: &[Rational], delta: &DeltaAssignment) -> Result<Rational, DagError> {
        let xs: Vec<Frac> = x.iter().map(Frac::from_rational).collect();
        let ds: Vec<Frac> = delta.values().iter().map(|d| Frac::from_rational(&(d + Rational::one()))).collect();
        self.eval_frac(&xs, &ds).map(|f| f.to_rational())
    }

    pub(crate) fn eval_frac(&self, x: &[Frac], one_plus_delta: &[Frac]) -> Result<Frac, DagError> {
        self.check_len(x.len())?;
        if one_plus_delta.len() != self.num_roundings() {
            return Err(DagError::DimensionMismatch {
                expected: self.num_roundings(),
                got: one_plus_delta.len(),
            });
        }
        let mut vals: Vec<Frac> = Vec::with_capacity(self.nodes.len());
        let mut slot = 0;
        for (id, n) in self.nodes.iter().enumerate() {
            let a = |k: usize| &vals[n.args[k]];
            let mut v = match &n.op {
                Op::Input(i) => x[*i].clone(),
                Op::Const(c) => Frac::from_rational(c),
                Op::Neg => a(0).neg(),
                Op::Add => a(0).add(a(1)),
                Op::Sub => a(0).sub(a(1)),
                Op::Mul => a(0).mul(a(1)),
                Op::Div => {
                    if a(1).is_zero() {
                        return Err(DagError::DivisionByZero { node: id });
                    }
                    a(0).div(a(1))
                }
                Op::BlackBox(name) => {
                    let args: Vec<Rational> = n.args.iter().map(|&j| vals[j].to_rational()).collect();
                    Frac::from_rational(&self.boxes[name].poly.eval_rational(&args))
                }
            };
            if n.rounds {
                v = v.mul(&one_plus_delta[slot]);
                slot += 1;
            }
            vals.push(v);
        }
        Ok(vals.swap_remove(self.root))
    }

    /// Evaluates in a floating (or exact) scalar type. Every arithmetic node
    /// rounds according to the scalar type; black boxes are evaluated exactly
    /// and rounded once.
    pub fn eval_float<T: Field>(&self, x: &[T], ctx: &FloatCtx) -> Result<T, DagError> {
        self.check_len(x.len())?;
        let mut vals: Vec<T> = Vec::with_capacity(self.nodes.len());
        for (id, n) in self.nodes.iter().enumerate() {
            let a = |k: usize| vals[n.args[k]].clone();
            let v = match &n.op {
                Op::Input(i) => x[*i].clone(),
                Op::Const(c) => T::from_rational(c, ctx),
                Op::Neg => -a(0),
                Op::Add => a(0) + a(1),
                Op::Sub => a(0) - a(1),
                Op::Mul => a(0) * a(1),
                Op::Div => {
                    let d = a(1);
                    if d.is_exact_zero() {
                        return Err(DagError::DivisionByZero { node: id });
                    }
                    a(0) / d
                }
                Op::BlackBox(name) => {
                    let args: Vec<Rational> = n.args.iter().map(|&j| vals[j].to_rational()).collect();
                    T::from_rational(&self.boxes[name].poly.eval_rational(&args), ctx)
                }
            };
            vals.push(v);
        }
        Ok(vals.swap_remove(self.root))
    }

    /// Symbolic expansion of a division-free DAG with integer constants.
    pub fn to_poly(&self) -> Result<SparsePoly, DagError> {
        let mut vals: Vec<SparsePoly> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let a = |k: usize| &vals[n.args[k]];
            let v = match &n.op {
                Op::Input(i) => SparsePoly::var(self.nvars, *i),
                Op::Const(c) => {
                    if !c.is_integer() {
                        return Err(DagError::NotPolynomial);
                    }
                    SparsePoly::constant(self.nvars, c.to_integer())
                }
                Op::Neg => -a(0),
                Op::Add => a(0) + a(1),
                Op::Sub => a(0) - a(1),
                Op::Mul => a(0) * a(1),
                Op::Div => return Err(DagError::NotPolynomial),
                Op::BlackBox(name) => {
                    let subs: Vec<SparsePoly> = n.args.iter().map(|&j| vals[j].clone()).collect();
                    self.boxes[name].poly.compose(&subs)
                }
            };
            vals.push(v);
        }
        Ok(vals.swap_remove(self.root))
    }
}

/// Free function form of [`ExprDag::oracle_eval`].
pub fn oracle_eval(dag: &ExprDag, x: &[Rational]) -> Result<Rational, DagError> {
    dag.oracle_eval(x)
}

/// Free function form of [`ExprDag::eval_perturbed`].
pub fn eval_perturbed(dag: &ExprDag, x: &[Rational], delta: &DeltaAssignment) -> Result<Rational, DagError> {
    dag.eval_perturbed(x, delta)
}

/// Incremental DAG construction. Arithmetic helpers create rounding nodes;
/// inputs are shared.
#[derive(Clone, Debug)]
pub struct DagBuilder {
    nvars: usize,
    nodes: Vec<Node>,
    boxes: BTreeMap<String, BlackBox>,
    inputs: HashMap<usize, NodeId>,
}

impl DagBuilder {
    pub fn new(nvars: usize) -> Self {
        DagBuilder {
            nvars,
            nodes: Vec::new(),
            boxes: BTreeMap::new(),
            inputs: HashMap::new(),
        }
    }

    pub fn push(&mut self, op: Op, args: Vec<NodeId>, rounds: bool) -> NodeId {
        self.nodes.push(Node { op, args, rounds });
        self.nodes.len() - 1
    }

    pub fn register_box(&mut self, b: BlackBox) {
        self.boxes.insert(b.name.clone(), b);
    }

    pub fn input(&mut self, i: usize) -> NodeId {
        if let Some(&id) = self.inputs.get(&i) {
            return id;
        }
        let id = self.push(Op::Input(i), vec![], false);
        self.inputs.insert(i, id);
        id
    }

    pub fn constant(&mut self, c: Rational) -> NodeId {
        self.push(Op::Const(c), vec![], false)
    }

    pub fn neg(&mut self, a: NodeId) -> NodeId {
        self.push(Op::Neg, vec![a], false)
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Op::Add, vec![a, b], true)
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Op::Sub, vec![a, b], true)
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Op::Mul, vec![a, b], true)
    }

    pub fn div(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Op::Div, vec![a, b], true)
    }

    pub fn call(&mut self, name: &str, args: Vec<NodeId>) -> NodeId {
        self.push(Op::BlackBox(name.to_string()), args, true)
    }

    /// Left-to-right product; `None` for an empty list.
    pub fn product(&mut self, ids: &[NodeId]) -> Option<NodeId> {
        let (&first, rest) = ids.split_first()?;
        Some(rest.iter().fold(first, |acc, &b| self.mul(acc, b)))
    }

    /// `a^k` for `k >= 1` by square-and-multiply.
    pub fn power(&mut self, a: NodeId, k: u32) -> NodeId {
        assert!(k >= 1, "power must be positive");
        let mut acc: Option<NodeId> = None;
        let mut base = a;
        let mut k = k;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base,
                    Some(x) => self.mul(x, base),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = self.mul(base, base);
        }
        acc.expect("k >= 1")
    }

    /// `c * a` for nonzero integer `c` by a binary addition chain, negated at
    /// the end if needed.
    pub fn scale_int(&mut self, a: NodeId, c: &BigInt) -> NodeId {
        assert!(!c.is_zero(), "scale by zero");
        let m = c.abs();
        let bits = m.bits();
        let mut acc = a;
        for i in (0..bits - 1).rev() {
            acc = self.add(acc, acc);
            if m.bit(i) {
                acc = self.add(acc, a);
            }
        }
        if c.is_negative() {
            acc = self.neg(acc);
        }
        acc
    }

    pub fn finish(self, root: NodeId) -> Result<ExprDag, DagError> {
        ExprDag::new(self.nvars, self.nodes, root, self.boxes)
    }
}
