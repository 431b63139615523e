//! Deciding accurate evaluability of a polynomial and emitting an accurate
//! DAG when the answer is yes.

mod boxes;
mod dominant;

pub use boxes::{decide_blackbox_affine, BoxArg, BoxFactor, BoxFactorization, MAX_INSTANTIATIONS};
pub use dominant::{dominant_terms, validate_dominance, DominantTermReport, Facet, MAX_COMPONENT_VARS};

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::exprdag::{classify_nic, DagBuilder, DagError, ExprDag, NicReport, NodeId, SignInfo};
use crate::poly::SparsePoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecideError {
    #[error("component is degenerate: {0}")]
    DegenerateComponent(String),
    #[error("dominant terms need at most {MAX_COMPONENT_VARS} component variables, got {0}")]
    TooManyComponentVars(usize),
    #[error("bad variable index {0}")]
    BadVariable(usize),
    #[error(transparent)]
    Dag(#[from] DagError),
}

/// `x_i`, `x_i - x_j` or `x_i + x_j` (zero-based, `i < j`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinearForm {
    Xi(usize),
    Diff(usize, usize),
    Sum(usize, usize),
}

impl LinearForm {
    pub fn to_poly(&self, nvars: usize) -> SparsePoly {
        let v = |i| SparsePoly::var(nvars, i);
        match *self {
            LinearForm::Xi(i) => v(i),
            LinearForm::Diff(i, j) => &v(i) - &v(j),
            LinearForm::Sum(i, j) => &v(i) + &v(j),
        }
    }

    /// Trial division order: every `x_i`, then differences, then sums.
    pub fn all(nvars: usize) -> Vec<LinearForm> {
        let mut out: Vec<LinearForm> = (0..nvars).map(LinearForm::Xi).collect();
        for i in 0..nvars {
            for j in i + 1..nvars {
                out.push(LinearForm::Diff(i, j));
            }
        }
        for i in 0..nvars {
            for j in i + 1..nvars {
                out.push(LinearForm::Sum(i, j));
            }
        }
        out
    }

    /// One node: the input, or a single rounded sum or difference of inputs.
    pub fn emit(&self, b: &mut DagBuilder) -> NodeId {
        match *self {
            LinearForm::Xi(i) => b.input(i),
            LinearForm::Diff(i, j) => {
                let (x, y) = (b.input(i), b.input(j));
                b.sub(x, y)
            }
            LinearForm::Sum(i, j) => {
                let (x, y) = (b.input(i), b.input(j));
                b.add(x, y)
            }
        }
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LinearForm::Xi(i) => write!(f, "x{}", i + 1),
            LinearForm::Diff(i, j) => write!(f, "(x{} - x{})", i + 1, j + 1),
            LinearForm::Sum(i, j) => write!(f, "(x{} + x{})", i + 1, j + 1),
        }
    }
}

/// `p = constant * prod form^power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllowableFactorization {
    pub constant: BigInt,
    pub factors: Vec<(LinearForm, u32)>,
}

impl AllowableFactorization {
    pub fn expand(&self, nvars: usize) -> SparsePoly {
        self.factors
            .iter()
            .fold(SparsePoly::constant(nvars, self.constant.clone()), |acc, (f, k)| &acc * &f.to_poly(nvars).pow(*k))
    }

    /// Product of factor powers left to right, then the constant by an
    /// addition chain (and a final negation if negative).
    pub fn emit(&self, nvars: usize) -> Result<ExprDag, DagError> {
        let mut b = DagBuilder::new(nvars);
        if self.constant.is_zero() {
            let z = b.constant(Rational::zero());
            return b.finish(z);
        }
        let nodes: Vec<NodeId> = self
            .factors
            .iter()
            .map(|(f, k)| {
                let n = f.emit(&mut b);
                b.power(n, *k)
            })
            .collect();
        let root = match b.product(&nodes) {
            None => b.constant(Rational::from_integer(self.constant.clone())),
            Some(p) if self.constant.is_one() => p,
            Some(p) => b.scale_int(p, &self.constant),
        };
        b.finish(root)
    }
}

impl fmt::Display for AllowableFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (form, k) in &self.factors {
            if *k == 1 {
                write!(f, " * {form}")?;
            } else {
                write!(f, " * {form}^{k}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    EvaluableComplex,
    NotEvaluableComplex,
    EvaluableWithBlackBoxes,
    Unknown,
}

impl Answer {
    pub fn is_yes(&self) -> bool {
        matches!(self, Answer::EvaluableComplex | Answer::EvaluableWithBlackBoxes)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    None,
    Factorization(AllowableFactorization),
    BoxFactors(BoxFactorization),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub answer: Answer,
    pub witness: Witness,
    pub emitted: Option<ExprDag>,
    /// Why an `Unknown` was returned, if there is more to say.
    pub note: Option<String>,
}

impl Verdict {
    fn no() -> Self {
        Verdict {
            answer: Answer::NotEvaluableComplex,
            witness: Witness::None,
            emitted: None,
            note: None,
        }
    }
}

/// Trial-divides by `x_i`, `x_i - x_j`, `x_i + x_j` (in that order, each to
/// its maximal power). Yes exactly when what is left is a constant. A
/// nonzero constant term is an immediate no.
pub fn decide_complex(p: &SparsePoly) -> Verdict {
    let n = p.nvars();
    if p.is_zero() {
        let f = AllowableFactorization {
            constant: BigInt::zero(),
            factors: vec![],
        };
        let dag = f.emit(n).expect("valid dag");
        return Verdict {
            answer: Answer::EvaluableComplex,
            witness: Witness::Factorization(f),
            emitted: Some(dag),
            note: None,
        };
    }
    if !p.constant_term().is_zero() {
        return Verdict::no();
    }
    let (rem, factors) = divide_out(p, &LinearForm::all(n));
    if !rem.is_constant() {
        return Verdict::no();
    }
    let f = AllowableFactorization {
        constant: rem.constant_term(),
        factors,
    };
    let dag = f.emit(n).expect("valid dag");
    Verdict {
        answer: Answer::EvaluableComplex,
        witness: Witness::Factorization(f),
        emitted: Some(dag),
        note: None,
    }
}

pub(crate) fn divide_out(p: &SparsePoly, forms: &[LinearForm]) -> (SparsePoly, Vec<(LinearForm, u32)>) {
    let n = p.nvars();
    let mut rem = p.clone();
    let mut factors = Vec::new();
    for form in forms {
        let q = form.to_poly(n);
        let mut k = 0;
        while let Some(r) = rem.div_exact(&q) {
            rem = r;
            k += 1;
        }
        if k > 0 {
            factors.push((*form, k));
        }
    }
    (rem, factors)
}

/// NIC report of the emitted DAG with every input of unknown sign; `None`
/// when nothing was emitted.
pub fn check_nic_emission(v: &Verdict) -> Option<NicReport> {
    v.emitted.as_ref().map(|d| classify_nic(d, &vec![SignInfo::Free; d.nvars()]))
}
