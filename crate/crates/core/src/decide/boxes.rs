use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{decide_complex, Answer, LinearForm, Verdict, Witness};
use crate::arith::Rational;
use crate::exprdag::{BlackBox, DagBuilder, DagError, ExprDag, NodeId};
use crate::poly::SparsePoly;

/// Above this many box instantiations the search gives up with `Unknown`.
pub const MAX_INSTANTIATIONS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoxArg {
    Zero,
    Pos(usize),
    Neg(usize),
}

impl BoxArg {
    fn to_poly(self, nvars: usize) -> SparsePoly {
        match self {
            BoxArg::Zero => SparsePoly::zero(nvars),
            BoxArg::Pos(i) => SparsePoly::var(nvars, i),
            BoxArg::Neg(i) => -&SparsePoly::var(nvars, i),
        }
    }

    fn emit(self, b: &mut DagBuilder) -> NodeId {
        match self {
            BoxArg::Zero => b.constant(Rational::zero()),
            BoxArg::Pos(i) => b.input(i),
            BoxArg::Neg(i) => {
                let x = b.input(i);
                b.neg(x)
            }
        }
    }
}

impl fmt::Display for BoxArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoxArg::Zero => write!(f, "0"),
            BoxArg::Pos(i) => write!(f, "x{}", i + 1),
            BoxArg::Neg(i) => write!(f, "-x{}", i + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoxFactor {
    Linear(LinearForm),
    Call { name: String, args: Vec<BoxArg> },
}

impl fmt::Display for BoxFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoxFactor::Linear(l) => write!(f, "{l}"),
            BoxFactor::Call { name, args } => {
                let a: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                write!(f, "{name}({})", a.join(", "))
            }
        }
    }
}

/// `p = constant * prod factor^power`, where each factor is a single rounded
/// operation on exact data.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxFactorization {
    pub constant: Rational,
    pub factors: Vec<(BoxFactor, u32)>,
}

impl BoxFactorization {
    pub fn expand(&self, nvars: usize, boxes: &[BlackBox]) -> Option<SparsePoly> {
        let mut acc = SparsePoly::constant(nvars, 1);
        for (f, k) in &self.factors {
            acc = &acc * &factor_poly(f, nvars, boxes)?.pow(*k);
        }
        if !self.constant.is_integer() {
            return None;
        }
        Some(acc.scale(self.constant.numer()))
    }

    fn emit(&self, nvars: usize, boxes: &[BlackBox]) -> Result<ExprDag, DagError> {
        let mut b = DagBuilder::new(nvars);
        for bx in boxes {
            b.register_box(bx.clone());
        }
        let nodes: Vec<NodeId> = self
            .factors
            .iter()
            .map(|(f, k)| {
                let n = match f {
                    BoxFactor::Linear(l) => l.emit(&mut b),
                    BoxFactor::Call { name, args } => {
                        let a = args.iter().map(|a| a.emit(&mut b)).collect();
                        b.call(name, a)
                    }
                };
                b.power(n, *k)
            })
            .collect();
        let c = &self.constant;
        let root = match b.product(&nodes) {
            None => b.constant(c.clone()),
            Some(p) if c.is_one() => p,
            Some(p) if c.is_integer() => b.scale_int(p, c.numer()),
            Some(p) => {
                let k = b.constant(c.clone());
                b.mul(p, k)
            }
        };
        b.finish(root)
    }
}

impl fmt::Display for BoxFactorization {
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

fn factor_poly(f: &BoxFactor, nvars: usize, boxes: &[BlackBox]) -> Option<SparsePoly> {
    match f {
        BoxFactor::Linear(l) => Some(l.to_poly(nvars)),
        BoxFactor::Call { name, args } => {
            let bx = boxes.iter().find(|b| &b.name == name)?;
            Some(instantiate(bx, args, nvars))
        }
    }
}

fn instantiate(bx: &BlackBox, args: &[BoxArg], nvars: usize) -> SparsePoly {
    let subs: Vec<SparsePoly> = args.iter().map(|a| a.to_poly(nvars)).collect();
    bx.poly.compose(&subs)
}

fn nth_args(mut idx: usize, arity: usize, nvars: usize) -> Vec<BoxArg> {
    let base = 2 * nvars + 1;
    (0..arity)
        .map(|_| {
            let d = idx % base;
            idx /= base;
            match d {
                0 => BoxArg::Zero,
                d if d <= nvars => BoxArg::Pos(d - 1),
                d => BoxArg::Neg(d - nvars - 1),
            }
        })
        .collect()
}

fn instantiation_count(boxes: &[BlackBox], nvars: usize) -> Option<usize> {
    let base = 2 * nvars + 1;
    boxes.iter().try_fold(0usize, |acc, b| {
        let c = base.checked_pow(b.arity as u32)?;
        acc.checked_add(c)
    })
}

struct Candidate {
    factor: BoxFactor,
    prim: SparsePoly,
    /// `candidate = scale * prim`.
    scale: BigInt,
}

/// Tries `decide_complex` first, then trial division by the traditional
/// linear forms and every instantiation of every box with arguments in
/// `{0, x_i, -x_i}`. Yes when the remainder is a constant.
///
/// A failed search answers no only if every box is affine; otherwise
/// `Unknown`.
pub fn decide_blackbox_affine(p: &SparsePoly, boxes: &[BlackBox]) -> Verdict {
    let base = decide_complex(p);
    if base.answer == Answer::EvaluableComplex {
        return base;
    }
    let n = p.nvars();
    let unknown = |note: String| Verdict {
        answer: Answer::Unknown,
        witness: Witness::None,
        emitted: None,
        note: Some(note),
    };
    match instantiation_count(boxes, n) {
        Some(c) if c <= MAX_INSTANTIATIONS => {}
        _ => return unknown(format!("more than {MAX_INSTANTIATIONS} box instantiations")),
    }

    let mut cands: Vec<Candidate> = LinearForm::all(n)
        .into_iter()
        .map(|l| Candidate {
            factor: BoxFactor::Linear(l),
            prim: l.to_poly(n),
            scale: BigInt::one(),
        })
        .collect();
    let mut seen: HashSet<SparsePoly> = cands.iter().map(|c| c.prim.clone()).collect();
    for bx in boxes {
        let total = (2 * n + 1).pow(bx.arity as u32);
        let inst: Vec<(Vec<BoxArg>, SparsePoly)> = (0..total)
            .into_par_iter()
            .map(|i| {
                let args = nth_args(i, bx.arity, n);
                let q = instantiate(bx, &args, n);
                (args, q)
            })
            .collect();
        for (args, q) in inst {
            if q.is_constant() {
                continue;
            }
            let prim = q.primitive();
            if !seen.insert(prim.clone()) {
                continue;
            }
            let scale = prim
                .leading()
                .zip(q.leading())
                .map(|((_, a), (_, b))| b / a)
                .expect("nonzero");
            cands.push(Candidate {
                factor: BoxFactor::Call {
                    name: bx.name.clone(),
                    args,
                },
                prim,
                scale,
            });
        }
    }

    let mut rem = p.clone();
    let mut factors = Vec::new();
    let mut denom = BigInt::one();
    for c in &cands {
        let mut k = 0;
        while let Some(r) = rem.div_exact(&c.prim) {
            rem = r;
            k += 1;
        }
        if k > 0 {
            denom *= num_traits::pow(c.scale.clone(), k as usize);
            factors.push((c.factor.clone(), k));
        }
    }
    if rem.is_constant() && !rem.is_zero() {
        let f = BoxFactorization {
            constant: Rational::new(rem.constant_term(), denom),
            factors,
        };
        return match f.emit(n, boxes) {
            Ok(dag) => Verdict {
                answer: Answer::EvaluableWithBlackBoxes,
                witness: Witness::BoxFactors(f),
                emitted: Some(dag),
                note: None,
            },
            Err(e) => unknown(format!("emission failed: {e}")),
        };
    }
    if boxes.iter().all(|b| b.affine && b.poly.degree().unwrap_or(0) <= 1) {
        Verdict {
            note: Some("no factorization into box instances".into()),
            ..Verdict::no()
        }
    } else {
        unknown("no factorization found; boxes are not all affine".into())
    }
}
