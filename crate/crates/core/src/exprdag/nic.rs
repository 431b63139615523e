use num_traits::{One, Signed, Zero};

use super::{DagError, ExprDag, NodeId, Op};
use crate::arith::Rational;

/// Declared sign of an input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignInfo {
    Pos,
    Neg,
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: NodeId,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NicReport {
    pub is_nic: bool,
    /// Error order per node; the root's entry bounds the whole computation.
    pub error_order: Vec<u32>,
    pub violations: Vec<Violation>,
    pub root: NodeId,
}

impl NicReport {
    pub fn root_order(&self) -> u32 {
        self.error_order[self.root]
    }
}

/// Abstract sign. `Pos`/`Neg` are weak (zero allowed). `Rel(a, s)` is the
/// sign of node `a` times `s`, which lets sums like `y + y` through when the
/// sign of `y` itself is unknown.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sgn {
    Zero,
    Pos,
    Neg,
    Rel(NodeId, i8),
    Top,
}

impl Sgn {
    fn flip(self) -> Sgn {
        match self {
            Sgn::Pos => Sgn::Neg,
            Sgn::Neg => Sgn::Pos,
            Sgn::Rel(a, s) => Sgn::Rel(a, -s),
            s => s,
        }
    }

    fn known(self) -> Option<i8> {
        match self {
            Sgn::Pos => Some(1),
            Sgn::Neg => Some(-1),
            _ => None,
        }
    }

    fn mul(self, o: Sgn) -> Sgn {
        match (self, o) {
            (Sgn::Zero, _) | (_, Sgn::Zero) => Sgn::Zero,
            (Sgn::Top, _) | (_, Sgn::Top) => Sgn::Top,
            (Sgn::Rel(a, s), Sgn::Rel(b, t)) => {
                if a == b {
                    if s * t > 0 {
                        Sgn::Pos
                    } else {
                        Sgn::Neg
                    }
                } else {
                    Sgn::Top
                }
            }
            (Sgn::Rel(a, s), k) | (k, Sgn::Rel(a, s)) => Sgn::Rel(a, s * k.known().expect("known sign")),
            (x, y) => {
                if x == y {
                    Sgn::Pos
                } else {
                    Sgn::Neg
                }
            }
        }
    }

    /// Sign of a sum when no cancellation is possible.
    fn like(self, o: Sgn) -> Option<Sgn> {
        match (self, o) {
            (Sgn::Zero, s) | (s, Sgn::Zero) => Some(s),
            (Sgn::Top, _) | (_, Sgn::Top) => None,
            (x, y) if x == y => Some(x),
            _ => None,
        }
    }
}

/// Classifies the DAG under the NIC discipline and computes error orders.
///
/// Orders: leaves 0; negation keeps its argument's order; like-signed or
/// exact-data addition `r + max`; multiplication `r + sum`; division
/// `r + K_num + 2 K_den`; a black box on exact data `r`; `r` is 1 for a
/// rounding node and 0 otherwise.
pub fn classify_nic(dag: &ExprDag, sign_info: &[SignInfo]) -> NicReport {
    assert_eq!(sign_info.len(), dag.nvars(), "one sign per input");
    let n = dag.nodes().len();
    let mut sign: Vec<Sgn> = Vec::with_capacity(n);
    let mut exact: Vec<bool> = Vec::with_capacity(n);
    let mut order: Vec<u32> = Vec::with_capacity(n);
    let mut violations = Vec::new();
    for (id, node) in dag.nodes().iter().enumerate() {
        let r = node.rounds as u32;
        let arg = |k: usize| node.args[k];
        let (s, ex, k) = match &node.op {
            Op::Input(i) => {
                let s = match sign_info[*i] {
                    SignInfo::Pos => Sgn::Pos,
                    SignInfo::Neg => Sgn::Neg,
                    SignInfo::Free => Sgn::Rel(id, 1),
                };
                (s, true, 0)
            }
            Op::Const(c) => {
                let s = if c.is_zero() {
                    Sgn::Zero
                } else if c.is_positive() {
                    Sgn::Pos
                } else {
                    Sgn::Neg
                };
                (s, true, 0)
            }
            Op::Neg => (sign[arg(0)].flip(), exact[arg(0)], order[arg(0)]),
            Op::Add | Op::Sub => {
                let (a, b) = (arg(0), arg(1));
                let sb = if node.op == Op::Sub { sign[b].flip() } else { sign[b] };
                let k = r + order[a].max(order[b]);
                let s = match sign[a].like(sb) {
                    Some(s) => s,
                    None if exact[a] && exact[b] => Sgn::Top,
                    None => {
                        violations.push(Violation {
                            node: id,
                            reason: "operands may cancel: signs unknown or opposite".into(),
                        });
                        Sgn::Top
                    }
                };
                (s, false, k)
            }
            Op::Mul => {
                let (a, b) = (arg(0), arg(1));
                let s = if a == b && sign[a] != Sgn::Zero {
                    Sgn::Pos
                } else {
                    sign[a].mul(sign[b])
                };
                (s, false, r + order[a] + order[b])
            }
            Op::Div => {
                let (a, b) = (arg(0), arg(1));
                (sign[a].mul(sign[b]), false, r + order[a] + 2 * order[b])
            }
            Op::BlackBox(name) => {
                if !node.args.iter().all(|&a| exact[a]) {
                    violations.push(Violation {
                        node: id,
                        reason: format!("black box {name} applied to rounded data"),
                    });
                }
                let k = r + node.args.iter().map(|&a| order[a]).max().unwrap_or(0);
                (Sgn::Top, false, k)
            }
        };
        sign.push(if s == Sgn::Top { Sgn::Rel(id, 1) } else { s });
        exact.push(ex);
        order.push(k);
    }
    NicReport {
        is_nic: violations.is_empty(),
        error_order: order,
        violations,
        root: dag.root(),
    }
}

/// `(1 + eps)^K - 1` for the root order `K`.
pub fn nic_error_bound(report: &NicReport, eps: &Rational) -> Result<Rational, DagError> {
    if !report.is_nic {
        return Err(DagError::NotNic);
    }
    let base = Rational::one() + eps;
    Ok(num_traits::pow(base, report.root_order() as usize) - Rational::one())
}
