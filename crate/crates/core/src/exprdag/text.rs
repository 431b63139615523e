use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{BlackBox, DagError, ExprDag, Node, Op};
use crate::arith::{format_rational, parse_rational};
use crate::poly::parse_poly_in;

impl ExprDag {
    /// Line-oriented text form:
    ///
    /// ```text
    /// inputs 3
    /// box fma 3 general x1 + x2*x3
    /// n0 = input 1
    /// n1 = const -3/4
    /// n2 = mul n0 n1 round
    /// root n2
    /// ```
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "inputs {}", self.nvars).unwrap();
        for b in self.boxes.values() {
            let kind = if b.affine { "affine" } else { "general" };
            writeln!(s, "box {} {} {} {}", b.name, b.arity, kind, b.poly).unwrap();
        }
        for (id, n) in self.nodes.iter().enumerate() {
            let head = match &n.op {
                Op::Input(i) => format!("input {}", i + 1),
                Op::Const(c) => format!("const {}", format_rational(c)),
                Op::Neg => "neg".into(),
                Op::Add => "add".into(),
                Op::Sub => "sub".into(),
                Op::Mul => "mul".into(),
                Op::Div => "div".into(),
                Op::BlackBox(name) => format!("box {name}"),
            };
            write!(s, "n{id} = {head}").unwrap();
            for a in &n.args {
                write!(s, " n{a}").unwrap();
            }
            if n.rounds {
                write!(s, " round").unwrap();
            }
            s.push('\n');
        }
        writeln!(s, "root n{}", self.root).unwrap();
        s
    }

    pub fn from_text(text: &str) -> Result<ExprDag, DagError> {
        let mut nvars: Option<usize> = None;
        let mut boxes = BTreeMap::new();
        let mut nodes: Vec<Node> = Vec::new();
        let mut root = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let perr = |m: String| DagError::Parse { line, message: m };
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            match toks[0] {
                "inputs" => {
                    let n = toks.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| perr("bad input count".into()))?;
                    nvars = Some(n);
                }
                "box" => {
                    if toks.len() < 5 {
                        return Err(perr("box needs name, arity, kind and polynomial".into()));
                    }
                    let arity: usize = toks[2].parse().map_err(|_| perr("bad arity".into()))?;
                    let affine = match toks[3] {
                        "affine" => true,
                        "general" => false,
                        k => return Err(perr(format!("unknown box kind {k}"))),
                    };
                    let poly_text = toks[4..].join(" ");
                    let poly = parse_poly_in(&poly_text, arity).map_err(|e| perr(e.to_string()))?;
                    let b = BlackBox::new(toks[1], poly, affine).map_err(|e| perr(e.to_string()))?;
                    boxes.insert(b.name.clone(), b);
                }
                "root" => {
                    let r = toks.get(1).and_then(|t| node_ref(t)).ok_or_else(|| perr("bad root".into()))?;
                    root = Some(r);
                }
                t if t.starts_with('n') => {
                    let id = node_ref(t).ok_or_else(|| perr(format!("bad node id {t}")))?;
                    if id != nodes.len() {
                        return Err(perr(format!("expected n{}, found {t}", nodes.len())));
                    }
                    if toks.get(1) != Some(&"=") || toks.len() < 3 {
                        return Err(perr("expected 'nK = op ...'".into()));
                    }
                    let mut rest = &toks[3..];
                    let rounds = rest.last() == Some(&"round");
                    if rounds {
                        rest = &rest[..rest.len() - 1];
                    }
                    let (op, args) = match toks[2] {
                        "input" => {
                            let i: usize = rest.first().and_then(|t| t.parse().ok()).filter(|&i| i >= 1).ok_or_else(|| perr("bad input index".into()))?;
                            (Op::Input(i - 1), &rest[1..])
                        }
                        "const" => {
                            let c = rest.first().ok_or_else(|| perr("missing constant".into()))?;
                            let c = parse_rational(c).map_err(|e| perr(e.to_string()))?;
                            (Op::Const(c), &rest[1..])
                        }
                        "box" => {
                            let name = rest.first().ok_or_else(|| perr("missing box name".into()))?;
                            (Op::BlackBox(name.to_string()), &rest[1..])
                        }
                        "neg" => (Op::Neg, rest),
                        "add" => (Op::Add, rest),
                        "sub" => (Op::Sub, rest),
                        "mul" => (Op::Mul, rest),
                        "div" => (Op::Div, rest),
                        o => return Err(perr(format!("unknown op {o}"))),
                    };
                    let args = args
                        .iter()
                        .map(|t| node_ref(t).ok_or_else(|| perr(format!("bad argument {t}"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    nodes.push(Node { op, args, rounds });
                }
                t => return Err(perr(format!("unknown directive {t}"))),
            }
        }
        let nvars = nvars.ok_or(DagError::Parse { line: 0, message: "missing inputs line".into() })?;
        let root = root.ok_or(DagError::Parse { line: 0, message: "missing root line".into() })?;
        ExprDag::new(nvars, nodes, root, boxes)
    }
}

fn node_ref(t: &str) -> Option<usize> {
    t.strip_prefix('n')?.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprdag::DagBuilder;
    use crate::poly::parse_poly;

    #[test]
    fn round_trip() {
        let mut b = DagBuilder::new(3);
        b.register_box(BlackBox::new("fma", parse_poly("x1+x2*x3").unwrap(), false).unwrap());
        let (x, y, z) = (b.input(0), b.input(1), b.input(2));
        let c = b.constant(crate::arith::parse_rational("-3/4").unwrap());
        let m = b.mul(x, c);
        let n = b.neg(m);
        let f = b.call("fma", vec![n, y, z]);
        let d = b.finish(f).unwrap();
        let t = d.to_text();
        assert!(t.contains("n4 = mul n0 n3 round"));
        assert_eq!(ExprDag::from_text(&t).unwrap(), d);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            ExprDag::from_text("inputs 1\nn0 = input 1\nn2 = neg n0\nroot n0"),
            Err(DagError::Parse { line: 3, .. })
        ));
        assert!(ExprDag::from_text("inputs 1\nn0 = input 1\n").is_err());
        assert!(ExprDag::from_text("inputs 1\nn0 = input 1\nn1 = neg n0 round\nroot n1").is_err());
    }
}
