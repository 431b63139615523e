//! JSON parameter files for structured matrices and black boxes, and the
//! operations the command line dispatches on them.
//!
//! Scalars are written as strings (`"1/3"`, `"-2"`, `"1.5e-3"`, `"3*2^-4"`)
//! or JSON integers. JSON floats are read as the exact double they denote.
//!
//! ```json
//! {"kind": "cauchy", "x": ["1", "2"], "y": ["0", "1/2"]}
//! {"kind": "hilbert", "n": 6}
//! {"kind": "dstu", "d1": [1, 2], "z": [[1, 0], [1, 1]], "d2": ["1/3", 1]}
//! ```

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{json, Value};

use crate::arith::{format_rational, parse_rational, Field, FloatCtx, Rational, Real};
use crate::decide::{check_nic_emission, Answer, Verdict, Witness};
use crate::exact::{det_ge, ldu, minor, OraclePivot};
use crate::exprdag::{BlackBox, DagError};
use crate::matrix::{Ldu, Matrix};
use crate::poly::{parse_poly, parse_poly_in};
use crate::structmat::{
    bd_det, cauchy_det, cauchy_gecp_ldu, dstu_ge, greens_minor, mmatrix_ldu, vandermonde_det, vandermonde_minor,
    AcyclicMatrix, BidiagDecomp, CauchyParams, DstuMatrix, DstuPivot, GreensParams, MMatrixParams, MPivot,
    StructError, VandermondeParams,
};
use crate::svd::{rrd_svd, Rrd, SvdError};

/// A rational read from a string, an integer or an exact float.
#[derive(Clone, Debug, PartialEq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Q;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as a string or a number")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
                parse_rational(v).map(Q).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Q, E> {
                if !v.is_finite() {
                    return Err(E::custom("non-finite number"));
                }
                Ok(Q(v.to_rational()))
            }
        }
        d.deserialize_any(V)
    }
}

fn qs(v: Vec<Q>) -> Vec<Rational> {
    v.into_iter().map(|q| q.0).collect()
}

fn qmat(rows: Vec<Vec<Q>>) -> Result<Matrix<Rational>, StructError> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(StructError::DimensionMismatch("ragged matrix".into()));
    }
    Ok(Matrix::from_rows(rows.into_iter().map(qs).collect()))
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixSpec {
    Hilbert {
        n: usize,
    },
    Cauchy {
        x: Vec<Q>,
        y: Vec<Q>,
        #[serde(default)]
        u: Option<Vec<Q>>,
        #[serde(default)]
        v: Option<Vec<Q>>,
    },
    Vandermonde {
        nodes: Vec<Q>,
    },
    Mmatrix {
        offdiag: Vec<Vec<Q>>,
        rowsums: Vec<Q>,
    },
    Dstu {
        d1: Vec<Q>,
        z: Vec<Vec<i64>>,
        d2: Vec<Q>,
    },
    Greens {
        a: Vec<Q>,
        b: Vec<Q>,
        #[serde(default)]
        c: Option<Vec<Q>>,
        #[serde(default)]
        d: Option<Vec<Q>>,
    },
    Acyclic {
        rows: usize,
        cols: usize,
        edges: Vec<(usize, usize, Q)>,
    },
    TnBidiag {
        params: Vec<Vec<Q>>,
    },
    Dense {
        entries: Vec<Vec<Q>>,
    },
}

/// A validated structured matrix.
#[derive(Clone, Debug)]
pub enum Structured {
    Cauchy(CauchyParams),
    Vandermonde(VandermondeParams),
    MMatrix(MMatrixParams),
    Dstu(DstuMatrix),
    Greens(GreensParams),
    Acyclic(AcyclicMatrix),
    TnBidiag(BidiagDecomp),
    Dense(Matrix<Rational>),
}

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Struct(#[from] StructError),
    #[error(transparent)]
    Svd(#[from] SvdError),
    #[error(transparent)]
    Dag(#[from] DagError),
    #[error("polynomial: {0}")]
    Poly(String),
}

impl MatrixSpec {
    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(self) -> Result<Structured, StructError> {
        Ok(match self {
            MatrixSpec::Hilbert { n } => Structured::Cauchy(CauchyParams::hilbert(n)),
            MatrixSpec::Cauchy { x, y, u: None, v: None } => {
                let p = CauchyParams::new(qs(x), qs(y));
                p.check()?;
                Structured::Cauchy(p)
            }
            MatrixSpec::Cauchy { x, y, u, v } => {
                let n = x.len();
                let m = y.len();
                let one = || Q(Rational::from_integer(1.into()));
                let u = u.unwrap_or_else(|| vec![one(); n]);
                let v = v.unwrap_or_else(|| vec![one(); m]);
                let p = CauchyParams::scaled(qs(x), qs(y), qs(u), qs(v))?;
                p.check()?;
                Structured::Cauchy(p)
            }
            MatrixSpec::Vandermonde { nodes } => Structured::Vandermonde(VandermondeParams::new(qs(nodes))),
            MatrixSpec::Mmatrix { offdiag, rowsums } => Structured::MMatrix(MMatrixParams::new(qmat(offdiag)?, qs(rowsums))?),
            MatrixSpec::Dstu { d1, z, d2 } => {
                let cols = z.first().map_or(0, Vec::len);
                if z.iter().any(|r| r.len() != cols) {
                    return Err(StructError::DimensionMismatch("ragged matrix".into()));
                }
                Structured::Dstu(DstuMatrix::new(qs(d1), Matrix::from_rows(z), qs(d2), false)?)
            }
            MatrixSpec::Greens { a, b, c: None, d: None } => Structured::Greens(GreensParams::symmetric(qs(a), qs(b))?),
            MatrixSpec::Greens { a, b, c, d } => {
                let (Some(c), Some(d)) = (c, d) else {
                    return Err(StructError::DimensionMismatch("give both c and d, or neither".into()));
                };
                Structured::Greens(GreensParams::new(qs(a), qs(b), qs(c), qs(d))?)
            }
            MatrixSpec::Acyclic { rows, cols, edges } => {
                let e: Vec<(usize, usize, Rational)> = edges.into_iter().map(|(i, j, q)| (i, j, q.0)).collect();
                Structured::Acyclic(AcyclicMatrix::new(rows, cols, &e)?)
            }
            MatrixSpec::TnBidiag { params } => Structured::TnBidiag(BidiagDecomp::new(qmat(params)?)?),
            MatrixSpec::Dense { entries } => Structured::Dense(qmat(entries)?),
        })
    }
}

impl Structured {
    pub fn to_matrix(&self) -> Result<Matrix<Rational>, StructError> {
        Ok(match self {
            Structured::Cauchy(p) => p.to_matrix()?,
            Structured::Vandermonde(p) => p.to_matrix(),
            Structured::MMatrix(p) => p.to_matrix(),
            Structured::Dstu(m) => m.to_matrix(),
            Structured::Greens(g) => g.to_matrix(),
            Structured::Acyclic(a) => a.to_matrix(),
            Structured::TnBidiag(b) => crate::structmat::bd_assemble::<Rational>(b, &FloatCtx::double()),
            Structured::Dense(m) => m.clone(),
        })
    }

    fn square_order(&self) -> Result<usize, StructError> {
        let m = self.to_matrix()?;
        if !m.is_square() {
            return Err(StructError::NotSquare);
        }
        Ok(m.rows())
    }

    /// Exact determinant through the structure-specific algorithm.
    pub fn det(&self) -> Result<Rational, StructError> {
        let ctx = FloatCtx::double();
        let n = self.square_order()?;
        let all: Vec<usize> = (0..n).collect();
        Ok(match self {
            Structured::Cauchy(p) => cauchy_det(p)?.1,
            Structured::Vandermonde(p) => vandermonde_det(p)?.1,
            Structured::MMatrix(p) => mmatrix_ldu::<Rational>(p, MPivot::CompleteDiagonal, &ctx)?.det(&ctx),
            Structured::Dstu(m) => dstu_ge::<Rational>(m, DstuPivot::Complete, &ctx)?.det(&ctx),
            Structured::Greens(g) => greens_minor(g, &all, &all)?,
            Structured::Acyclic(a) => a.minor(&all, &all)?,
            Structured::TnBidiag(b) => bd_det(b),
            Structured::Dense(m) => det_ge(m),
        })
    }

    /// Exact minor on zero-based row and column sets.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Result<Rational, StructError> {
        let m = self.to_matrix()?;
        crate::structmat::check_minor_sets(rows, cols, m.rows(), m.cols())?;
        Ok(match self {
            Structured::Cauchy(p) => {
                let pick = |v: &[Rational], idx: &[usize]| idx.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
                let sub = CauchyParams {
                    x: pick(&p.x, rows),
                    y: pick(&p.y, cols),
                    u: p.u.as_ref().map(|u| pick(u, rows)),
                    v: p.v.as_ref().map(|v| pick(v, cols)),
                };
                if rows.is_empty() {
                    Rational::from_integer(1.into())
                } else {
                    cauchy_det(&sub)?.1
                }
            }
            Structured::Vandermonde(p) => vandermonde_minor(p, rows, cols)?,
            Structured::Greens(g) => greens_minor(g, rows, cols)?,
            Structured::Acyclic(a) => a.minor(rows, cols)?,
            _ => minor(&m, rows, cols),
        })
    }

    /// LDU with complete pivoting in `T`; structure-specific where an
    /// accurate algorithm exists, otherwise exact elimination then rounding.
    pub fn ldu<T: Field>(&self, ctx: &FloatCtx) -> Result<Ldu<T>, StructError> {
        Ok(match self {
            Structured::Cauchy(p) => cauchy_gecp_ldu(p, ctx)?,
            Structured::MMatrix(p) => mmatrix_ldu(p, MPivot::CompleteDiagonal, ctx)?,
            Structured::Dstu(m) => dstu_ge(m, DstuPivot::Complete, ctx)?,
            _ => ldu(&self.to_matrix()?, OraclePivot::Complete).convert(ctx),
        })
    }

    /// Singular values from the LDU, through the RRD SVD.
    pub fn singular_values<T: Real>(&self, ctx: &FloatCtx) -> Result<Vec<T>, IoError> {
        let f = self.ldu::<T>(ctx)?;
        let r = Rrd::from_ldu(&f, ctx)?;
        Ok(rrd_svd(&r, ctx)?.sigma)
    }
}

/// Renders a scalar: exact rationals as `p/q`, anything else in
/// scientific notation with 17 significant digits.
pub fn format_scalar<T: Field>(x: &T, exact: bool) -> String {
    if exact {
        format_rational(&x.to_rational())
    } else {
        format!("{:e}", x.approx_f64())
    }
}

pub fn ldu_json<T: Field>(f: &Ldu<T>, exact: bool) -> Value {
    let mat = |m: &Matrix<T>| -> Vec<Vec<String>> {
        (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| format_scalar(&m[(i, j)], exact)).collect())
            .collect()
    };
    json!({
        "row_perm": f.row_perm,
        "col_perm": f.col_perm,
        "rank": f.rank,
        "l": mat(&f.l),
        "d": f.d.iter().map(|x| format_scalar(x, exact)).collect::<Vec<_>>(),
        "u": mat(&f.u),
    })
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub name: String,
    pub poly: String,
    /// Defaults to the highest variable index in `poly`.
    #[serde(default)]
    pub arity: Option<usize>,
    #[serde(default)]
    pub affine: Option<bool>,
}

impl BoxSpec {
    pub fn build(&self) -> Result<BlackBox, IoError> {
        let p = match self.arity {
            Some(n) => parse_poly_in(&self.poly, n),
            None => parse_poly(&self.poly),
        }
        .map_err(|e| IoError::Poly(e.to_string()))?;
        let affine = self.affine.unwrap_or(p.degree().unwrap_or(0) <= 1);
        Ok(BlackBox::new(&self.name, p, affine)?)
    }
}

pub fn boxes_from_json(text: &str) -> Result<Vec<BlackBox>, IoError> {
    let specs: Vec<BoxSpec> = serde_json::from_str(text)?;
    specs.iter().map(BoxSpec::build).collect()
}

pub fn answer_name(a: Answer) -> &'static str {
    match a {
        Answer::EvaluableComplex => "EvaluableComplex",
        Answer::NotEvaluableComplex => "NotEvaluableComplex",
        Answer::EvaluableWithBlackBoxes => "EvaluableWithBlackBoxes",
        Answer::Unknown => "Unknown",
    }
}

/// `{answer, witness, dag, nic, note}`; absent parts are `null`.
pub fn verdict_json(v: &Verdict) -> Value {
    let witness = match &v.witness {
        Witness::None => Value::Null,
        Witness::Factorization(f) => json!({
            "constant": f.constant.to_string(),
            "factors": f.factors.iter().map(|(l, k)| json!({"form": l.to_string(), "power": k})).collect::<Vec<_>>(),
            "text": f.to_string(),
        }),
        Witness::BoxFactors(f) => json!({
            "constant": format_rational(&f.constant),
            "factors": f.factors.iter().map(|(b, k)| json!({"form": b.to_string(), "power": k})).collect::<Vec<_>>(),
            "text": f.to_string(),
        }),
    };
    let nic = check_nic_emission(v).map(|r| json!({"is_nic": r.is_nic, "error_order": r.root_order()}));
    json!({
        "answer": answer_name(v.answer),
        "witness": witness,
        "dag": v.emitted.as_ref().map(|d| d.to_text()),
        "nic": nic,
        "note": v.note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::det_cofactor;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn scalars_in_every_form() {
        let v: Vec<Q> = serde_json::from_str(r#"["1/3", 4, -2, 0.5, "3*2^-2", "1.5e-1"]"#).unwrap();
        let want = ["1/3", "4", "-2", "1/2", "3/4", "3/20"];
        for (a, b) in v.iter().zip(want) {
            assert_eq!(a.0, q(b));
        }
        assert!(serde_json::from_str::<Q>(r#""1/0""#).is_err());
        assert_eq!(serde_json::to_string(&Q(q("-5/7"))).unwrap(), r#""-5/7""#);
    }

    #[test]
    fn every_kind_det_matches_cofactor() {
        let specs = [
            r#"{"kind": "hilbert", "n": 4}"#,
            r#"{"kind": "cauchy", "x": ["1", "3", 4], "y": ["1/2", 2, 5], "u": [1, 2, 1], "v": [3, "1/5", 1]}"#,
            r#"{"kind": "vandermonde", "nodes": [1, 2, "5/2", -1]}"#,
            r#"{"kind": "mmatrix", "offdiag": [[0, 1, 2], [1, 0, 1], [0, 3, 0]], "rowsums": [1, "1/2", 2]}"#,
            r#"{"kind": "dstu", "d1": [1, 2, 3], "z": [[1, 1, 0], [1, 1, 1], [0, 1, 1]], "d2": ["1/3", 1, 5]}"#,
            r#"{"kind": "greens", "a": [1, 2, 3], "b": [4, 5, 7]}"#,
            r#"{"kind": "greens", "a": [1, 2, 3], "b": [4, 5, 7], "c": [2, 1, 1], "d": [1, 3, 2]}"#,
            r#"{"kind": "acyclic", "rows": 3, "cols": 3, "edges": [[0, 0, 2], [1, 0, 1], [1, 1, 3], [2, 2, -1], [1, 2, "1/2"]]}"#,
            r#"{"kind": "tn_bidiag", "params": [[1, 2, 1], [1, 3, 2], ["1/2", 1, 4]]}"#,
            r#"{"kind": "dense", "entries": [[1, 2, 0], [3, 4, 5], [-1, "1/2", 2]]}"#,
        ];
        for s in specs {
            let m = MatrixSpec::from_json(s).unwrap().build().unwrap();
            let a = m.to_matrix().unwrap();
            assert_eq!(m.det().unwrap(), det_cofactor(&a), "{s}");
            let rows = [0, 2];
            let cols = [1, 2];
            assert_eq!(m.minor(&rows, &cols).unwrap(), minor(&a, &rows, &cols), "{s}");
            let f = m.ldu::<Rational>(&FloatCtx::double()).unwrap();
            assert_eq!(f.assemble(&FloatCtx::double()), a, "{s}");
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(MatrixSpec::from_json(r#"{"kind": "nope"}"#).is_err());
        assert!(MatrixSpec::from_json(r#"{"kind": "hilbert", "n": 2, "m": 1}"#).is_err());
        let bad = MatrixSpec::from_json(r#"{"kind": "dense", "entries": [[1, 2], [3]]}"#).unwrap();
        assert!(bad.build().is_err());
        let bad = MatrixSpec::from_json(r#"{"kind": "cauchy", "x": [1], "y": [-1]}"#).unwrap();
        assert!(bad.build().is_err());
    }

    #[test]
    fn singular_values_of_hilbert() {
        let m = MatrixSpec::from_json(r#"{"kind": "hilbert", "n": 2}"#).unwrap().build().unwrap();
        let s: Vec<f64> = m.singular_values(&FloatCtx::double()).unwrap();
        let r = 13f64.sqrt();
        assert!((s[0] - (4.0 + r) / 6.0).abs() < 1e-15);
        assert!(((s[1] - (4.0 - r) / 6.0) / s[1]).abs() < 1e-14);
    }

    #[test]
    fn boxes_and_verdicts() {
        let b = boxes_from_json(r#"[{"name": "fma", "poly": "x1 + x2*x3"}]"#).unwrap();
        assert!(!b[0].affine);
        let p = parse_poly("x1 + x2*x3").unwrap();
        let v = crate::decide::decide_blackbox_affine(&p, &b);
        let j = verdict_json(&v);
        assert_eq!(j["answer"], "EvaluableWithBlackBoxes");
        assert_eq!(j["nic"]["error_order"], 1);
        let dag = crate::exprdag::ExprDag::from_text(j["dag"].as_str().unwrap()).unwrap();
        assert_eq!(dag.to_poly().unwrap(), p);
        let j = verdict_json(&crate::decide::decide_complex(&parse_poly("x1+x2+x3").unwrap()));
        assert_eq!(j["answer"], "NotEvaluableComplex");
        assert!(j["dag"].is_null());
    }
}
