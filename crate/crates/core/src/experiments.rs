//! Desk-scale accuracy experiments comparing the structured algorithms
//! against conventional double precision and a high-precision reference.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{
    highprec_eval, pow2_rational, ArithError, Dyadic, Field, FloatCtx, HighPrecConfig, MpFloat, Rational,
};
use crate::exact::{ldu, OraclePivot};
use crate::exprdag::{adversarial_search, classify_nic, DagError, DeltaAssignment, SignInfo};
use crate::matrix::Matrix;
use crate::polyeval::{motzkin_eval, motzkin_naive_dag, naive_sum3_demo, sum3_dag, PolyEvalError, Sum3Order};
use crate::structmat::{cauchy_gecp_ldu, vandermonde_minor, CauchyParams, StructError, VandermondeParams};
use crate::svd::{jacobi_onesided, rrd_svd, svd_conventional, Rrd, SvdError};

pub const MAX_SCHUR_ORDER: usize = 12;
pub const MAX_HILBERT_ORDER: usize = 10;

/// Starting precision of the reference computation; doubled until two runs
/// agree to 15 digits.
pub const ORACLE_INITIAL_BITS: u32 = 512;
pub const ORACLE_MAX_BITS: u32 = 8192;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Struct(#[from] StructError),
    #[error(transparent)]
    Svd(#[from] SvdError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    PolyEval(#[from] PolyEvalError),
    #[error(transparent)]
    Dag(#[from] DagError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaRow {
    pub index: usize,
    pub sigma_oracle: f64,
    pub sigma_conventional: f64,
    pub sigma_accurate: f64,
    pub rel_err_conv: f64,
    pub rel_err_acc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaTable {
    /// Written as `#` lines above the CSV header.
    pub notes: Vec<String>,
    pub rows: Vec<SigmaRow>,
}

pub fn rel_err(computed: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        computed.abs()
    } else {
        (computed - reference).abs() / reference.abs()
    }
}

impl SigmaTable {
    fn build(notes: Vec<String>, oracle: &[f64], conv: &[f64], acc: &[f64]) -> Self {
        let rows = (0..oracle.len())
            .map(|i| SigmaRow {
                index: i + 1,
                sigma_oracle: oracle[i],
                sigma_conventional: conv[i],
                sigma_accurate: acc[i],
                rel_err_conv: rel_err(conv[i], oracle[i]),
                rel_err_acc: rel_err(acc[i], oracle[i]),
            })
            .collect();
        SigmaTable { notes, rows }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for n in &self.notes {
            writeln!(s, "# {n}").unwrap();
        }
        s.push_str("index,sigma_oracle,sigma_conventional,sigma_accurate,rel_err_conv,rel_err_acc\n");
        for r in &self.rows {
            writeln!(
                s,
                "{},{:e},{:e},{:e},{:e},{:e}",
                r.index, r.sigma_oracle, r.sigma_conventional, r.sigma_accurate, r.rel_err_conv, r.rel_err_acc
            )
            .unwrap();
        }
        s
    }

    pub fn max_rel_err_acc(&self) -> f64 {
        self.rows.iter().map(|r| r.rel_err_acc).fold(0.0, f64::max)
    }

    /// Error of the smallest singular value from the conventional path.
    pub fn rel_err_conv_min(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.rel_err_conv)
    }
}

/// Singular values of an exact matrix, descending, by one-sided Jacobi in
/// doubling precision.
pub fn oracle_singular_values(a: &Matrix<Rational>) -> Result<Vec<Dyadic>, ExperimentError> {
    let a = if a.rows() < a.cols() { a.transpose() } else { a.clone() };
    let cfg = HighPrecConfig {
        initial_bits: ORACLE_INITIAL_BITS,
        max_bits: ORACLE_MAX_BITS,
    };
    let out = highprec_eval(
        |ctx| {
            let m = Matrix::<MpFloat>::from_rational(&a, ctx);
            jacobi_onesided(&m, ctx).map(|r| r.sigma).unwrap_or_default()
        },
        15,
        &cfg,
    )?;
    if out.len() != a.cols() {
        return Err(SvdError::NoConvergence(crate::svd::MAX_SWEEPS).into());
    }
    Ok(out)
}

/// Singular values of an exact matrix through its exact LDU with complete
/// pivoting, rounded to doubles and fed to the RRD SVD.
pub fn accurate_svd_exact_entries(a: &Matrix<Rational>) -> Result<Vec<f64>, ExperimentError> {
    let f = ldu(a, OraclePivot::Complete);
    if f.rank < a.rows().min(a.cols()) {
        return Err(StructError::Singular.into());
    }
    let ctx = FloatCtx::double();
    let rrd = Rrd::from_ldu(&f.convert::<f64>(&ctx), &ctx)?;
    Ok(rrd_svd(&rrd, &ctx)?.sigma)
}

fn to_f64s(v: &[Dyadic]) -> Vec<f64> {
    v.iter().map(Dyadic::to_f64).collect()
}

/// `V_ij = i^(j-1)`, `i, j = 1..n`.
pub fn integer_vandermonde(n: usize) -> VandermondeParams {
    VandermondeParams::new((1..=n as i64).map(|i| Rational::from_integer(i.into())).collect())
}

/// Trailing Schur complement after `k` elimination steps, each entry the
/// quotient of two Vandermonde minors.
pub fn schur_complement_exact(p: &VandermondeParams, k: usize) -> Result<Matrix<Rational>, ExperimentError> {
    let n = p.order();
    let lead: Vec<usize> = (0..k).collect();
    let den = vandermonde_minor(p, &lead, &lead)?;
    if den.is_zero() {
        return Err(StructError::Singular.into());
    }
    let mut out = Matrix::from_fn(n - k, n - k, |_, _| Rational::zero());
    for i in 0..n - k {
        for j in 0..n - k {
            let mut rows = lead.clone();
            rows.push(k + i);
            let mut cols = lead.clone();
            cols.push(k + j);
            out[(i, j)] = vandermonde_minor(p, &rows, &cols)? / &den;
        }
    }
    Ok(out)
}

/// `k` steps of Gaussian elimination without pivoting, in doubles; returns
/// the trailing block.
pub fn schur_complement_ge(a: &Matrix<f64>, k: usize) -> Matrix<f64> {
    let n = a.rows();
    let mut a = a.clone();
    for s in 0..k {
        for i in s + 1..n {
            let l = a[(i, s)] / a[(s, s)];
            for j in s + 1..n {
                let v = a[(i, j)] - l * a[(s, j)];
                a[(i, j)] = v;
            }
        }
    }
    let idx: Vec<usize> = (k..n).collect();
    a.submatrix(&idx, &idx)
}

/// Singular values of the trailing Schur complement of `V_ij = i^(j-1)`:
/// conventional (double GE then double SVD) against accurate (exact entries
/// from minor quotients, exact LDU, RRD SVD), both against the reference.
pub fn exp_schur_complement(n: usize, k: usize) -> Result<SigmaTable, ExperimentError> {
    if !(1 <= k && k < n && n <= MAX_SCHUR_ORDER) {
        return Err(ExperimentError::BadParameter(format!(
            "need 1 <= k < n <= {MAX_SCHUR_ORDER}, got n={n}, k={k}"
        )));
    }
    let ctx = FloatCtx::double();
    let v = integer_vandermonde(n);
    let s = schur_complement_exact(&v, k)?;
    let oracle = to_f64s(&oracle_singular_values(&s)?);

    let vf = Matrix::<f64>::from_rational(&v.to_matrix(), &ctx);
    let conv = svd_conventional(&schur_complement_ge(&vf, k), &ctx)?;
    let acc = accurate_svd_exact_entries(&s)?;
    let notes = vec![
        format!("Schur complement of order {} of V_ij = i^(j-1), n = {n}, k = {k}", n - k),
        "singular values replace eigenvalues in this comparison".to_string(),
        format!("reference: one-sided Jacobi from {ORACLE_INITIAL_BITS} bits, doubled until 15 digits agree"),
    ];
    Ok(SigmaTable::build(notes, &oracle, &conv, &acc))
}

/// Hilbert matrix singular values: structured GECP and RRD SVD against a
/// double SVD of the rounded entries.
pub fn exp_hilbert(n: usize) -> Result<SigmaTable, ExperimentError> {
    if !(1..=MAX_HILBERT_ORDER).contains(&n) {
        return Err(ExperimentError::BadParameter(format!("need 1 <= n <= {MAX_HILBERT_ORDER}, got {n}")));
    }
    let ctx = FloatCtx::double();
    let p = CauchyParams::hilbert(n);
    let h = p.to_matrix()?;
    let oracle = to_f64s(&oracle_singular_values(&h)?);
    let f = cauchy_gecp_ldu::<f64>(&p, &ctx)?;
    let acc = rrd_svd(&Rrd::from_ldu(&f, &ctx)?, &ctx)?.sigma;
    let conv = svd_conventional(&Matrix::<f64>::from_rational(&h, &ctx), &ctx)?;
    let notes = vec![
        format!("Hilbert matrix of order {n}"),
        format!("reference: one-sided Jacobi from {ORACLE_INITIAL_BITS} bits, doubled until 15 digits agree"),
    ];
    Ok(SigmaTable::build(notes, &oracle, &conv, &acc))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderingReport {
    pub ordering: String,
    pub x: Vec<String>,
    pub witness_delta: Vec<String>,
    pub witness_rel_error: f64,
    pub search_delta: Vec<String>,
    pub search_rel_error: f64,
    /// Classifier verdict with every input of unknown sign.
    pub nic_free_signs: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImpossibilityReport {
    pub eps: String,
    pub orderings: Vec<OrderingReport>,
    /// Worst error of the left ordering at the fixed point `(1, 1/1024, -1)`.
    pub fixed_point_rel_error: f64,
}

fn strs(v: &[Rational]) -> Vec<String> {
    v.iter().map(crate::arith::format_rational).collect()
}

/// Both two-addition orderings of `x1 + x2 + x3`: the explicit witness, an
/// exhaustive search over the rounding corners, and the NIC verdict.
pub fn exp_impossibility(eps: &Rational) -> Result<ImpossibilityReport, ExperimentError> {
    let left = naive_sum3_demo(eps)?;
    let e2 = eps * eps;
    let right_x = vec![-Rational::one(), Rational::one(), e2];
    let right = crate::polyeval::sum3_witness(
        sum3_dag(Sum3Order::Right),
        right_x,
        DeltaAssignment::new(vec![-eps.clone(), Rational::zero()], eps)?,
    )?;
    let mut orderings = Vec::new();
    for (name, demo) in [("(x1 + x2) + x3", left), ("x1 + (x2 + x3)", right)] {
        let (d, err) = adversarial_search(&demo.dag, &demo.x, eps, 0)?;
        let nic = classify_nic(&demo.dag, &[SignInfo::Free; 3]).is_nic;
        orderings.push(OrderingReport {
            ordering: name.to_string(),
            x: strs(&demo.x),
            witness_delta: strs(demo.delta.values()),
            witness_rel_error: demo.rel_error.approx_f64(),
            search_delta: strs(d.values()),
            search_rel_error: err.approx_f64(),
            nic_free_signs: nic,
        });
    }
    let fixed = vec![Rational::one(), pow2_rational(-10), -Rational::one()];
    let (_, fixed_err) = adversarial_search(&sum3_dag(Sum3Order::Left), &fixed, eps, 0)?;
    Ok(ImpossibilityReport {
        eps: crate::arith::format_rational(eps),
        orderings,
        fixed_point_rel_error: fixed_err.approx_f64(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MotzkinRow {
    pub index: usize,
    pub x: [f64; 3],
    pub near_variety: bool,
    pub exact: f64,
    pub branch: f64,
    pub naive: f64,
    pub rel_err_branch: f64,
    pub rel_err_naive: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MotzkinTable {
    pub naive_precision_bits: u32,
    pub rows: Vec<MotzkinRow>,
}

impl MotzkinTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# branch evaluation in double precision, naive monomial sum at {} bits", self.naive_precision_bits)
            .unwrap();
        s.push_str("index,x1,x2,x3,near_variety,exact,branch,naive,rel_err_branch,rel_err_naive\n");
        for r in &self.rows {
            writeln!(
                s,
                "{},{:e},{:e},{:e},{},{:e},{:e},{:e},{:e},{:e}",
                r.index, r.x[0], r.x[1], r.x[2], r.near_variety, r.exact, r.branch, r.naive, r.rel_err_branch, r.rel_err_naive
            )
            .unwrap();
        }
        s
    }
}

/// Sample points: `general` uniform in `[-2, 2]^3`, then `near` points
/// within `1e-12` of the zero set `|x1| = |x2| = |x3|`. Points where the
/// polynomial vanishes exactly are redrawn.
pub fn motzkin_points(general: usize, near: usize, seed: u64) -> Vec<([f64; 3], bool)> {
    let p = crate::polyeval::motzkin_poly();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(general + near);
    let nonzero = |x: &[f64; 3]| {
        let r: Vec<Rational> = x.iter().map(Field::to_rational).collect();
        !p.eval_rational(&r).is_zero()
    };
    while out.len() < general {
        let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        if nonzero(&x) {
            out.push((x, false));
        }
    }
    while out.len() < general + near {
        let a: f64 = rng.gen_range(0.1..2.0);
        let sign = |r: &mut ChaCha8Rng| if r.gen::<bool>() { 1.0 } else { -1.0 };
        let (s1, s2, s3) = (sign(&mut rng), sign(&mut rng), sign(&mut rng));
        let u1: f64 = rng.gen_range(-3e-13..3e-13);
        let u2: f64 = rng.gen_range(-3e-13..3e-13);
        let x = [s1 * a * (1.0 + u1), s2 * a * (1.0 + u2), s3 * a];
        if nonzero(&x) {
            out.push((x, true));
        }
    }
    out
}

fn exact_rel_err(computed: &Rational, exact: &Rational) -> f64 {
    ((computed - exact) / exact).abs().approx_f64()
}

/// Branch evaluator in doubles and the naive monomial sum at
/// `naive_bits` of precision, both against the exact value.
pub fn exp_motzkin(general: usize, near: usize, seed: u64, naive_bits: u32) -> Result<MotzkinTable, ExperimentError> {
    let ev = motzkin_eval()?;
    let naive = motzkin_naive_dag();
    let p = crate::polyeval::motzkin_poly();
    let dctx = FloatCtx::double();
    let nctx = FloatCtx::new(naive_bits)?;
    let rows = motzkin_points(general, near, seed)
        .into_iter()
        .enumerate()
        .map(|(i, (x, near))| {
            let xr: Vec<Rational> = x.iter().map(Field::to_rational).collect();
            let exact = p.eval_rational(&xr);
            let b = ev.eval(&x, &dctx)?;
            let xm: Vec<MpFloat> = xr.iter().map(|r| MpFloat::from_rational(r, &nctx)).collect();
            let nv = naive.eval_float(&xm, &nctx)?;
            Ok(MotzkinRow {
                index: i + 1,
                x,
                near_variety: near,
                exact: exact.approx_f64(),
                branch: b,
                naive: nv.approx_f64(),
                rel_err_branch: exact_rel_err(&b.to_rational(), &exact),
                rel_err_naive: exact_rel_err(&nv.to_rational(), &exact),
            })
        })
        .collect::<Result<Vec<_>, DagError>>()?;
    Ok(MotzkinTable {
        naive_precision_bits: naive_bits,
        rows,
    })
}
