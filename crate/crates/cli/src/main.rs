use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hiacc::arith::{format_rational, parse_rational, Field, FloatCtx, MpFloat, Rational};
use hiacc::decide::{decide_blackbox_affine, decide_complex, dominant_terms, Answer, Verdict};
use hiacc::experiments::{exp_hilbert, exp_impossibility, exp_motzkin, exp_schur_complement};
use hiacc::io::{boxes_from_json, format_scalar, ldu_json, verdict_json, MatrixSpec, Structured};
use hiacc::poly::parse_poly;

#[derive(Parser)]
#[command(name = "hiacc", version, about = "High relative accuracy linear algebra and polynomial evaluation")]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Working precision in bits; 53 is double, 0 means exact rationals
    /// where that makes sense.
    #[arg(long, default_value_t = 53, global = true)]
    precision: u32,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FieldKind {
    Complex,
    Real,
}

#[derive(Args)]
struct MatrixArg {
    /// JSON parameter file.
    #[arg(long)]
    matrix: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Exact determinant by the structured algorithm.
    Det(MatrixArg),
    /// LDU factorisation with complete pivoting.
    Ldu(MatrixArg),
    /// Singular values through LDU, RRD and Jacobi.
    Svd(MatrixArg),
    /// Exact minor; indices are zero-based and comma separated.
    Minor {
        #[command(flatten)]
        m: MatrixArg,
        #[arg(long, value_delimiter = ',')]
        rows: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        cols: Vec<usize>,
    },
    /// Decide accurate evaluability of a polynomial.
    Decide {
        #[arg(long)]
        poly: String,
        #[arg(long, value_enum, default_value = "complex")]
        field: FieldKind,
        /// JSON list of black boxes: `[{"name": ..., "poly": ...}]`.
        #[arg(long)]
        boxes: Option<PathBuf>,
        /// One-based variables of a component `x_i = 0` for a dominant-term
        /// report.
        #[arg(long, value_delimiter = ',')]
        component: Vec<usize>,
    },
    /// Accuracy experiments.
    #[command(subcommand)]
    Exp(Exp),
}

#[derive(Subcommand)]
enum Exp {
    Schur {
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        k: usize,
    },
    Hilbert {
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    Impossibility {
        /// Unit roundoff, e.g. `2^-24`, `1/1024` or `3*2^-30`.
        #[arg(long, default_value = "2^-24")]
        eps: String,
    },
    Motzkin {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// How many of the points lie within 1e-12 of the zero set.
        #[arg(long, default_value_t = 100)]
        near: usize,
        /// Precision of the naive evaluation.
        #[arg(long, default_value_t = 25)]
        naive_bits: u32,
    },
}

enum Outcome {
    Done(String),
    DecidedNo(String),
}

fn read_matrix(m: &MatrixArg) -> Result<Structured> {
    let text = fs::read_to_string(&m.matrix).with_context(|| format!("reading {}", m.matrix.display()))?;
    Ok(MatrixSpec::from_json(&text)?.build()?)
}

fn parse_eps(s: &str) -> Result<Rational> {
    let t = s.trim();
    let t = if t.starts_with("2^") { format!("1*{t}") } else { t.to_string() };
    Ok(parse_rational(&t)?)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serialisable") + "\n"
}

fn scalar_out(name: &str, r: &Rational, format: Format) -> String {
    match format {
        Format::Json => pretty(&json!({ name: format_rational(r), "approx": r.approx_f64() })),
        Format::Csv => format!("{name},approx\n{},{:e}\n", format_rational(r), r.approx_f64()),
    }
}

fn ldu_out(s: &Structured, precision: u32) -> Result<String> {
    let v = match precision {
        0 => ldu_json(&s.ldu::<Rational>(&FloatCtx::double())?, true),
        53 => ldu_json(&s.ldu::<f64>(&FloatCtx::double())?, false),
        p => ldu_json(&s.ldu::<MpFloat>(&FloatCtx::new(p)?)?, true),
    };
    Ok(pretty(&v))
}

fn svd_out(s: &Structured, precision: u32, format: Format) -> Result<String> {
    let sigma: Vec<String> = match precision {
        0 => bail!("singular values need a floating precision"),
        53 => s.singular_values::<f64>(&FloatCtx::double())?.iter().map(|x| format_scalar(x, false)).collect(),
        p => {
            let ctx = FloatCtx::new(p)?;
            s.singular_values::<MpFloat>(&ctx)?.iter().map(|x| format_scalar(x, false)).collect()
        }
    };
    Ok(match format {
        Format::Json => pretty(&json!({ "sigma": sigma })),
        Format::Csv => {
            let mut out = String::from("index,sigma\n");
            for (i, x) in sigma.iter().enumerate() {
                out.push_str(&format!("{},{x}\n", i + 1));
            }
            out
        }
    })
}

fn decide_out(
    poly: &str,
    field: FieldKind,
    boxes: Option<&PathBuf>,
    component: &[usize],
) -> Result<(String, Answer)> {
    let p = parse_poly(poly).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut v: Verdict = match boxes {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            decide_blackbox_affine(&p, &boxes_from_json(&text)?)
        }
        None => decide_complex(&p),
    };
    if field == FieldKind::Real && v.answer == Answer::NotEvaluableComplex {
        v.answer = Answer::Unknown;
        v.note = Some("no allowable factorization; the real case is not decided".into());
    }
    let mut out = verdict_json(&v);
    if !component.is_empty() {
        if component.contains(&0) {
            bail!("component variables are one-based");
        }
        let vars: Vec<usize> = component.iter().map(|i| i - 1).collect();
        let r = dominant_terms(&p, &vars)?;
        let facets: Vec<Value> = r
            .facets
            .iter()
            .map(|f| json!({"exponents": f.lambdas, "eta": f.eta, "p_dom": f.p_dom.to_string()}))
            .collect();
        out["dominant_terms"] = json!({ "component": component, "facets": facets });
    }
    Ok((pretty(&out), v.answer))
}

fn run(cli: &Cli) -> Result<Outcome> {
    let f = cli.format;
    let text = match &cli.command {
        Command::Det(m) => scalar_out("det", &read_matrix(m)?.det()?, f),
        Command::Minor { m, rows, cols } => scalar_out("minor", &read_matrix(m)?.minor(rows, cols)?, f),
        Command::Ldu(m) => {
            if f == Format::Csv {
                bail!("ldu output is JSON only");
            }
            ldu_out(&read_matrix(m)?, cli.precision)?
        }
        Command::Svd(m) => svd_out(&read_matrix(m)?, cli.precision, f)?,
        Command::Decide { poly, field, boxes, component } => {
            if f == Format::Csv {
                bail!("decide output is JSON only");
            }
            let (text, answer) = decide_out(poly, *field, boxes.as_ref(), component)?;
            if answer == Answer::NotEvaluableComplex {
                return Ok(Outcome::DecidedNo(text));
            }
            text
        }
        Command::Exp(e) => match e {
            Exp::Schur { n, k } => {
                let t = exp_schur_complement(*n, *k)?;
                match f {
                    Format::Csv => t.to_csv(),
                    Format::Json => pretty(&serde_json::to_value(&t)?),
                }
            }
            Exp::Hilbert { n } => {
                let t = exp_hilbert(*n)?;
                match f {
                    Format::Csv => t.to_csv(),
                    Format::Json => pretty(&serde_json::to_value(&t)?),
                }
            }
            Exp::Impossibility { eps } => {
                if f == Format::Csv {
                    bail!("impossibility report is JSON only");
                }
                pretty(&serde_json::to_value(exp_impossibility(&parse_eps(eps)?)?)?)
            }
            Exp::Motzkin { count, near, naive_bits } => {
                if near > count {
                    bail!("--near cannot exceed --count");
                }
                let t = exp_motzkin(count - near, *near, cli.seed, *naive_bits)?;
                match f {
                    Format::Csv => t.to_csv(),
                    Format::Json => pretty(&serde_json::to_value(&t)?),
                }
            }
        },
    };
    Ok(Outcome::Done(text))
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|o| {
        let (text, code) = match o {
            Outcome::Done(t) => (t, 0),
            Outcome::DecidedNo(t) => (t, 2),
        };
        emit(&cli, &text).map(|_| code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
