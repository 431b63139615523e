use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::Zero;

use super::DecideError;
use crate::arith::Rational;
use crate::poly::{Monomial, SparsePoly};

/// Exact lower hulls are only computed in this many component variables.
pub const MAX_COMPONENT_VARS: usize = 3;

/// One face of the Newton polytope that is minimal for a nonnegative
/// direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    /// Projected exponents on the face, sorted.
    pub lambdas: Vec<Vec<u32>>,
    /// Nonnegative integer direction, primitive; the face is where
    /// `eta . lambda` is smallest.
    pub eta: Vec<i64>,
    pub p_dom: SparsePoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominantTermReport {
    pub component: Vec<usize>,
    pub facets: Vec<Facet>,
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cross(a: &[i64], b: &[i64]) -> [i64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Nonnegative primitive multiple of `v` or of `-v`, if either exists.
fn orient(v: &[i64]) -> Option<Vec<i64>> {
    if v.iter().all(|&x| x == 0) {
        return None;
    }
    let s = if v.iter().all(|&x| x >= 0) {
        1
    } else if v.iter().all(|&x| x <= 0) {
        -1
    } else {
        return None;
    };
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    Some(v.iter().map(|&x| s * x / g).collect())
}

/// Candidate directions: the extreme rays of every normal cone cut by the
/// nonnegative orthant lie among these.
fn candidate_directions(points: &[Vec<i64>], k: usize) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    let unit = |i: usize| (0..k).map(|j| (i == j) as i64).collect::<Vec<_>>();
    for i in 0..k {
        out.insert(unit(i));
    }
    let mut diffs: Vec<Vec<i64>> = Vec::new();
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            diffs.push(points[a].iter().zip(&points[b]).map(|(x, y)| x - y).collect());
        }
    }
    match k {
        1 => {}
        2 => {
            for d in &diffs {
                out.extend(orient(&[d[1], -d[0]]));
            }
        }
        _ => {
            let mut planes = diffs.clone();
            planes.extend((0..3).map(unit));
            for a in 0..planes.len() {
                for b in a + 1..planes.len() {
                    out.extend(orient(&cross(&planes[a], &planes[b])));
                }
            }
        }
    }
    out
}

/// Dominant terms of `p` near the component where every variable in
/// `component_vars` vanishes.
///
/// Exponents are projected onto the component variables; each face of their
/// convex hull that is minimal for some nonzero `eta >= 0` gives the sum of
/// the terms whose projection lies on it. Only faces maximal under inclusion
/// are reported.
pub fn dominant_terms(p: &SparsePoly, component_vars: &[usize]) -> Result<DominantTermReport, DecideError> {
    let k = component_vars.len();
    if k == 0 {
        return Err(DecideError::DegenerateComponent("no component variables".into()));
    }
    if k > MAX_COMPONENT_VARS {
        return Err(DecideError::TooManyComponentVars(k));
    }
    if let Some(&v) = component_vars.iter().find(|&&v| v >= p.nvars()) {
        return Err(DecideError::BadVariable(v));
    }
    if component_vars.iter().collect::<BTreeSet<_>>().len() != k {
        return Err(DecideError::DegenerateComponent("repeated component variable".into()));
    }
    if p.is_zero() {
        return Err(DecideError::DegenerateComponent("polynomial is identically zero".into()));
    }

    let project = |e: &Monomial| component_vars.iter().map(|&v| e[v] as i64).collect::<Vec<i64>>();
    let mut groups: BTreeMap<Vec<i64>, Vec<(Monomial, num_bigint::BigInt)>> = BTreeMap::new();
    for (e, c) in p.terms() {
        groups.entry(project(e)).or_default().push((e.clone(), c.clone()));
    }
    let points: Vec<Vec<i64>> = groups.keys().cloned().collect();

    let mut faces: BTreeMap<Vec<usize>, Vec<i64>> = BTreeMap::new();
    for eta in candidate_directions(&points, k) {
        let vals: Vec<i64> = points.iter().map(|l| dot(&eta, l)).collect();
        let m = *vals.iter().min().expect("nonempty");
        let face: Vec<usize> = (0..points.len()).filter(|&i| vals[i] == m).collect();
        faces.entry(face).or_insert(eta);
    }
    let maximal: Vec<(&Vec<usize>, &Vec<i64>)> = faces
        .iter()
        .filter(|(f, _)| {
            !faces
                .keys()
                .any(|g| g.len() > f.len() && f.iter().all(|i| g.contains(i)))
        })
        .collect();

    let facets = maximal
        .into_iter()
        .map(|(face, eta)| {
            let terms = face
                .iter()
                .flat_map(|&i| groups[&points[i]].iter().map(|(e, c)| (c.clone(), e.clone())));
            Facet {
                lambdas: face.iter().map(|&i| points[i].iter().map(|&x| x as u32).collect()).collect(),
                eta: eta.clone(),
                p_dom: SparsePoly::from_terms(p.nvars(), terms),
            }
        })
        .collect();
    Ok(DominantTermReport {
        component: component_vars.to_vec(),
        facets,
    })
}

/// `p_dom(x(t)) / p(x(t))` along `x_i(t) = t^eta_i x0_i` on the component
/// variables; `None` where `p(x(t))` vanishes.
pub fn validate_dominance(
    p: &SparsePoly,
    report: &DominantTermReport,
    facet: usize,
    x0: &[Rational],
    t: &Rational,
) -> Option<Rational> {
    let f = &report.facets[facet];
    let mut x = x0.to_vec();
    for (&v, &e) in report.component.iter().zip(&f.eta) {
        x[v] = &x[v] * num_traits::pow(t.clone(), e as usize);
    }
    let den = p.eval_rational(&x);
    if den.is_zero() {
        return None;
    }
    Some(f.p_dom.eval_rational(&x) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use num_traits::One;

    fn example() -> SparsePoly {
        parse_poly("x2^8*x3^12 + x1^2*x2^2*x3^14 + x1^8*x3^12 + x1^6*x2^14 + x1^10*x2^6*x3^4").unwrap()
    }

    #[test]
    fn worked_example_edges() {
        let r = dominant_terms(&example(), &[0, 1]).unwrap();
        let sets: Vec<Vec<Vec<u32>>> = r.facets.iter().map(|f| f.lambdas.clone()).collect();
        assert_eq!(sets.len(), 2);
        assert!(sets.contains(&vec![vec![0, 8], vec![2, 2]]));
        assert!(sets.contains(&vec![vec![2, 2], vec![8, 0]]));
        let f = r.facets.iter().find(|f| f.lambdas.contains(&vec![8, 0])).unwrap();
        assert_eq!(f.eta, vec![1, 3]);
        assert_eq!(f.p_dom, parse_poly("x1^2*x2^2*x3^14 + x1^8*x3^12").unwrap());
    }

    #[test]
    fn monomial_and_quadratic_form() {
        let m = parse_poly("5*x1^3*x2*x3^2").unwrap();
        let r = dominant_terms(&m, &[0, 1]).unwrap();
        assert_eq!(r.facets.len(), 1);
        assert_eq!(r.facets[0].p_dom, m);
        let q = parse_poly("2*x1^2 + 7*x1*x2 + 3*x2^2").unwrap();
        let r = dominant_terms(&q, &[0, 1]).unwrap();
        assert_eq!(r.facets.len(), 1);
        assert_eq!(r.facets[0].p_dom, q);
        assert_eq!(r.facets[0].eta, vec![1, 1]);
    }

    #[test]
    fn ratio_tends_to_one() {
        let p = example();
        let r = dominant_terms(&p, &[0, 1]).unwrap();
        let x0 = [Rational::new(3.into(), 7.into()), Rational::new((-2).into(), 5.into()), Rational::from_integer(2.into())];
        for i in 0..r.facets.len() {
            let dev = |t: i64| {
                let t = Rational::new(1.into(), t.into());
                let q = validate_dominance(&p, &r, i, &x0, &t).unwrap();
                num_traits::Signed::abs(&(q - Rational::one()))
            };
            let (a, b, c) = (dev(10), dev(100), dev(1000));
            assert!(b < a && c < b, "facet {i}");
            assert!(c < Rational::new(1.into(), 1000.into()));
        }
    }

    #[test]
    fn three_component_vars() {
        let p = parse_poly("x1^2 + x2^2 + x3^2 + x1^2*x2^2*x3^2").unwrap();
        let r = dominant_terms(&p, &[0, 1, 2]).unwrap();
        assert_eq!(r.facets.len(), 1);
        assert_eq!(r.facets[0].p_dom, parse_poly("x1^2 + x2^2 + x3^2").unwrap());
        assert_eq!(r.facets[0].eta, vec![1, 1, 1]);

        // x1^3*x2 shares the face x3 = 0 with the first two squares
        let p = parse_poly("x1^2 + x2^2 + x3^2 + x1^3*x2").unwrap();
        let r = dominant_terms(&p, &[0, 1, 2]).unwrap();
        assert_eq!(r.facets.len(), 2);
        let f = r.facets.iter().find(|f| f.eta == vec![0, 0, 1]).unwrap();
        assert_eq!(f.p_dom, crate::poly::parse_poly_in("x1^2 + x2^2 + x1^3*x2", 3).unwrap());
    }

    #[test]
    fn errors() {
        let p = example();
        assert!(matches!(dominant_terms(&p, &[]), Err(DecideError::DegenerateComponent(_))));
        assert!(matches!(dominant_terms(&SparsePoly::zero(3), &[0]), Err(DecideError::DegenerateComponent(_))));
        assert_eq!(dominant_terms(&p, &[0, 1, 2, 0]), Err(DecideError::TooManyComponentVars(4)));
        assert_eq!(dominant_terms(&p, &[5]), Err(DecideError::BadVariable(5)));
    }
}
