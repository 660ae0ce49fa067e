//! Newton polygons of q-difference operators and formal twisted solutions.
//!
//! The polygon of `Σ a_i σ_q^i` is the lower convex hull of the points
//! `(i, v_0(a_i))`; slopes are read left to right and so increase. An edge of
//! slope `μ` corresponds to solutions behaving like a theta function `e` with
//! `σ_q(e) = c z^μ e`, i.e. to the `z^{-μ}` blocks of the system written for
//! `1/y`. Solutions are formal only; convergence is not certified.

use std::collections::{BTreeMap, BTreeSet};

use num::integer::lcm;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::MatrixOverRat;
use crate::operator::OperatorSpec;
use crate::ratfun::PuiseuxTrunc;
use crate::scalars::{rat_int, Exponent, Monomial, QPoly, QScalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    pub points: Vec<(usize, Exponent)>,
    pub hull: Vec<(usize, Exponent)>,
    pub slopes: Vec<(Exponent, usize)>,
    pub l: u32,
}

fn cross(o: &(usize, Exponent), a: &(usize, Exponent), b: &(usize, Exponent)) -> BigRational {
    let (ax, ay) = (rat_int(a.0 as i64 - o.0 as i64), a.1.value() - o.1.value());
    let (bx, by) = (rat_int(b.0 as i64 - o.0 as i64), b.1.value() - o.1.value());
    ax * by - ay * bx
}

/// Lower hull of points sorted by abscissa; collinear points are dropped.
pub fn lower_hull(points: &[(usize, Exponent)]) -> Vec<(usize, Exponent)> {
    let mut hull: Vec<(usize, Exponent)> = Vec::new();
    for p in points {
        while hull.len() >= 2
            && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p).is_positive()
        {
            hull.pop();
        }
        hull.push(p.clone());
    }
    hull
}

pub fn newton_polygon(op: &OperatorSpec) -> Result<NewtonPolygon> {
    op.check_nondegenerate()?;
    let points: Vec<(usize, Exponent)> = op
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, a)| a.valuation().map(|v| (i, Exponent::from_int(v as i64))))
        .collect();
    let hull = lower_hull(&points);
    let slopes: Vec<(Exponent, usize)> = hull
        .windows(2)
        .map(|w| {
            let len = w[1].0 - w[0].0;
            let s = (w[1].1.value() - w[0].1.value()) / rat_int(len as i64);
            (Exponent::from_rational(s), len)
        })
        .collect();
    let l = slopes.iter().fold(1u32, |acc, (s, _)| {
        lcm(acc, s.denom().to_u32().expect("small slope denominator"))
    });
    Ok(NewtonPolygon {
        points,
        hull,
        slopes,
        l,
    })
}

/// A formal solution `y = Y / e` of the operator, where `σ_q(e) = c z^r e`
/// and `Y ∈ C((z^{1/l}))`. Equivalently `Y` solves `σ_q(Y) = c z^r A Y`.
#[derive(Clone, Debug, Serialize)]
pub struct TwistedSolution {
    pub c: Monomial,
    pub r: Exponent,
    pub l: u32,
    pub y: PuiseuxTrunc,
    pub slope_index: usize,
    pub indicial_roots: Vec<Monomial>,
    pub residual_valuation: Exponent,
}

/// Twisted operator `Σ T_i σ_q^i` acting on `Y`, normalized so that
/// `min_i v_0(T_i) = 0`. Coefficients are indexed by exponent times `l`.
struct Twisted {
    coeffs: Vec<BTreeMap<i64, QScalar>>,
    shifts: Vec<Exponent>,
    scalars: Vec<QScalar>,
}

fn twist(op: &OperatorSpec, mu: &Exponent, w_min: &Exponent, x: &Monomial, l: u32) -> Twisted {
    let mut coeffs = Vec::new();
    let mut shifts = Vec::new();
    let mut scalars = Vec::new();
    for (i, a) in op.coeffs().iter().enumerate() {
        let ii = rat_int(i as i64);
        let shift = Exponent::from_rational(-(mu.value() * &ii) - w_min.value());
        let tri = rat_int((i as i64) * (i as i64 - 1) / 2);
        let unit = x
            .pow(i as i64)
            .mul(&Monomial::q_pow(Exponent::from_rational(
                -(mu.value() * tri),
            )));
        let scalar = QScalar::from_monomial(&unit);
        let mut m = BTreeMap::new();
        for (k, c) in a.coeffs() {
            let e = (rat_int(*k as i64) + shift.value()) * rat_int(l as i64);
            debug_assert!(e.is_integer());
            m.insert(
                e.to_integer().to_i64().expect("small exponent"),
                c.mul(&scalar),
            );
        }
        coeffs.push(m);
        shifts.push(shift);
        scalars.push(scalar);
    }
    Twisted {
        coeffs,
        shifts,
        scalars,
    }
}

/// Leading coefficients `κ_i` on the chosen edge: `P(X) = Σ κ_i q^{-μ i(i-1)/2} X^i`.
fn indicial_coefficients(
    op: &OperatorSpec,
    mu: &Exponent,
    w_min: &Exponent,
) -> BTreeMap<usize, QScalar> {
    let mut out = BTreeMap::new();
    for (i, a) in op.coeffs().iter().enumerate() {
        let Some(v) = a.valuation() else { continue };
        let w = rat_int(v as i64) - mu.value() * rat_int(i as i64);
        if &w == w_min.value() {
            let tri = rat_int((i as i64) * (i as i64 - 1) / 2);
            let unit = Monomial::q_pow(Exponent::from_rational(-(mu.value() * tri)));
            out.insert(i, a.coeff(v).scale(&unit));
        }
    }
    out
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n.abs();
    if n.bits() > 48 {
        return Err(Error::NonMonomialIndicial(format!(
            "coefficient {n} is too large for the rational root search"
        )));
    }
    let v = n.to_u64().expect("48-bit value");
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v.is_multiple_of(d) {
            out.push(BigInt::from(d));
            if d * d != v {
                out.push(BigInt::from(v / d));
            }
        }
        d += 1;
    }
    Ok(out)
}

/// Nonzero rational roots of `Σ g_i c^i`.
fn rational_roots(g: &BTreeMap<usize, BigRational>) -> Result<Vec<BigRational>> {
    let g: BTreeMap<usize, BigRational> = g
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, v)| (*k, v.clone()))
        .collect();
    if g.len() < 2 {
        return Ok(Vec::new());
    }
    let den = g.values().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: BTreeMap<usize, BigInt> = g
        .iter()
        .map(|(k, v)| {
            (
                *k,
                (v * BigRational::from_integer(den.clone())).to_integer(),
            )
        })
        .collect();
    let (low, a0) = ints.iter().next().expect("two terms");
    let (_, an) = ints.iter().next_back().expect("two terms");
    let eval = |c: &BigRational| -> bool {
        ints.iter()
            .fold(BigRational::zero(), |acc, (k, v)| {
                acc + BigRational::from_integer(v.clone()) * num::pow(c.clone(), k - low)
            })
            .is_zero()
    };
    let mut roots = BTreeSet::new();
    for p in divisors(a0)? {
        for d in divisors(an)? {
            for sign in [1, -1] {
                let c = BigRational::new(p.clone() * sign, d.clone());
                if eval(&c) {
                    roots.insert(c);
                }
            }
        }
    }
    Ok(roots.into_iter().collect())
}

/// All monomial roots of `Σ_i K_i X^i`.
pub fn monomial_roots(poly: &BTreeMap<usize, QScalar>) -> Result<Vec<Monomial>> {
    let den = poly
        .values()
        .fold(QPoly::one(), |acc, k| acc.mul(&k.denom()));
    let mut terms: Vec<(usize, Monomial)> = Vec::new();
    for (i, k) in poly {
        let cofactor = den
            .div_exact(&k.denom())
            .ok_or_else(|| Error::NonMonomialIndicial("denominator did not clear".into()))?;
        let cleared = k.numer().mul(&cofactor);
        terms.extend(cleared.terms().iter().map(|t| (*i, t.monomial())));
    }
    let mut candidates: BTreeSet<(Exponent, Exponent)> = BTreeSet::new();
    for (i, t) in &terms {
        for (j, u) in &terms {
            if j > i {
                let d = rat_int((j - i) as i64);
                candidates.insert((
                    Exponent::from_rational((t.r.value() - u.r.value()) / &d),
                    Exponent::from_rational((t.s.value() - u.s.value()) / &d),
                ));
            }
        }
    }
    let mut roots = BTreeSet::new();
    for (a, b) in candidates {
        let mut groups: BTreeMap<(Exponent, Exponent), BTreeMap<usize, BigRational>> =
            BTreeMap::new();
        for (i, t) in &terms {
            let ii = rat_int(*i as i64);
            let key = (
                Exponent::from_rational(t.r.value() + a.value() * &ii),
                Exponent::from_rational(t.s.value() + b.value() * &ii),
            );
            let g = groups
                .entry(key)
                .or_default()
                .entry(*i)
                .or_insert_with(BigRational::zero);
            *g += &t.c;
        }
        let Some(first) = groups.values().find(|g| g.values().any(|v| !v.is_zero())) else {
            continue;
        };
        for c in rational_roots(first)? {
            let x = Monomial::new(c, a.clone(), b.clone());
            let value = poly.iter().fold(QScalar::zero(), |acc, (i, k)| {
                acc.add(&k.scale(&x.pow(*i as i64)))
            });
            if value.is_zero() {
                roots.insert(x);
            }
        }
    }
    Ok(roots.into_iter().collect())
}

/// Root `x = c^{-1}` used for the twist: roots with no other root at
/// `x q^{k/l}`, `k ≥ 1`, come first, then `x = 1`, then positive coefficients.
fn choose_root(roots: &[Monomial], l: u32) -> Option<Monomial> {
    let resonant = |x: &Monomial| {
        roots.iter().any(|y| {
            let ratio = y.div(x);
            ratio.c.is_one() && ratio.s.is_zero() && in_positive_lattice(&ratio.r, l)
        })
    };
    roots
        .iter()
        .min_by_key(|x| (resonant(x), !x.is_one(), x.c.is_negative(), (*x).clone()))
        .cloned()
}

fn in_positive_lattice(e: &Exponent, l: u32) -> bool {
    let scaled = e.value() * rat_int(l as i64);
    scaled.is_integer() && scaled.is_positive()
}

/// Twisted formal solution for the edge `slope_index` (default: leftmost),
/// with coefficients of `Y` known below `order`.
pub fn puiseux_solve(
    op: &OperatorSpec,
    order: &Exponent,
    slope_index: Option<usize>,
) -> Result<TwistedSolution> {
    let polygon = newton_polygon(op)?;
    let idx = slope_index.unwrap_or(0);
    let (mu, _) = polygon.slopes.get(idx).cloned().ok_or_else(|| {
        Error::Invalid(format!(
            "slope index {idx} out of range; the polygon has {} slope(s)",
            polygon.slopes.len()
        ))
    })?;
    let l = polygon.l;
    let (i0, v0) = &polygon.hull[idx];
    let w_min = Exponent::from_rational(v0.value() - mu.value() * rat_int(*i0 as i64));
    let kappa = indicial_coefficients(op, &mu, &w_min);
    let roots = monomial_roots(&kappa)?;
    let x = choose_root(&roots, l).ok_or_else(|| {
        let shown: Vec<String> = kappa.iter().map(|(i, k)| format!("({k})*X^{i}")).collect();
        Error::NonMonomialIndicial(shown.join(" + "))
    })?;
    let tw = twist(op, &mu, &w_min, &x, l);
    let terms_needed = (order.value() * rat_int(l as i64))
        .ceil()
        .to_integer()
        .to_i64()
        .unwrap_or(0)
        .max(0);
    let q_step = |i: usize, j: i64| QScalar::q_pow(Exponent::new(i as i64 * j, l as i64));
    let mut y: Vec<QScalar> = Vec::with_capacity(terms_needed as usize);
    for k in 0..terms_needed {
        if k == 0 {
            y.push(QScalar::one());
            continue;
        }
        let mut pivot = QScalar::zero();
        let mut rhs = QScalar::zero();
        for (i, t) in tw.coeffs.iter().enumerate() {
            if let Some(c0) = t.get(&0) {
                pivot = pivot.add(&c0.mul(&q_step(i, k)));
            }
            for (e, c) in t.range(1..=k) {
                let j = k - e;
                if !y[j as usize].is_zero() {
                    rhs = rhs.add(&c.mul(&q_step(i, j)).mul(&y[j as usize]));
                }
            }
        }
        if pivot.is_zero() {
            return Err(Error::Resonance {
                index: Exponent::new(k, l as i64),
            });
        }
        y.push(rhs.neg().checked_div(&pivot)?);
    }
    let series = PuiseuxTrunc::new(
        l,
        order.clone(),
        y.into_iter()
            .enumerate()
            .map(|(k, c)| (Exponent::new(k as i64, l as i64), c)),
    );
    let residual = twisted_residual(op, &tw, &series);
    if !residual.is_zero() || residual.order() < order {
        return Err(Error::Invalid(format!(
            "twisted residual check failed: {residual}"
        )));
    }
    Ok(TwistedSolution {
        c: x.inv(),
        r: mu,
        l,
        y: series,
        slope_index: idx,
        indicial_roots: roots.iter().map(Monomial::inv).collect(),
        residual_valuation: residual.valuation_bound(),
    })
}

/// `Σ T_i σ_q^i(Y)` through the truncated-series arithmetic, independent of
/// the recursion used to build `Y`.
fn twisted_residual(op: &OperatorSpec, tw: &Twisted, y: &PuiseuxTrunc) -> PuiseuxTrunc {
    let mut acc: Option<PuiseuxTrunc> = None;
    for (i, a) in op.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let exact_to = Exponent::from_rational(
            rat_int(a.degree().unwrap_or(0) as i64 + 1)
                .max(y.order().value() - tw.shifts[i].value()),
        );
        let t = PuiseuxTrunc::from_zpoly(a, exact_to)
            .shift(&tw.shifts[i])
            .scale(&tw.scalars[i]);
        let term = t.mul(&y.sigma_q_pow(i as i64));
        acc = Some(match acc {
            None => term,
            Some(s) => s.add(&term),
        });
    }
    acc.unwrap_or_else(|| PuiseuxTrunc::zero(y.order().clone()))
}

/// `A[l] = σ_q^{l-1}(A) ⋯ σ_q(A) A`.
pub fn iterate_system(a: &MatrixOverRat, l: u32) -> Result<MatrixOverRat> {
    if l == 0 {
        return Err(Error::Invalid("iteration count must be positive".into()));
    }
    let mut acc = a.clone();
    for j in 1..l {
        acc = a.sigma_q_pow(j as i64).mul(&acc);
    }
    Ok(acc)
}

/// Operator whose coefficients are all multiplied by `z^k c`.
pub fn twist_operator(op: &OperatorSpec, k: u32, c: &QScalar) -> OperatorSpec {
    OperatorSpec::new(op.coeffs().iter().map(|a| a.shift(k).scale(c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergeom::{build_operator, HypergeometricSpec};
    use crate::parse::{parse_expvec, parse_qscalar, parse_zratfun};
    use crate::ratfun::ZPoly;
    use crate::series::nphi_s;

    fn poly(s: &str) -> ZPoly {
        parse_zratfun(s).unwrap().as_poly().unwrap().clone()
    }

    fn op(cs: &[&str]) -> OperatorSpec {
        OperatorSpec::new(cs.iter().map(|c| poly(c)).collect())
    }

    fn hyper(alphas: &[&str], betas: &[&str]) -> OperatorSpec {
        let spec = HypergeometricSpec::new(
            alphas.iter().map(|a| parse_expvec(a).unwrap()).collect(),
            betas.iter().map(|b| parse_expvec(b).unwrap()).collect(),
            parse_qscalar("1").unwrap(),
        )
        .unwrap();
        build_operator(&spec).unwrap()
    }

    #[test]
    fn trivial_polygon() {
        let p = newton_polygon(&op(&["1", "1"])).unwrap();
        assert_eq!(p.slopes, vec![(Exponent::zero(), 1)]);
        assert_eq!(p.l, 1);
    }

    #[test]
    fn confluent_polygon() {
        let p = newton_polygon(&hyper(&["1/3", "1/5"], &[])).unwrap();
        assert_eq!(
            p.hull,
            vec![(0, Exponent::zero()), (2, Exponent::from_int(1))]
        );
        assert_eq!(p.slopes, vec![(Exponent::new(1, 2), 2)]);
        assert_eq!(p.l, 2);
    }

    #[test]
    fn degenerate_operator() {
        assert!(matches!(
            newton_polygon(&op(&["0", "1"])),
            Err(Error::DegenerateOperator(_))
        ));
    }

    #[test]
    fn rank_one_twist() {
        let s = puiseux_solve(&op(&["-z", "1"]), &Exponent::from_int(5), None).unwrap();
        assert!(s.c.is_one());
        assert_eq!(s.r, Exponent::from_int(-1));
        assert_eq!(s.y.terms().len(), 1);
    }

    #[test]
    fn hypergeometric_series_is_recovered() {
        let o = hyper(&["1/3", "1/5"], &["1"]);
        let s = puiseux_solve(&o, &Exponent::from_int(10), None).unwrap();
        assert!(s.c.is_one());
        assert!(s.r.is_zero());
        let spec = HypergeometricSpec::new(
            vec![parse_expvec("1/3").unwrap(), parse_expvec("1/5").unwrap()],
            vec![parse_expvec("1").unwrap()],
            QScalar::one(),
        )
        .unwrap();
        assert_eq!(s.y, nphi_s(&spec, 10).unwrap());
    }

    #[test]
    fn confluent_solution_is_ramified() {
        let s = puiseux_solve(&hyper(&["1/3", "1/5"], &[]), &Exponent::from_int(4), None).unwrap();
        assert_eq!(s.l, 2);
        assert!(s.y.terms().keys().any(|e| !e.is_integer()));
        assert!(s.residual_valuation >= Exponent::from_int(4));
    }

    #[test]
    fn iteration_of_diagonal() {
        let a = MatrixOverRat::diag(vec![parse_zratfun("z").unwrap()]);
        assert_eq!(iterate_system(&a, 1).unwrap(), a);
        let a2 = iterate_system(&a, 2).unwrap();
        assert_eq!(*a2.get(0, 0), parse_zratfun("q*z^2").unwrap());
    }
}
