//! Bounded searches for rational telescopers `B`.
//!
//! Continuous (projective isomonodromy): `σ_q(B) A = A B + δ(A) - (1/n) δ(det A)/det(A) A`.
//! Discrete: `σ_q(B) A = σ_q'^d(A) B` with `B` invertible.
//!
//! `B = N(z) / Q(z)` with `Q` fixed and `deg N ≤ D`. A negative answer only
//! covers this ansatz.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linsolve::{self, LinearSystem, RankProfile, Solution};
use crate::matrix::MatrixOverRat;
use crate::ratfun::{ZPoly, ZRatFun};
use crate::scalars::{Exponent, QScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "d")]
pub enum TelescoperMode {
    ContinuousProjective,
    Discrete(u32),
}

#[derive(Clone, Debug)]
pub struct TelescoperQuery {
    pub a: MatrixOverRat,
    pub mode: TelescoperMode,
    pub degree_bound: u32,
    pub denominator: ZPoly,
}

/// How a result was established.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// `B` was substituted into the equation and the residual is zero.
    ExactSubstitution,
    /// `rank [M|b] > rank M` for the coefficient system at several random
    /// points modulo `p`. Rigorous when `M` has full column rank there.
    ModularRank {
        prime: u64,
        profiles: Vec<RankProfile>,
        rigorous: bool,
    },
    /// The homogeneous system has full column rank modulo `p`, so only
    /// `B = 0` solves it.
    TrivialKernel { prime: u64, rank: usize },
    /// Nonzero solutions exist but every combination tried was singular.
    SingularKernel { dimension: usize, tried: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct TelescoperResult {
    pub found: bool,
    pub b: Option<MatrixOverRat>,
    pub residual: Option<MatrixOverRat>,
    pub mode: TelescoperMode,
    pub degree_bound: u32,
    pub denominator: ZPoly,
    pub unknowns: usize,
    pub equations: usize,
    pub label: String,
    pub certificate: Certificate,
}

const SEED: u64 = 0x7e1e_5c09;
const COMBINATION_TRIES: usize = 8;

fn divides(d: &ZPoly, p: &ZPoly) -> Result<bool> {
    Ok(p.div_rem(d)?.1.is_zero())
}

/// A common multiple of `a` and `b`; exact lcm when one divides the other,
/// the product otherwise.
fn common_multiple(a: &ZPoly, b: &ZPoly) -> Result<ZPoly> {
    if divides(b, a)? {
        Ok(a.clone())
    } else if divides(a, b)? {
        Ok(b.clone())
    } else {
        Ok(a.mul(b))
    }
}

/// Numerators over a common denominator: `m = nums / den`.
pub fn clear_denominators(m: &MatrixOverRat) -> Result<(Vec<ZPoly>, ZPoly)> {
    let mut den = ZPoly::one();
    for e in m.entries() {
        den = common_multiple(&den, e.denom())?;
    }
    let nums = m
        .entries()
        .iter()
        .map(|e| {
            let (cof, rem) = den.div_rem(e.denom())?;
            debug_assert!(rem.is_zero());
            Ok(e.numer().mul(&cof))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((nums, den))
}

fn projective_term(a: &MatrixOverRat) -> Result<MatrixOverRat> {
    let det = a.det();
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let log_derivative = det.delta().checked_div(&det)?;
    let factor = log_derivative.scale(&QScalar::from_rational(num::BigRational::new(
        1.into(),
        (a.size() as i64).into(),
    )));
    Ok(a.delta().sub(&a.scale(&factor)))
}

/// Default `z^D` times a common multiple of the denominators of `A`, `δA`,
/// `σ_q^{±1}(A)` and, in discrete mode, `σ_q'^d(A)`.
pub fn default_denominator(
    a: &MatrixOverRat,
    mode: TelescoperMode,
    degree_bound: u32,
) -> Result<ZPoly> {
    let mut window = vec![a.clone(), a.delta(), a.sigma_q_pow(1), a.sigma_q_pow(-1)];
    if let TelescoperMode::Discrete(d) = mode {
        window.push(a.sigma_qprime_pow(d as i64));
    }
    let mut den = ZPoly::one();
    for m in &window {
        den = common_multiple(&den, &clear_denominators(m)?.1)?;
    }
    Ok(den.shift(degree_bound))
}

/// Default degree bound: largest numerator or denominator degree in `A`, plus 10.
pub fn default_degree_bound(a: &MatrixOverRat) -> u32 {
    a.entries()
        .iter()
        .map(|e| {
            e.numer()
                .degree()
                .unwrap_or(0)
                .max(e.denom().degree().unwrap_or(0))
        })
        .max()
        .unwrap_or(0)
        + 10
}

impl TelescoperQuery {
    /// Query with the default denominator; `degree_bound` defaults as above.
    pub fn new(
        a: MatrixOverRat,
        mode: TelescoperMode,
        degree_bound: Option<u32>,
    ) -> Result<TelescoperQuery> {
        if let TelescoperMode::Discrete(0) = mode {
            return Err(Error::Invalid("discrete mode needs d >= 1".into()));
        }
        let degree_bound = degree_bound.unwrap_or_else(|| default_degree_bound(&a));
        let denominator = default_denominator(&a, mode, degree_bound)?;
        Ok(TelescoperQuery {
            a,
            mode,
            degree_bound,
            denominator,
        })
    }
}

/// Residual `σ_q(B)A - (AB + R)` or `σ_q(B)A - σ_q'^d(A)B`.
pub fn telescoper_residual(
    a: &MatrixOverRat,
    mode: TelescoperMode,
    b: &MatrixOverRat,
) -> Result<MatrixOverRat> {
    if a.size() != b.size() {
        return Err(Error::Invalid("A and B must have the same size".into()));
    }
    let lhs = b.sigma_q().mul(a);
    let rhs = match mode {
        TelescoperMode::ContinuousProjective => a.mul(b).add(&projective_term(a)?),
        TelescoperMode::Discrete(d) => a.sigma_qprime_pow(d as i64).mul(b),
    };
    Ok(lhs.sub(&rhs))
}

/// Exact check of the mode equation; discrete mode also requires `det B ≠ 0`.
pub fn verify_telescoper(a: &MatrixOverRat, mode: TelescoperMode, b: &MatrixOverRat) -> bool {
    let Ok(residual) = telescoper_residual(a, mode, b) else {
        return false;
    };
    residual.is_zero()
        && (matches!(mode, TelescoperMode::ContinuousProjective) || !b.det().is_zero())
}

struct Assembled {
    system: LinearSystem,
    n: usize,
    terms: usize,
}

fn column(n: usize, terms: usize, j: usize, k: usize, t: usize) -> usize {
    (j * n + k) * terms + t
}

/// Coefficient system of `σ(N) P1 - P2 N = rhs` for `N = Σ u_{jkt} E_{jk} z^t`.
fn assemble(n: usize, bound: u32, p1: &[ZPoly], p2: &[ZPoly], rhs: Option<&[ZPoly]>) -> Assembled {
    let terms = bound as usize + 1;
    let mut rows: BTreeMap<(usize, usize, u32), BTreeMap<usize, QScalar>> = BTreeMap::new();
    let mut push = |key: (usize, usize, u32), col: usize, v: QScalar| {
        let row = rows.entry(key).or_default();
        let slot = row.entry(col).or_default();
        *slot = slot.add(&v);
    };
    for j in 0..n {
        for k in 0..n {
            for t in 0..terms {
                let col = column(n, terms, j, k, t);
                let qt = QScalar::q_pow(Exponent::from_int(t as i64));
                for m in 0..n {
                    for (e, c) in p1[k * n + m].coeffs() {
                        push((j, m, e + t as u32), col, c.mul(&qt));
                    }
                }
                for i in 0..n {
                    for (e, c) in p2[i * n + j].coeffs() {
                        push((i, k, e + t as u32), col, c.neg());
                    }
                }
            }
        }
    }
    let mut rhs_map: BTreeMap<(usize, usize, u32), QScalar> = BTreeMap::new();
    if let Some(r) = rhs {
        for i in 0..n {
            for m in 0..n {
                for (e, c) in r[i * n + m].coeffs() {
                    rhs_map.insert((i, m, *e), c.clone());
                    rows.entry((i, m, *e)).or_default();
                }
            }
        }
    }
    let mut system = LinearSystem::new(n * n * terms);
    for (key, mut row) in rows {
        row.retain(|_, v| !v.is_zero());
        let b = rhs_map.remove(&key).unwrap_or_default();
        if row.is_empty() && b.is_zero() {
            continue;
        }
        system.push(row, b);
    }
    Assembled { system, n, terms }
}

fn matrix_from_solution(asm: &Assembled, x: &[QScalar], den: &ZPoly) -> Result<MatrixOverRat> {
    let (n, terms) = (asm.n, asm.terms);
    let mut rows = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = Vec::with_capacity(n);
        for k in 0..n {
            let num = ZPoly::from_coeffs(
                (0..terms).map(|t| (t as u32, x[column(n, terms, j, k, t)].clone())),
            );
            row.push(ZRatFun::new(num, den.clone())?);
        }
        rows.push(row);
    }
    MatrixOverRat::from_rows(rows)
}

fn scale_matrix(m: &[ZPoly], f: &ZPoly) -> Vec<ZPoly> {
    m.iter().map(|p| p.mul(f)).collect()
}

pub fn search_telescoper(query: &TelescoperQuery) -> Result<TelescoperResult> {
    let a = &query.a;
    let n = a.size();
    if a.det().is_zero() {
        return Err(Error::SingularMatrix);
    }
    if query.denominator.is_zero() {
        return Err(Error::Invalid(
            "denominator candidate must be nonzero".into(),
        ));
    }
    let den = &query.denominator;
    let sden = den.sigma_q_pow(1);
    let (a_num, a_den) = clear_denominators(a)?;
    let asm = match query.mode {
        TelescoperMode::ContinuousProjective => {
            let (r_num, r_den) = clear_denominators(&projective_term(a)?)?;
            let p1 = scale_matrix(&a_num, &den.mul(&r_den));
            let p2 = scale_matrix(&a_num, &sden.mul(&r_den));
            let rhs = scale_matrix(&r_num, &sden.mul(den).mul(&a_den));
            assemble(n, query.degree_bound, &p1, &p2, Some(&rhs))
        }
        TelescoperMode::Discrete(d) => {
            let (s_num, s_den) = clear_denominators(&a.sigma_qprime_pow(d as i64))?;
            let p1 = scale_matrix(&a_num, &den.mul(&s_den));
            let p2 = scale_matrix(&s_num, &sden.mul(&a_den));
            assemble(n, query.degree_bound, &p1, &p2, None)
        }
    };
    let base = TelescoperResult {
        found: false,
        b: None,
        residual: None,
        mode: query.mode,
        degree_bound: query.degree_bound,
        denominator: den.clone(),
        unknowns: asm.system.cols,
        equations: asm.system.rows.len(),
        label: format!(
            "no solution within ansatz (degree <= {}, denominator fixed)",
            query.degree_bound
        ),
        certificate: Certificate::ExactSubstitution,
    };
    let found = |b: MatrixOverRat| -> Result<TelescoperResult> {
        let residual = telescoper_residual(a, query.mode, &b)?;
        Ok(TelescoperResult {
            found: true,
            label: "solution found and verified by substitution".into(),
            residual: Some(residual),
            b: Some(b),
            ..base.clone()
        })
    };
    if let TelescoperMode::Discrete(_) = query.mode {
        let identity = MatrixOverRat::identity(n);
        if verify_telescoper(a, query.mode, &identity) {
            return found(identity);
        }
    }
    let kernel_wanted = matches!(query.mode, TelescoperMode::Discrete(_));
    match linsolve::solve(&asm.system, kernel_wanted, SEED)? {
        Solution::Inconsistent { profiles, rigorous } => Ok(TelescoperResult {
            certificate: Certificate::ModularRank {
                prime: linsolve::PRIME,
                profiles,
                rigorous,
            },
            ..base
        }),
        Solution::Found {
            particular,
            kernel,
            profile,
        } => match query.mode {
            TelescoperMode::ContinuousProjective => {
                let b = matrix_from_solution(&asm, &particular, den)?;
                if !verify_telescoper(a, query.mode, &b) {
                    return Err(Error::Invalid(
                        "telescoper candidate failed substitution".into(),
                    ));
                }
                found(b)
            }
            TelescoperMode::Discrete(_) => {
                if kernel.is_empty() {
                    return Ok(TelescoperResult {
                        certificate: Certificate::TrivialKernel {
                            prime: linsolve::PRIME,
                            rank: profile.rank,
                        },
                        ..base
                    });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(SEED);
                let mut tries = 0;
                let singles = kernel.iter().cloned();
                let combos = (0..COMBINATION_TRIES).map(|_| {
                    kernel
                        .iter()
                        .fold(vec![QScalar::zero(); asm.system.cols], |acc, v| {
                            let c = QScalar::from_int(rng.gen_range(1..=7));
                            acc.iter().zip(v).map(|(x, y)| x.add(&y.mul(&c))).collect()
                        })
                });
                let candidates: Vec<Vec<QScalar>> = singles.chain(combos).collect();
                for x in candidates {
                    tries += 1;
                    let b = matrix_from_solution(&asm, &x, den)?;
                    if !b.det().is_zero() {
                        if !verify_telescoper(a, query.mode, &b) {
                            return Err(Error::Invalid(
                                "telescoper candidate failed substitution".into(),
                            ));
                        }
                        return found(b);
                    }
                }
                Ok(TelescoperResult {
                    label: format!(
                        "no invertible solution found within ansatz (degree <= {}, denominator fixed)",
                        query.degree_bound
                    ),
                    certificate: Certificate::SingularKernel {
                        dimension: kernel.len(),
                        tried: tries,
                    },
                    ..base
                })
            }
        },
    }
}

/// Discrete searches for `d = 1..=d_max`, stopping at the first success.
pub fn search_discrete(
    a: &MatrixOverRat,
    d_max: u32,
    degree_bound: Option<u32>,
) -> Result<Vec<TelescoperResult>> {
    let mut out = Vec::new();
    for d in 1..=d_max {
        let q = TelescoperQuery::new(a.clone(), TelescoperMode::Discrete(d), degree_bound)?;
        let r = search_telescoper(&q)?;
        let done = r.found;
        out.push(r);
        if done {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergeom::{build_operator, tests::spec};
    use crate::parse::parse_zratfun;

    fn f(s: &str) -> ZRatFun {
        parse_zratfun(s).unwrap()
    }

    fn m(rows: &[&[&str]]) -> MatrixOverRat {
        MatrixOverRat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|x| f(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn constant_continuous_gives_zero() {
        let a = m(&[&["2", "1"], &["0", "q"]]);
        let r = search_telescoper(
            &TelescoperQuery::new(a.clone(), TelescoperMode::ContinuousProjective, Some(2))
                .unwrap(),
        )
        .unwrap();
        assert!(r.found);
        assert!(r.b.as_ref().unwrap().is_zero());
        assert!(verify_telescoper(
            &a,
            TelescoperMode::ContinuousProjective,
            r.b.as_ref().unwrap()
        ));
    }

    #[test]
    fn diagonal_discrete_gives_identity() {
        let a = m(&[&["2", "0"], &["0", "q"]]);
        let r = search_telescoper(
            &TelescoperQuery::new(a.clone(), TelescoperMode::Discrete(1), Some(1)).unwrap(),
        )
        .unwrap();
        assert!(r.found);
        let b = r.b.unwrap();
        assert_eq!(b, MatrixOverRat::identity(2));
        let mut bad = b.clone();
        bad.set(0, 1, f("1"));
        assert!(!verify_telescoper(&a, TelescoperMode::Discrete(1), &bad));
    }

    #[test]
    fn discrete_solution_from_kernel() {
        let a = m(&[&["1", "z"], &["0", "1"]]);
        let r = search_telescoper(
            &TelescoperQuery::new(a.clone(), TelescoperMode::Discrete(1), Some(1)).unwrap(),
        )
        .unwrap();
        assert!(r.found);
        let b = r.b.unwrap();
        assert!(verify_telescoper(&a, TelescoperMode::Discrete(1), &b));
        assert_ne!(b, MatrixOverRat::identity(2));
    }

    #[test]
    fn rational_solution_is_found() {
        // A = z: the projective term vanishes and constants solve the equation.
        let a = m(&[&["z"]]);
        let r = search_telescoper(
            &TelescoperQuery::new(a, TelescoperMode::ContinuousProjective, Some(3)).unwrap(),
        )
        .unwrap();
        assert!(r.found);
    }

    #[test]
    fn sl2_companion_has_no_telescoper() {
        let op = build_operator(&spec(&["1/3", "1/5"], &["1", "1/7"])).unwrap();
        let a = MatrixOverRat::companion(&op).unwrap();
        for bound in [0, 3] {
            let q =
                TelescoperQuery::new(a.clone(), TelescoperMode::ContinuousProjective, Some(bound))
                    .unwrap();
            let r = search_telescoper(&q).unwrap();
            assert!(!r.found, "bound {bound}");
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = m(&[&["1", "1"], &["1", "1"]]);
        let q = TelescoperQuery {
            a,
            mode: TelescoperMode::ContinuousProjective,
            degree_bound: 0,
            denominator: ZPoly::one(),
        };
        assert!(matches!(search_telescoper(&q), Err(Error::SingularMatrix)));
    }
}
