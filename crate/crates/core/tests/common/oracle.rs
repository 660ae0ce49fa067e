//! Exhaustive reference implementations used to cross-check the library.

#![allow(dead_code)]

use num::{BigInt, BigRational, Integer, One, Zero};

use qdiff::hypergeom::GroupTag;
use qdiff::isomono::TelescoperMode;
use qdiff::matrix::MatrixOverRat;
use qdiff::operator::OperatorSpec;
use qdiff::ratfun::{FactoredRat, PuiseuxTrunc, ZRatFun};
use qdiff::scalars::{rat, Exponent, ExponentVector, Monomial, QScalar};

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn is_int(x: &BigRational) -> bool {
    x.is_integer()
}

fn some_perm(n: usize, ok: impl Fn(usize, usize) -> bool) -> bool {
    permutations(n).iter().any(|p| (0..n).all(|i| ok(i, p[i])))
}

/// Tag of a balanced rational spec by direct enumeration: every
/// permutation, and every `γ = k/L` with `L` the common denominator.
pub fn brute_force_tag(alphas: &[BigRational], betas: &[BigRational]) -> GroupTag {
    let n = alphas.len();
    if alphas
        .iter()
        .any(|a| betas.iter().any(|b| is_int(&(a - b))))
    {
        return GroupTag::Reducible;
    }
    for d in 2..=n {
        if !n.is_multiple_of(d) {
            continue;
        }
        let shift = BigRational::new(BigInt::one(), BigInt::from(d));
        let stable = |v: &[BigRational]| some_perm(n, |i, j| is_int(&(&v[i] - &v[j] - &shift)));
        if stable(alphas) && stable(betas) {
            return GroupTag::KummerInduced;
        }
    }
    let sum: BigRational = alphas.iter().sum::<BigRational>() - betas.iter().sum::<BigRational>();
    if !is_int(&sum) {
        return GroupTag::SL;
    }
    let l = alphas
        .iter()
        .chain(betas)
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut k = BigInt::zero();
    while k < l {
        let gamma = BigRational::new(k.clone(), l.clone());
        let pairs = |v: &[BigRational]| some_perm(n, |i, j| is_int(&(&gamma + &v[i] + &v[j])));
        if pairs(alphas) && pairs(betas) {
            return if n % 2 == 1 {
                GroupTag::SO
            } else {
                GroupTag::Sp
            };
        }
        k += 1;
    }
    GroupTag::SL
}

/// Searches `m` with `|m_i| <= bound` and `Σ m_i α_i ∈ Q \ Z`.
pub fn torus_refutation(alphas: &[ExponentVector], bound: i64) -> Option<Vec<i64>> {
    let n = alphas.len();
    let mut m = vec![-bound; n];
    loop {
        let mut total = ExponentVector::rational(BigRational::zero());
        for (mi, a) in m.iter().zip(alphas) {
            total = total.add(&a.scale(&BigRational::from_integer(BigInt::from(*mi))));
        }
        if total.in_q() && !total.in_z() {
            return Some(m);
        }
        let mut i = 0;
        loop {
            if i == n {
                return None;
            }
            if m[i] < bound {
                m[i] += 1;
                break;
            }
            m[i] = -bound;
            i += 1;
        }
    }
}

/// Hull vertices by brute force: extreme abscissae, plus every point that
/// lies strictly below each chord spanning it.
pub fn hull_by_pairs(points: &[(usize, Exponent)]) -> Vec<(usize, Exponent)> {
    let below = |a: &(usize, Exponent), p: &(usize, Exponent), b: &(usize, Exponent)| {
        let t = rat((p.0 - a.0) as i64, (b.0 - a.0) as i64);
        let chord = a.1.value() + (b.1.value() - a.1.value()) * t;
        p.1.value() < &chord
    };
    let lowest_first = points.iter().min_by_key(|p| p.0).unwrap();
    let lowest_last = points.iter().max_by_key(|p| p.0).unwrap();
    points
        .iter()
        .filter(|p| {
            p.0 == lowest_first.0
                || p.0 == lowest_last.0
                || points
                    .iter()
                    .filter(|a| a.0 < p.0)
                    .all(|a| points.iter().filter(|b| b.0 > p.0).all(|b| below(a, p, b)))
        })
        .cloned()
        .collect()
}

/// `Σ a_i σ_q^i(Y / e)` times `e`, where `σ_q(e) = c z^r e`, computed
/// straight from the definition of the twist.
pub fn untwisted_residual(
    op: &OperatorSpec,
    c: &Monomial,
    r: &Exponent,
    y: &PuiseuxTrunc,
) -> PuiseuxTrunc {
    let mut acc: Option<PuiseuxTrunc> = None;
    for (i, a) in op.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let i64i = i as i64;
        let shift = Exponent::from_rational(-(r.value() * rat(i64i, 1)));
        let q_tri = Monomial::q_pow(Exponent::from_rational(
            -(r.value() * rat(i64i * (i64i - 1) / 2, 1)),
        ));
        let unit = c.pow(-i64i).mul(&q_tri);
        // Orders in these tests stay small; 64 leaves the product exact.
        let t = PuiseuxTrunc::from_zpoly(a, Exponent::from_int(a.degree().unwrap() as i64 + 64))
            .shift(&shift)
            .scale(&QScalar::from_monomial(&unit))
            .mul(&y.sigma_q_pow(i64i));
        acc = Some(match acc {
            None => t,
            Some(s) => s.add(&t),
        });
    }
    acc.unwrap()
}

fn det2(m: &[[ZRatFun; 2]; 2]) -> ZRatFun {
    m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0]))
}

fn as_array(m: &MatrixOverRat) -> [[ZRatFun; 2]; 2] {
    [
        [m.get(0, 0).clone(), m.get(0, 1).clone()],
        [m.get(1, 0).clone(), m.get(1, 1).clone()],
    ]
}

/// The telescoper equation evaluated entry by entry.
pub fn telescoper_holds_entrywise(
    a: &MatrixOverRat,
    mode: TelescoperMode,
    b: &MatrixOverRat,
) -> bool {
    let (a, b) = (as_array(a), as_array(b));
    let sb = b.clone().map(|r| r.map(|x| x.sigma_q()));
    let det_a = det2(&a);
    let log_det = det_a
        .delta()
        .checked_div(&det_a)
        .unwrap()
        .scale(&QScalar::from_rational(rat(1, 2)));
    for i in 0..2 {
        for k in 0..2 {
            let lhs = sb[i][0].mul(&a[0][k]).add(&sb[i][1].mul(&a[1][k]));
            let rhs = match mode {
                TelescoperMode::ContinuousProjective => a[i][0]
                    .mul(&b[0][k])
                    .add(&a[i][1].mul(&b[1][k]))
                    .add(&a[i][k].delta())
                    .sub(&a[i][k].mul(&log_det)),
                TelescoperMode::Discrete(d) => {
                    let s = |x: &ZRatFun| x.sigma_qprime_pow(d as i64);
                    s(&a[i][0]).mul(&b[0][k]).add(&s(&a[i][1]).mul(&b[1][k]))
                }
            };
            if !lhs.sub(&rhs).is_zero() {
                return false;
            }
        }
    }
    match mode {
        TelescoperMode::ContinuousProjective => true,
        TelescoperMode::Discrete(_) => !det2(&b).is_zero(),
    }
}

/// Exact value of `f` at `q^(1/l) = t`, `q'^(1/l) = u` and the point `z`;
/// `None` at a pole or a zero. `l` must clear every exponent denominator.
pub fn evaluate_factored(
    f: &FactoredRat,
    l: i64,
    t: &BigRational,
    u: &BigRational,
    z: &BigRational,
) -> Option<BigRational> {
    let power = |x: &BigRational, e: &Exponent| -> BigRational {
        let k = e.value() * rat(l, 1);
        assert!(k.is_integer(), "exponent {e} not cleared by {l}");
        let k: i32 = k.to_integer().try_into().expect("small exponent");
        num::pow::Pow::pow(x, k)
    };
    let value = |m: &Monomial| &m.c * power(t, &m.r) * power(u, &m.s);
    let mut acc = value(f.unit_part()) * num::pow::Pow::pow(z, f.z_power() as i32);
    for (alpha, e) in f.roots() {
        let factor = z - value(alpha);
        if factor.is_zero() {
            return None;
        }
        acc *= num::pow::Pow::pow(&factor, *e as i32);
    }
    Some(acc)
}

/// `f b = c z^m σ_q(b)` at a few exact rational points.
pub fn coboundary_identity_at_points(
    f: &FactoredRat,
    c: &Monomial,
    m: i64,
    b: &FactoredRat,
) -> bool {
    let l = 12;
    let cf = FactoredRat::new(c.clone(), m, []);
    let mut evaluated = 0;
    for k in 0..4 {
        let (t, u, z) = (rat(3 + k, 2), rat(5, 3 + k), rat(7 + 2 * k, 5));
        let q = num::pow::Pow::pow(&t, l as i32);
        let values = (
            evaluate_factored(f, l, &t, &u, &z),
            evaluate_factored(b, l, &t, &u, &z),
            evaluate_factored(&cf, l, &t, &u, &z),
            evaluate_factored(b, l, &t, &u, &(&z * &q)),
        );
        if let (Some(fz), Some(bz), Some(cz), Some(bqz)) = values {
            if fz * bz != cz * bqz {
                return false;
            }
            evaluated += 1;
        }
    }
    evaluated >= 2
}
