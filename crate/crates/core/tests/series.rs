mod common;

use common::*;
use proptest::prelude::*;

use num::BigRational;
use qdiff::hypergeom::{build_operator, HypergeometricSpec};
use qdiff::parse::{parse_expvec, parse_qscalar};
use qdiff::ratfun::PuiseuxTrunc;
use qdiff::scalars::{rat, Exponent, ExponentVector, Monomial, QPoly, QScalar};
use qdiff::series::{coefficient_ratio, nphi_s, verify_series, PochhammerCache};

/// `∏_{k<m} (1 - q^{a+k})` as an expanded polynomial.
fn pochhammer_poly(a: &BigRational, m: usize) -> QPoly {
    (0..m).fold(QPoly::one(), |acc, k| {
        let e = Exponent::from_rational(a + rat(k as i64, 1));
        acc.mul(&QPoly::one().sub(&QPoly::from_monomial(&Monomial::q_pow(e))))
    })
}

fn signed_lambda(spec: &HypergeometricSpec) -> QScalar {
    if (spec.alphas.len() - spec.betas.len()) % 2 == 1 {
        spec.lambda.neg()
    } else {
        spec.lambda.clone()
    }
}

/// `y_m * ∏ (b;q)_m == λ'^m ∏ (a;q)_m`, checked without dividing.
fn coefficient_matches(spec: &HypergeometricSpec, y: &PuiseuxTrunc, m: usize) -> bool {
    let num = spec
        .rational_alphas()
        .unwrap()
        .iter()
        .fold(QPoly::one(), |acc, a| acc.mul(&pochhammer_poly(a, m)));
    let den = spec
        .rational_betas()
        .unwrap()
        .iter()
        .fold(QPoly::one(), |acc, b| acc.mul(&pochhammer_poly(b, m)));
    let lhs = y
        .coeff(&Exponent::from_int(m as i64))
        .mul(&QScalar::from_poly(den));
    let rhs = signed_lambda(spec)
        .pow(m as i64)
        .unwrap()
        .mul(&QScalar::from_poly(num));
    lhs.sub(&rhs).is_zero()
}

/// Coefficient of `z^k` in `Σ_i a_i(z) y(q^i z)`, summed term by term.
fn residual_coefficient(spec: &HypergeometricSpec, y: &PuiseuxTrunc, k: i64) -> QScalar {
    let op = build_operator(spec).unwrap();
    let mut acc = QScalar::zero();
    for (i, a) in op.coeffs().iter().enumerate() {
        for (e, c) in a.coeffs() {
            let j = k - *e as i64;
            if j < 0 {
                continue;
            }
            let yj = y.coeff(&Exponent::from_int(j));
            let shift = QScalar::q_pow(Exponent::from_int(i as i64 * j));
            acc = acc.add(&c.mul(&shift).mul(&yj));
        }
    }
    acc
}

/// Like `series_spec`, but with one fewer beta, so `n - s` is odd.
fn odd_spec() -> impl Strategy<Value = HypergeometricSpec> {
    (2usize..=3)
        .prop_flat_map(|n| {
            (
                prop::collection::vec((1i64..=12, 1i64..=4), n),
                prop::collection::vec((1i64..=12, 1i64..=4), n - 2),
                prop_oneof![
                    Just(QScalar::one()),
                    monomial().prop_map(|m| QScalar::from_monomial(&m))
                ],
            )
        })
        .prop_map(|(a, b, lambda)| {
            let ev = |(n, d): (i64, i64)| ExponentVector::rational(rat(n, d));
            let mut betas = vec![ExponentVector::rational(rat(1, 1))];
            betas.extend(b.into_iter().map(ev));
            HypergeometricSpec::new(a.into_iter().map(ev).collect(), betas, lambda).unwrap()
        })
}

fn any_spec() -> impl Strategy<Value = HypergeometricSpec> {
    prop_oneof![series_spec(3, 4), odd_spec()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pochhammer_recurrence(a in rational_exponent(5), m in 0usize..6) {
        let mut cache = PochhammerCache::new(a.clone());
        let next = cache.get(m + 1).clone();
        let factor = cache.factor(m);
        let step = cache.get(m).mul(&factor);
        prop_assert_eq!(&next, &step);
        prop_assert!(next.sub(&QScalar::from_poly(pochhammer_poly(&a, m + 1))).is_zero());
    }

    #[test]
    fn coefficients_match_products(spec in any_spec()) {
        let y = nphi_s(&spec, 4).unwrap();
        prop_assert!(y.coeff(&Exponent::zero()).is_one());
        for m in 0..4 {
            prop_assert!(coefficient_matches(&spec, &y, m), "m = {}", m);
        }
    }

    #[test]
    fn consecutive_coefficients_follow_the_ratio(spec in any_spec(), m in 0usize..3) {
        let y = nphi_s(&spec, m + 2).unwrap();
        let a = y.coeff(&Exponent::from_int(m as i64));
        let b = y.coeff(&Exponent::from_int(m as i64 + 1));
        prop_assert_eq!(a.mul(&coefficient_ratio(&spec, m).unwrap()), b);
    }

    #[test]
    fn truncated_series_is_annihilated(spec in any_spec(), order in 2usize..=5) {
        let y = nphi_s(&spec, order).unwrap();
        let a = verify_series(&spec, order).unwrap();
        prop_assert!(a.residual.is_zero(), "residual {}", a.residual);
        prop_assert!(a.valuation >= Exponent::from_int(order as i64));
        for k in 0..order as i64 {
            prop_assert!(residual_coefficient(&spec, &y, k).is_zero(), "z^{}", k);
        }
    }
}

#[test]
fn first_coefficient_of_balanced_series() {
    let spec = HypergeometricSpec::new(
        vec![
            parse_expvec("1/3").unwrap(),
            parse_expvec("2/7").unwrap(),
            parse_expvec("3/5").unwrap(),
        ],
        vec![
            parse_expvec("1").unwrap(),
            parse_expvec("1/4").unwrap(),
            parse_expvec("5/6").unwrap(),
        ],
        parse_qscalar("q^2").unwrap(),
    )
    .unwrap();
    let y = nphi_s(&spec, 3).unwrap();
    let expected = parse_qscalar(
        "q^2*(1 - q^(1/3))*(1 - q^(2/7))*(1 - q^(3/5))/((1 - q)*(1 - q^(1/4))*(1 - q^(5/6)))",
    )
    .unwrap();
    assert_eq!(y.coeff(&Exponent::from_int(1)), expected);
}

#[test]
fn odd_difference_flips_the_first_coefficient() {
    let spec = HypergeometricSpec::new(
        vec![parse_expvec("1/2").unwrap(), parse_expvec("1/3").unwrap()],
        vec![parse_expvec("1").unwrap()],
        QScalar::one(),
    )
    .unwrap();
    let y = nphi_s(&spec, 2).unwrap();
    let expected = parse_qscalar("-(1 - q^(1/2))*(1 - q^(1/3))/(1 - q)").unwrap();
    assert_eq!(y.coeff(&Exponent::from_int(1)), expected);
}
