#![allow(dead_code)]

pub mod oracle;

use proptest::prelude::*;

use qdiff::hypergeom::HypergeometricSpec;
use qdiff::isomono::TelescoperMode;
use qdiff::matrix::MatrixOverRat;
use qdiff::operator::OperatorSpec;
use qdiff::ratfun::{FactoredRat, ZPoly, ZRatFun};
use qdiff::scalars::{rat, Exponent, ExponentVector, Monomial, QPoly, QScalar};

pub fn exponent(max_num: i64, max_den: i64) -> impl Strategy<Value = Exponent> {
    (-max_num..=max_num, 1..=max_den).prop_map(|(n, d)| Exponent::new(n, d))
}

pub fn coefficient() -> impl Strategy<Value = num::BigRational> {
    (prop_oneof![-4i64..=-1, 1i64..=4], 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

pub fn monomial() -> impl Strategy<Value = Monomial> {
    (
        coefficient(),
        exponent(6, 4),
        prop_oneof![Just(Exponent::zero()), exponent(3, 2)],
    )
        .prop_map(|(c, r, s)| Monomial::new(c, r, s))
}

/// Monomials with coefficient 1 and no `q'`, the common case for roots.
pub fn q_monomial() -> impl Strategy<Value = Monomial> {
    exponent(8, 4).prop_map(Monomial::q_pow)
}

pub fn qpoly() -> impl Strategy<Value = QPoly> {
    prop::collection::vec(monomial(), 1..4)
        .prop_map(|ms| {
            ms.iter()
                .fold(QPoly::zero(), |acc, m| acc.add(&QPoly::from_monomial(m)))
        })
        .prop_filter("nonzero", |p| !p.is_zero())
}

pub fn qscalar() -> impl Strategy<Value = QScalar> {
    (qpoly(), qpoly()).prop_map(|(n, d)| QScalar::fraction(n, d).unwrap())
}

pub fn factored() -> impl Strategy<Value = FactoredRat> {
    (
        monomial(),
        -3i64..=3,
        prop::collection::vec((q_monomial(), prop_oneof![-2i64..=-1, 1i64..=2]), 0..5),
    )
        .prop_map(|(u, m, roots)| FactoredRat::new(u, m, roots))
}

/// Like `factored`, but roots carry rational coefficients and `q'` powers,
/// and there may be up to `max_roots` of them.
pub fn general_factored(max_roots: usize) -> impl Strategy<Value = FactoredRat> {
    (
        monomial(),
        -3i64..=3,
        prop::collection::vec(
            (monomial(), prop_oneof![-2i64..=-1, 1i64..=2]),
            0..=max_roots,
        ),
    )
        .prop_map(|(u, m, roots)| FactoredRat::new(u, m, roots))
}

pub fn zpoly(max_degree: u32) -> impl Strategy<Value = ZPoly> {
    prop::collection::vec(prop::option::of(monomial()), 1..=(max_degree as usize + 1)).prop_map(
        |cs| {
            ZPoly::from_coeffs(
                cs.into_iter()
                    .enumerate()
                    .filter_map(|(k, c)| c.map(|c| (k as u32, QScalar::from_monomial(&c)))),
            )
        },
    )
}

pub fn zratfun() -> impl Strategy<Value = ZRatFun> {
    (zpoly(3), zpoly(2))
        .prop_filter("nonzero denominator", |(_, d)| !d.is_zero())
        .prop_map(|(n, d)| ZRatFun::new(n, d).unwrap())
}

/// Operators with at least two nonzero coefficients.
pub fn operator(max_order: usize) -> impl Strategy<Value = OperatorSpec> {
    prop::collection::vec(prop::option::of(zpoly(3)), 2..=(max_order + 1))
        .prop_map(|cs| OperatorSpec::new(cs.into_iter().map(Option::unwrap_or_default).collect()))
        .prop_filter(
            "nondegenerate",
            |op| matches!(op.check_nondegenerate(), Ok(n) if n >= 1),
        )
}

pub fn rational_exponent(max_den: i64) -> impl Strategy<Value = num::BigRational> {
    (-2 * max_den..=2 * max_den, 1..=max_den).prop_map(|(n, d)| rat(n, d))
}

/// Rational hypergeometric data with `n = s`, `β_1 = 1`.
pub fn series_spec(max_n: usize, max_den: i64) -> impl Strategy<Value = HypergeometricSpec> {
    (1..=max_n)
        .prop_flat_map(move |n| {
            (
                prop::collection::vec((1i64..=3 * max_den, 1..=max_den), n),
                prop::collection::vec((1i64..=3 * max_den, 1..=max_den), n - 1),
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

fn constant_entry(c: &Monomial) -> ZRatFun {
    ZRatFun::constant(QScalar::from_monomial(c))
}

fn linear_entry(c0: &Monomial, c1: &Monomial) -> ZRatFun {
    ZRatFun::from_poly(ZPoly::from_coeffs([
        (0, QScalar::from_monomial(c0)),
        (1, QScalar::from_monomial(c1)),
    ]))
}

/// Invertible 2x2 matrices: diagonal constants, upper triangular with a
/// linear corner, or a full matrix of constants and linear terms.
pub fn invertible_matrix() -> impl Strategy<Value = MatrixOverRat> {
    let z = || ZRatFun::zero();
    prop_oneof![
        (q_monomial(), monomial()).prop_map(move |(a, b)| MatrixOverRat::diag(vec![
            constant_entry(&a),
            constant_entry(&b)
        ])),
        (q_monomial(), q_monomial(), monomial(), monomial()).prop_map(move |(a, b, c, d)| {
            MatrixOverRat::from_rows(vec![
                vec![constant_entry(&a), linear_entry(&c, &d)],
                vec![z(), constant_entry(&b)],
            ])
            .unwrap()
        }),
        (monomial(), monomial(), monomial(), monomial(), monomial()).prop_map(|(a, b, c, d, e)| {
            MatrixOverRat::from_rows(vec![
                vec![constant_entry(&a), linear_entry(&b, &c)],
                vec![constant_entry(&d), constant_entry(&e)],
            ])
            .unwrap()
        }),
    ]
    .prop_filter("invertible", |m| !m.det().is_zero())
}

pub fn telescoper_mode() -> impl Strategy<Value = TelescoperMode> {
    prop_oneof![
        Just(TelescoperMode::ContinuousProjective),
        (1u32..=2).prop_map(TelescoperMode::Discrete)
    ]
}
