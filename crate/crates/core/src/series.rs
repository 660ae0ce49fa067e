//! Generalized q-hypergeometric series and exact annihilation checks.

use num::BigRational;

use crate::error::{Error, Result};
use crate::hypergeom::HypergeometricSpec;
use crate::operator::OperatorSpec;
use crate::ratfun::PuiseuxTrunc;
use crate::scalars::{Exponent, Monomial, QPoly, QScalar};

/// `(q^α; q)_m = ∏_{k<m} (1 - q^{α+k})`, grown on demand.
#[derive(Clone, Debug)]
pub struct PochhammerCache {
    alpha: BigRational,
    values: Vec<QScalar>,
}

impl PochhammerCache {
    pub fn new(alpha: BigRational) -> PochhammerCache {
        PochhammerCache {
            alpha,
            values: vec![QScalar::one()],
        }
    }

    pub fn factor(&self, k: usize) -> QScalar {
        let e = &self.alpha + BigRational::from_integer((k as i64).into());
        QScalar::from_poly(QPoly::one().sub(&QPoly::from_monomial(&Monomial::q_pow(
            Exponent::from_rational(e),
        ))))
    }

    pub fn get(&mut self, m: usize) -> &QScalar {
        while self.values.len() <= m {
            let k = self.values.len() - 1;
            let next = self.values[k].mul(&self.factor(k));
            self.values.push(next);
        }
        &self.values[m]
    }
}

/// `λ' = (-1)^{n-s} λ`, the constant for which the series solves the operator.
pub fn effective_lambda(spec: &HypergeometricSpec) -> QScalar {
    if (spec.n + spec.s).is_multiple_of(2) {
        spec.lambda.clone()
    } else {
        spec.lambda.neg()
    }
}

/// `Σ_{m < order} (a;q)_m / (b;q)_m λ'^m z^m` with `λ' = (-1)^{n-s} λ`.
///
/// The coefficient recursion of the operator is
/// `y_m / y_{m-1} = (-1)^{n-s} λ ∏ (1 - a_i q^{m-1}) / ∏ (1 - b_j q^{m-1})`,
/// so the sign only matters when `n - s` is odd.
pub fn nphi_s(spec: &HypergeometricSpec, order: usize) -> Result<PuiseuxTrunc> {
    let alphas = spec.rational_alphas()?;
    let betas = spec.rational_betas()?;
    if !spec.has_series_normalization() {
        let b1 = spec
            .betas
            .first()
            .map_or_else(|| "(none)".to_string(), ToString::to_string);
        return Err(Error::Normalization(b1));
    }
    let lambda = effective_lambda(spec);
    let mut num_caches: Vec<PochhammerCache> =
        alphas.into_iter().map(PochhammerCache::new).collect();
    let mut den_caches: Vec<PochhammerCache> =
        betas.into_iter().map(PochhammerCache::new).collect();
    let mut terms = Vec::with_capacity(order);
    let mut lambda_pow = QScalar::one();
    for m in 0..order {
        let mut coeff = lambda_pow.clone();
        for c in &mut num_caches {
            coeff = coeff.mul(c.get(m));
        }
        if coeff.is_zero() {
            break;
        }
        for c in &mut den_caches {
            coeff = coeff.checked_div(c.get(m))?;
        }
        terms.push((Exponent::from_int(m as i64), coeff));
        lambda_pow = lambda_pow.mul(&lambda);
    }
    Ok(PuiseuxTrunc::new(
        1,
        Exponent::from_int(order as i64),
        terms,
    ))
}

/// `Σ a_i(z) σ_q^i(y)`, known up to `y.ord + min_i v_0(a_i)`.
pub fn apply_operator(op: &OperatorSpec, y: &PuiseuxTrunc) -> PuiseuxTrunc {
    let mut acc: Option<PuiseuxTrunc> = None;
    for (i, a) in op.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let term = y.sigma_q_pow(i as i64).mul_zpoly(a);
        acc = Some(match acc {
            None => term,
            Some(s) => s.add(&term),
        });
    }
    acc.unwrap_or_else(|| PuiseuxTrunc::zero(y.order().clone()))
}

/// Residual of the hypergeometric operator on the truncated series.
#[derive(Clone, Debug)]
pub struct Annihilation {
    pub residual: PuiseuxTrunc,
    pub valuation: Exponent,
    pub known_to: Exponent,
}

pub fn verify_series(spec: &HypergeometricSpec, order: usize) -> Result<Annihilation> {
    let op = crate::hypergeom::build_operator(spec)?;
    let y = nphi_s(spec, order)?;
    let residual = apply_operator(&op, &y);
    Ok(Annihilation {
        valuation: residual.valuation_bound(),
        known_to: residual.order().clone(),
        residual,
    })
}

/// Exact ratio `y_{m+1}/y_m = λ' ∏(1 - q^{α_i+m}) / ∏(1 - q^{β_j+m})`.
pub fn coefficient_ratio(spec: &HypergeometricSpec, m: usize) -> Result<QScalar> {
    let mut r = effective_lambda(spec);
    for a in spec.rational_alphas()? {
        r = r.mul(&PochhammerCache::new(a).factor(m));
    }
    for b in spec.rational_betas()? {
        r = r.checked_div(&PochhammerCache::new(b).factor(m))?;
    }
    Ok(r)
}
