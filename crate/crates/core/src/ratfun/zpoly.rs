use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::{Exponent, Monomial, QScalar};

/// Polynomial in `z` with [`QScalar`] coefficients; zero coefficients are
/// never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ZPoly {
    coeffs: BTreeMap<u32, QScalar>,
}

impl ZPoly {
    pub fn zero() -> ZPoly {
        ZPoly::default()
    }

    pub fn one() -> ZPoly {
        ZPoly::constant(QScalar::one())
    }

    pub fn z() -> ZPoly {
        ZPoly::term(QScalar::one(), 1)
    }

    pub fn constant(c: QScalar) -> ZPoly {
        ZPoly::term(c, 0)
    }

    /// `c * z^k`.
    pub fn term(c: QScalar, k: u32) -> ZPoly {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        ZPoly { coeffs }
    }

    pub fn from_coeffs(items: impl IntoIterator<Item = (u32, QScalar)>) -> ZPoly {
        let mut p = ZPoly::zero();
        for (k, c) in items {
            p.add_term(k, &c);
        }
        p
    }

    fn add_term(&mut self, k: u32, c: &QScalar) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&k) {
            Some(v) => {
                *v = v.add(c);
                if v.is_zero() {
                    self.coeffs.remove(&k);
                }
            }
            None => {
                self.coeffs.insert(k, c.clone());
            }
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, QScalar> {
        &self.coeffs
    }

    pub fn coeff(&self, k: u32) -> QScalar {
        self.coeffs.get(&k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(QScalar::is_one)
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    /// z-adic valuation at 0.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn lead(&self) -> Option<&QScalar> {
        self.coeffs.values().next_back()
    }

    pub fn as_constant(&self) -> Option<QScalar> {
        match self.degree() {
            None => Some(QScalar::zero()),
            Some(0) => Some(self.coeff(0)),
            _ => None,
        }
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }

    pub fn add(&self, other: &ZPoly) -> ZPoly {
        let mut p = self.clone();
        for (k, c) in &other.coeffs {
            p.add_term(*k, c);
        }
        p
    }

    pub fn sub(&self, other: &ZPoly) -> ZPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        let mut p = ZPoly::zero();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                p.add_term(i + j, &a.mul(b));
            }
        }
        p
    }

    pub fn scale(&self, c: &QScalar) -> ZPoly {
        if c.is_zero() {
            return ZPoly::zero();
        }
        ZPoly {
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v.mul(c))).collect(),
        }
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: u32) -> ZPoly {
        ZPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e + k, c.clone()))
                .collect(),
        }
    }

    /// Division by `z^k`; the caller guarantees `valuation >= k`.
    pub(crate) fn unshift(&self, k: u32) -> ZPoly {
        ZPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e - k, c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> ZPoly {
        let mut acc = ZPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `p(λz)` for a monomial `λ`.
    pub fn scale_arg(&self, lambda: &Monomial) -> ZPoly {
        ZPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (*k, c.mul(&QScalar::from_monomial(&lambda.pow(*k as i64)))))
                .collect(),
        }
    }

    pub fn sigma_q_pow(&self, k: i64) -> ZPoly {
        self.scale_arg(&Monomial::q_pow(Exponent::from_int(k)))
    }

    pub fn sigma_qprime_pow(&self, k: i64) -> ZPoly {
        self.scale_arg(&Monomial::qp_pow(Exponent::from_int(k)))
    }

    /// `δ = z d/dz`.
    pub fn delta(&self) -> ZPoly {
        ZPoly::from_coeffs(
            self.coeffs
                .iter()
                .map(|(k, c)| (*k, c.mul(&QScalar::from_int(*k as i64)))),
        )
    }

    /// Euclidean division over the coefficient field.
    pub fn div_rem(&self, d: &ZPoly) -> Result<(ZPoly, ZPoly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let dl = d.lead().unwrap().clone();
        let mut rem = self.clone();
        let mut quo = ZPoly::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = rem.lead().unwrap().checked_div(&dl)?;
            let t = ZPoly::term(c, rd - dd);
            rem = rem.sub(&t.mul(d));
            quo = quo.add(&t);
        }
        Ok((quo, rem))
    }

    pub(crate) fn fmt_coeff_term(
        f: &mut fmt::Formatter<'_>,
        c: &QScalar,
        k: u32,
        first: bool,
    ) -> fmt::Result {
        let zpart = match k {
            0 => String::new(),
            1 => "z".to_string(),
            _ => format!("z^{k}"),
        };
        if let Some(m) = c.as_monomial() {
            let negative = m.c < num::BigRational::from_integer(0.into());
            if !first {
                f.write_str(if negative { " - " } else { " + " })?;
            } else if negative {
                f.write_str("-")?;
            }
            let abs = if negative { m.neg() } else { m };
            if zpart.is_empty() {
                return write!(f, "{abs}");
            }
            if abs.is_one() {
                return f.write_str(&zpart);
            }
            return write!(f, "{abs}*{zpart}");
        }
        if !first {
            f.write_str(" + ")?;
        }
        if zpart.is_empty() {
            write!(f, "({c})")
        } else {
            write!(f, "({c})*{zpart}")
        }
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.coeffs.iter().rev().enumerate() {
            ZPoly::fmt_coeff_term(f, c, *k, i == 0)?;
        }
        Ok(())
    }
}

impl fmt::Debug for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for ZPoly {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Quotient of two [`ZPoly`]; no polynomial gcd is taken.
///
/// Normal form strips the common power of `z`, makes a monomial-leading
/// denominator monic and collapses exact quotients to polynomials.
#[derive(Clone)]
pub struct ZRatFun {
    num: ZPoly,
    den: ZPoly,
}

impl ZRatFun {
    pub fn zero() -> ZRatFun {
        ZRatFun::from_poly(ZPoly::zero())
    }

    pub fn one() -> ZRatFun {
        ZRatFun::from_poly(ZPoly::one())
    }

    pub fn z() -> ZRatFun {
        ZRatFun::from_poly(ZPoly::z())
    }

    pub fn constant(c: QScalar) -> ZRatFun {
        ZRatFun::from_poly(ZPoly::constant(c))
    }

    pub fn from_int(n: i64) -> ZRatFun {
        ZRatFun::constant(QScalar::from_int(n))
    }

    pub fn from_poly(num: ZPoly) -> ZRatFun {
        ZRatFun {
            num,
            den: ZPoly::one(),
        }
    }

    pub fn new(num: ZPoly, den: ZPoly) -> Result<ZRatFun> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(ZRatFun { num, den }.normalized())
    }

    pub fn numer(&self) -> &ZPoly {
        &self.num
    }

    pub fn denom(&self) -> &ZPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&ZPoly> {
        self.is_poly().then_some(&self.num)
    }

    pub fn as_constant(&self) -> Option<QScalar> {
        self.as_poly().and_then(ZPoly::as_constant)
    }

    /// z-adic valuation at 0 (`None` for zero).
    pub fn valuation(&self) -> Option<i64> {
        Some(self.num.valuation()? as i64 - self.den.valuation().expect("nonzero den") as i64)
    }

    fn normalized(mut self) -> ZRatFun {
        if self.num.is_zero() {
            self.den = ZPoly::one();
            return self;
        }
        let v = self
            .num
            .valuation()
            .unwrap()
            .min(self.den.valuation().unwrap());
        if v > 0 {
            self.num = self.num.unshift(v);
            self.den = self.den.unshift(v);
        }
        if let Some(m) = self.den.lead().and_then(QScalar::as_monomial) {
            if !m.is_one() {
                let inv = QScalar::from_monomial(&m.inv());
                self.num = self.num.scale(&inv);
                self.den = self.den.scale(&inv);
            }
        }
        if self.den.is_one() {
            return self;
        }
        if let Some(c) = self.den.as_constant() {
            let inv = c.inv().expect("nonzero constant");
            return ZRatFun::from_poly(self.num.scale(&inv));
        }
        if self.num.degree() >= self.den.degree() {
            if let Ok((q, r)) = self.num.div_rem(&self.den) {
                if r.is_zero() {
                    return ZRatFun::from_poly(q);
                }
            }
        }
        self
    }

    pub fn neg(&self) -> ZRatFun {
        ZRatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &ZRatFun) -> ZRatFun {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return ZRatFun {
                num: self.num.add(&other.num),
                den: self.den.clone(),
            }
            .normalized();
        }
        ZRatFun {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
        .normalized()
    }

    pub fn sub(&self, other: &ZRatFun) -> ZRatFun {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ZRatFun) -> ZRatFun {
        if self.is_zero() || other.is_zero() {
            return ZRatFun::zero();
        }
        let (mut n1, mut d1) = (self.num.clone(), self.den.clone());
        let (mut n2, mut d2) = (other.num.clone(), other.den.clone());
        if !d2.is_one() && n1 == d2 {
            n1 = ZPoly::one();
            d2 = ZPoly::one();
        }
        if !d1.is_one() && n2 == d1 {
            n2 = ZPoly::one();
            d1 = ZPoly::one();
        }
        ZRatFun {
            num: n1.mul(&n2),
            den: d1.mul(&d2),
        }
        .normalized()
    }

    pub fn scale(&self, c: &QScalar) -> ZRatFun {
        ZRatFun {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
        .normalized()
    }

    pub fn inv(&self) -> Result<ZRatFun> {
        ZRatFun::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &ZRatFun) -> Result<ZRatFun> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<ZRatFun> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let n = k.unsigned_abs() as u32;
        Ok(ZRatFun {
            num: base.num.pow(n),
            den: base.den.pow(n),
        }
        .normalized())
    }

    /// `f(λz)` for a monomial `λ`.
    pub fn scale_arg(&self, lambda: &Monomial) -> ZRatFun {
        ZRatFun {
            num: self.num.scale_arg(lambda),
            den: self.den.scale_arg(lambda),
        }
        .normalized()
    }

    pub fn sigma_q_pow(&self, k: i64) -> ZRatFun {
        self.scale_arg(&Monomial::q_pow(Exponent::from_int(k)))
    }

    pub fn sigma_q(&self) -> ZRatFun {
        self.sigma_q_pow(1)
    }

    pub fn sigma_qprime_pow(&self, k: i64) -> ZRatFun {
        self.scale_arg(&Monomial::qp_pow(Exponent::from_int(k)))
    }

    /// `δ = z d/dz` by the quotient rule.
    pub fn delta(&self) -> ZRatFun {
        if self.den.is_one() {
            return ZRatFun::from_poly(self.num.delta());
        }
        ZRatFun {
            num: self
                .num
                .delta()
                .mul(&self.den)
                .sub(&self.num.mul(&self.den.delta())),
            den: self.den.mul(&self.den),
        }
        .normalized()
    }
}

impl PartialEq for ZRatFun {
    fn eq(&self, other: &ZRatFun) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for ZRatFun {}

impl Default for ZRatFun {
    fn default() -> ZRatFun {
        ZRatFun::zero()
    }
}

impl fmt::Display for ZRatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for ZRatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for ZRatFun {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl From<ZPoly> for ZRatFun {
    fn from(p: ZPoly) -> ZRatFun {
        ZRatFun::from_poly(p)
    }
}
