use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigRational, One, Zero};

use super::{Exponent, Monomial, QPoly};
use crate::error::{Error, Result};

/// Element of the fraction field of [`QPoly`].
///
/// Stored as `unit * ∏ P_i^{e_i}` with a monomial unit and polynomial
/// factors `P_i` whose lowest term is exactly `1`, sorted, with nonzero
/// integer multiplicities. Products only merge factor lists; a sum expands
/// just the parts the operands do not share. Factors are not irreducible,
/// so equal values can have different factor lists and equality falls back
/// to testing the difference for zero.
#[derive(Clone)]
pub struct QScalar {
    unit: Option<Monomial>,
    factors: Vec<(QPoly, i64)>,
}

/// `p = m * P` with `P` normalized, or `None` when `p` is a monomial.
fn split(p: &QPoly) -> (Monomial, Option<QPoly>) {
    if let Some(m) = p.as_monomial() {
        return (m, None);
    }
    let t = p.trail().expect("nonzero polynomial");
    (t.clone(), Some(p.scale(&t.inv())))
}

fn merge_factors(a: &[(QPoly, i64)], b: &[(QPoly, i64)], kb: i64) -> Vec<(QPoly, i64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Greater,
        };
        match ord {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((b[j].0.clone(), b[j].1 * kb));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let e = a[i].1 + b[j].1 * kb;
                if e != 0 {
                    out.push((a[i].0.clone(), e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn expand<'a>(unit: &Monomial, factors: impl IntoIterator<Item = (&'a QPoly, i64)>) -> QPoly {
    let mut parts: Vec<QPoly> = factors.into_iter().map(|(p, e)| p.pow(e as u32)).collect();
    parts.sort_by_key(QPoly::len);
    parts
        .iter()
        .fold(QPoly::from_monomial(unit), |acc, p| acc.mul(p))
}

impl QScalar {
    pub fn zero() -> QScalar {
        QScalar {
            unit: None,
            factors: Vec::new(),
        }
    }

    pub fn one() -> QScalar {
        QScalar::from_monomial(&Monomial::one())
    }

    pub fn from_poly(num: QPoly) -> QScalar {
        if num.is_zero() {
            return QScalar::zero();
        }
        let (unit, p) = split(&num);
        QScalar {
            unit: Some(unit),
            factors: p.map(|p| vec![(p, 1)]).unwrap_or_default(),
        }
    }

    pub fn from_monomial(m: &Monomial) -> QScalar {
        QScalar {
            unit: Some(m.clone()),
            factors: Vec::new(),
        }
    }

    pub fn from_rational(c: BigRational) -> QScalar {
        QScalar::from_poly(QPoly::from_rational(c))
    }

    pub fn from_int(n: i64) -> QScalar {
        QScalar::from_rational(super::rat_int(n))
    }

    pub fn q_pow(r: Exponent) -> QScalar {
        QScalar::from_monomial(&Monomial::q_pow(r))
    }

    pub fn qp_pow(s: Exponent) -> QScalar {
        QScalar::from_monomial(&Monomial::qp_pow(s))
    }

    pub fn fraction(num: QPoly, den: QPoly) -> Result<QScalar> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QScalar::from_poly(num).mul(&QScalar::from_poly(den).inv()?))
    }

    /// Monomial part; `None` for zero.
    pub fn unit(&self) -> Option<&Monomial> {
        self.unit.as_ref()
    }

    /// Polynomial factors with their multiplicities.
    pub fn factors(&self) -> &[(QPoly, i64)] {
        &self.factors
    }

    /// Expanded numerator, carrying the unit.
    pub fn numer(&self) -> QPoly {
        match &self.unit {
            None => QPoly::zero(),
            Some(u) => expand(
                u,
                self.factors
                    .iter()
                    .filter(|f| f.1 > 0)
                    .map(|(p, e)| (p, *e)),
            ),
        }
    }

    /// Expanded denominator; its lowest term is `1`.
    pub fn denom(&self) -> QPoly {
        expand(
            &Monomial::one(),
            self.factors
                .iter()
                .filter(|f| f.1 < 0)
                .map(|(p, e)| (p, -*e)),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_none()
    }

    pub fn is_one(&self) -> bool {
        self.as_monomial().is_some_and(|m| m.is_one())
    }

    /// True when no factor appears with negative multiplicity.
    pub fn is_poly(&self) -> bool {
        self.factors.iter().all(|f| f.1 > 0)
    }

    pub fn as_monomial(&self) -> Option<Monomial> {
        let unit = self.unit.as_ref()?;
        if self.factors.is_empty() {
            return Some(unit.clone());
        }
        // Leading exponents add under multiplication, so a monomial value
        // needs the weighted leading exponents to cancel.
        let (mut r, mut s) = (Exponent::zero(), Exponent::zero());
        for (p, e) in &self.factors {
            let lead = p.lead().expect("nonzero factor");
            let k = super::rat_int(*e);
            r = &r + &lead.r.scale(&k);
            s = &s + &lead.s.scale(&k);
        }
        if !r.is_zero() || !s.is_zero() {
            return None;
        }
        let (num, den) = (self.numer(), self.denom());
        let ratio = num.lead()?.div(&den.lead()?);
        (den.scale(&ratio) == num).then_some(ratio)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        self.as_monomial().filter(|m| m.is_constant()).map(|m| m.c)
    }

    /// Idempotent; values are kept in normal form by every operation.
    pub fn canonicalize(&self) -> QScalar {
        self.clone()
    }

    /// True iff units and factor lists agree.
    pub fn structurally_eq(&self, other: &QScalar) -> bool {
        self.unit == other.unit && self.factors == other.factors
    }

    pub fn neg(&self) -> QScalar {
        QScalar {
            unit: self.unit.as_ref().map(Monomial::neg),
            factors: self.factors.clone(),
        }
    }

    pub fn add(&self, other: &QScalar) -> QScalar {
        let (ua, ub) = match (&self.unit, &other.unit) {
            (None, _) => return other.clone(),
            (_, None) => return self.clone(),
            (Some(a), Some(b)) => (a, b),
        };
        let mut common = Vec::new();
        let mut rest_a = Vec::new();
        let mut rest_b = Vec::new();
        let (a, b) = (&self.factors, &other.factors);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => std::cmp::Ordering::Less,
                _ => std::cmp::Ordering::Greater,
            };
            let (p, ea, eb) = match ord {
                std::cmp::Ordering::Less => {
                    i += 1;
                    (&a[i - 1].0, a[i - 1].1, 0)
                }
                std::cmp::Ordering::Greater => {
                    j += 1;
                    (&b[j - 1].0, 0, b[j - 1].1)
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (&a[i - 1].0, a[i - 1].1, b[j - 1].1)
                }
            };
            let g = ea.min(eb);
            if g != 0 {
                common.push((p.clone(), g));
            }
            if ea > g {
                rest_a.push((p, ea - g));
            }
            if eb > g {
                rest_b.push((p, eb - g));
            }
        }
        // A sum equal to a shared factor cancels when the lists are merged.
        let sum = expand(ua, rest_a).add(&expand(ub, rest_b));
        if sum.is_zero() {
            return QScalar::zero();
        }
        QScalar {
            unit: Some(Monomial::one()),
            factors: common,
        }
        .mul(&QScalar::from_poly(sum))
    }

    pub fn sub(&self, other: &QScalar) -> QScalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QScalar) -> QScalar {
        match (&self.unit, &other.unit) {
            (Some(a), Some(b)) => QScalar {
                unit: Some(a.mul(b)),
                factors: merge_factors(&self.factors, &other.factors, 1),
            },
            _ => QScalar::zero(),
        }
    }

    pub fn scale(&self, m: &Monomial) -> QScalar {
        QScalar {
            unit: self.unit.as_ref().map(|u| u.mul(m)),
            factors: self.factors.clone(),
        }
    }

    pub fn inv(&self) -> Result<QScalar> {
        let unit = self.unit.as_ref().ok_or(Error::DivisionByZero)?;
        Ok(QScalar {
            unit: Some(unit.inv()),
            factors: self.factors.iter().map(|(p, e)| (p.clone(), -e)).collect(),
        })
    }

    pub fn checked_div(&self, other: &QScalar) -> Result<QScalar> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<QScalar> {
        if k == 0 {
            return Ok(QScalar::one());
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let k = k.abs();
        Ok(QScalar {
            unit: base.unit.as_ref().map(|u| u.pow(k)),
            factors: base
                .factors
                .iter()
                .map(|(p, e)| (p.clone(), e * k))
                .collect(),
        })
    }
}

impl PartialEq for QScalar {
    fn eq(&self, other: &QScalar) -> bool {
        self.structurally_eq(other) || self.sub(other).is_zero()
    }
}

impl Eq for QScalar {}

impl Default for QScalar {
    fn default() -> QScalar {
        QScalar::zero()
    }
}

struct Factor<'a>(&'a QPoly, i64);

impl fmt::Display for Factor<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        self.0.fmt_ascending(f)?;
        f.write_str(")")?;
        if self.1 != 1 {
            write!(f, "^{}", self.1)?;
        }
        Ok(())
    }
}

fn write_product(f: &mut fmt::Formatter<'_>, factors: &[Factor<'_>]) -> fmt::Result {
    for (i, x) in factors.iter().enumerate() {
        if i > 0 {
            f.write_str("*")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(unit) = &self.unit else {
            return f.write_str("0");
        };
        let num: Vec<Factor> = self
            .factors
            .iter()
            .filter(|x| x.1 > 0)
            .map(|(p, e)| Factor(p, *e))
            .collect();
        let den: Vec<Factor> = self
            .factors
            .iter()
            .filter(|x| x.1 < 0)
            .map(|(p, e)| Factor(p, -*e))
            .collect();
        if num.is_empty() {
            write!(f, "{unit}")?;
        } else {
            if unit.c == -BigRational::one() && unit.is_constant() {
                f.write_str("-")?;
            } else if !unit.is_one() {
                write!(f, "{unit}*")?;
            }
            write_product(f, &num)?;
        }
        match den.as_slice() {
            [] => Ok(()),
            [one] if one.1 == 1 => write!(f, "/{one}"),
            _ => {
                f.write_str("/(")?;
                write_product(f, &den)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for QScalar {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl Add for &QScalar {
    type Output = QScalar;
    fn add(self, rhs: &QScalar) -> QScalar {
        QScalar::add(self, rhs)
    }
}

impl Sub for &QScalar {
    type Output = QScalar;
    fn sub(self, rhs: &QScalar) -> QScalar {
        QScalar::sub(self, rhs)
    }
}

impl Mul for &QScalar {
    type Output = QScalar;
    fn mul(self, rhs: &QScalar) -> QScalar {
        QScalar::mul(self, rhs)
    }
}

/// Panics on division by zero; use [`QScalar::checked_div`] otherwise.
impl Div for &QScalar {
    type Output = QScalar;
    fn div(self, rhs: &QScalar) -> QScalar {
        self.checked_div(rhs).expect("QScalar division by zero")
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar::neg(self)
    }
}

impl From<Monomial> for QScalar {
    fn from(m: Monomial) -> QScalar {
        QScalar::from_monomial(&m)
    }
}

impl From<i64> for QScalar {
    fn from(n: i64) -> QScalar {
        QScalar::from_int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(num: i64, den: i64) -> QScalar {
        QScalar::q_pow(Exponent::new(num, den))
    }

    #[test]
    fn difference_of_squares() {
        let one = QScalar::one();
        let h = q(1, 2);
        let prod = &(&one - &h) * &(&one + &h);
        assert_eq!(prod, &one - &q(1, 1));
        assert_eq!(prod.factors().len(), 2);
        assert_eq!(
            prod.numer(),
            QPoly::one().sub(&QPoly::from_monomial(&Monomial::q_pow(Exponent::from_int(
                1
            ))))
        );
    }

    #[test]
    fn additive_cancellation() {
        let qq = &q(1, 1) + &QScalar::qp_pow(Exponent::from_int(1));
        let r = &qq + &q(1, 1).neg();
        assert!(r.structurally_eq(&QScalar::qp_pow(Exponent::from_int(1))));
    }

    #[test]
    fn self_division_is_one() {
        let x = QScalar::fraction(
            QPoly::one().sub(&QPoly::from_monomial(&Monomial::q_pow(Exponent::new(1, 3)))),
            QPoly::one().add(&QPoly::from_monomial(&Monomial::qp_pow(
                Exponent::from_int(2),
            ))),
        )
        .unwrap();
        assert!((&x / &x).is_one());
        assert_eq!(x.inv().unwrap().inv().unwrap(), x);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            QScalar::one().checked_div(&QScalar::zero()),
            Err(Error::DivisionByZero)
        );
        assert_eq!(QScalar::zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn factors_are_normalized_and_merged() {
        let one = QScalar::one();
        let p = &one - &q(1, 3);
        let x = &(&p * &p) / &(&one - &q(2, 1));
        assert_eq!(x.factors().len(), 2);
        assert!(x.factors().iter().all(|(f, _)| f.trail().unwrap().is_one()));
        assert_eq!(x.to_string(), "(1 - q^(1/3))^2/(1 - q^2)");
        let back = &x * &(&one - &q(2, 1));
        assert!(back.structurally_eq(&(&p * &p)));
    }

    #[test]
    fn sums_over_shared_factors() {
        let one = QScalar::one();
        let d = (&one - &q(1, 2)).inv().unwrap();
        let a = &d * &q(1, 1);
        let b = &d * &QScalar::from_int(-1);
        let s = &a + &b;
        assert!(s.as_monomial().is_none());
        let unfolded = &(&one - &q(1, 2)) * &(&one + &q(1, 2));
        assert_eq!(&s * &unfolded, &(&q(1, 1) - &one) * &(&one + &q(1, 2)));
        assert_eq!(&(&q(1, 1) - &one) / &(&q(1, 2) - &one), &q(1, 2) + &one);
        assert!((&(&q(1, 1) - &one) / &(&q(1, 2) - &one))
            .as_monomial()
            .is_none());
        let sq = &(&one - &q(1, 1)) / &(&(&one - &q(1, 2)) * &(&one + &q(1, 2)));
        assert!(sq.is_one());
    }

    #[test]
    fn display_round_trips() {
        let one = QScalar::one();
        let x = &(&(&q(1, 2) * &QScalar::from_int(-3))
            * &(&one - &QScalar::qp_pow(Exponent::new(1, 2))))
            / &(&(&one - &q(1, 3)).pow(2).unwrap() * &(&one + &q(1, 1)));
        let back = crate::parse::parse_qscalar(&x.to_string()).unwrap();
        assert!(back.structurally_eq(&x), "{x} vs {back}");
        assert_eq!(
            crate::parse::parse_qscalar(&(-&(&one - &q(1, 1))).to_string()).unwrap(),
            &q(1, 1) - &one
        );
    }
}
