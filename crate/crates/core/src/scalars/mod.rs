//! Exact scalars over the coefficient field.
//!
//! `q` and `q'` are formal, multiplicatively independent symbols. A
//! [`Monomial`] is a point `c * q^r * q'^s` of the multiplicative group, a
//! [`QPoly`] is a finite sum of monomials with rational exponents and a
//! [`QScalar`] is a quotient of such sums, kept as a monomial times a
//! product of integer powers of polynomial factors. No factorization is
//! ever computed; factors are whatever products and sums produced.

mod expvec;
mod poly;
mod qscalar;

pub use expvec::ExponentVector;
pub use poly::{QPoly, Term};
pub use qscalar::QScalar;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Builds `n/d` as a big rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Formats a rational as `p` or `p/r`.
pub fn fmt_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Exact rational exponent in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Exponent(BigRational);

impl Exponent {
    pub fn new(num: i64, den: i64) -> Exponent {
        Exponent(rat(num, den))
    }

    pub fn from_int(n: i64) -> Exponent {
        Exponent(rat_int(n))
    }

    pub fn from_rational(x: BigRational) -> Exponent {
        Exponent(x)
    }

    pub fn zero() -> Exponent {
        Exponent(BigRational::zero())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Representative of `self mod 1` in `[0, 1)`.
    pub fn frac(&self) -> Exponent {
        Exponent(&self.0 - self.0.floor())
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn scale(&self, k: &BigRational) -> Exponent {
        Exponent(&self.0 * k)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.0))
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl Add for &Exponent {
    type Output = Exponent;
    fn add(self, rhs: &Exponent) -> Exponent {
        Exponent(&self.0 + &rhs.0)
    }
}

impl Sub for &Exponent {
    type Output = Exponent;
    fn sub(self, rhs: &Exponent) -> Exponent {
        Exponent(&self.0 - &rhs.0)
    }
}

impl Mul for &Exponent {
    type Output = Exponent;
    fn mul(self, rhs: &Exponent) -> Exponent {
        Exponent(&self.0 * &rhs.0)
    }
}

impl Neg for &Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent(-&self.0)
    }
}

impl From<i64> for Exponent {
    fn from(n: i64) -> Exponent {
        Exponent::from_int(n)
    }
}

/// A point `c * q^r * q'^s` of the multiplicative group, `c != 0`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub c: BigRational,
    pub r: Exponent,
    pub s: Exponent,
}

impl Monomial {
    /// Panics if `c` is zero.
    pub fn new(c: BigRational, r: Exponent, s: Exponent) -> Monomial {
        assert!(!c.is_zero(), "monomial coefficient must be nonzero");
        Monomial { c, r, s }
    }

    pub fn one() -> Monomial {
        Monomial::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Monomial {
        Monomial::new(c, Exponent::zero(), Exponent::zero())
    }

    pub fn q_pow(r: Exponent) -> Monomial {
        Monomial::new(BigRational::one(), r, Exponent::zero())
    }

    pub fn qp_pow(s: Exponent) -> Monomial {
        Monomial::new(BigRational::one(), Exponent::zero(), s)
    }

    pub fn is_one(&self) -> bool {
        self.c.is_one() && self.r.is_zero() && self.s.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            c: &self.c * &other.c,
            r: &self.r + &other.r,
            s: &self.s + &other.s,
        }
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial {
            c: &self.c / &other.c,
            r: &self.r - &other.r,
            s: &self.s - &other.s,
        }
    }

    pub fn inv(&self) -> Monomial {
        Monomial {
            c: self.c.recip(),
            r: -&self.r,
            s: -&self.s,
        }
    }

    pub fn neg(&self) -> Monomial {
        Monomial {
            c: -&self.c,
            r: self.r.clone(),
            s: self.s.clone(),
        }
    }

    pub fn pow(&self, k: i64) -> Monomial {
        let kr = rat_int(k);
        let c = if k >= 0 {
            num::pow(self.c.clone(), k as usize)
        } else {
            num::pow(self.c.recip(), k.unsigned_abs() as usize)
        };
        Monomial {
            c,
            r: self.r.scale(&kr),
            s: self.s.scale(&kr),
        }
    }

    /// A `k`-th root inside the monomial group, if the rational coefficient
    /// has one. For even `k` only the positive root is returned.
    pub fn root(&self, k: u32) -> Option<Monomial> {
        if k == 0 {
            return None;
        }
        if k == 1 {
            return Some(self.clone());
        }
        let negative = self.c.is_negative();
        if negative && k.is_multiple_of(2) {
            return None;
        }
        let n = integer_root(&self.c.numer().abs(), k)?;
        let d = integer_root(self.c.denom(), k)?;
        let mut c = BigRational::new(n, d);
        if negative {
            c = -c;
        }
        let inv_k = rat(1, k as i64);
        Some(Monomial {
            c,
            r: self.r.scale(&inv_k),
            s: self.s.scale(&inv_k),
        })
    }

    /// True iff the two points lie in the same `q^Z`-orbit.
    pub fn q_orbit_equal(&self, other: &Monomial) -> bool {
        self.c == other.c && self.s == other.s && (&self.r - &other.r).is_integer()
    }

    /// Canonical orbit representative: the q-exponent reduced to `[0, 1)`.
    pub fn orbit_class(&self) -> Monomial {
        Monomial {
            c: self.c.clone(),
            r: self.r.frac(),
            s: self.s.clone(),
        }
    }
}

/// `monomial_q_orbit_equal` as a free function.
pub fn monomial_q_orbit_equal(a: &Monomial, b: &Monomial) -> bool {
    a.q_orbit_equal(b)
}

fn integer_root(x: &BigInt, k: u32) -> Option<BigInt> {
    let r = x.nth_root(k);
    if num::pow(r.clone(), k as usize) == *x {
        Some(r)
    } else {
        None
    }
}

fn fmt_power(f: &mut fmt::Formatter<'_>, sym: &str, e: &Exponent) -> fmt::Result {
    if e.is_integer() && !e.is_negative() {
        if e.numer().is_one() {
            write!(f, "{sym}")
        } else {
            write!(f, "{sym}^{e}")
        }
    } else {
        write!(f, "{sym}^({e})")
    }
}

impl Monomial {
    /// Writes the monomial with its sign folded into the leading coefficient.
    pub(crate) fn fmt_signed(&self, f: &mut fmt::Formatter<'_>, abs: bool) -> fmt::Result {
        let c = if abs { self.c.abs() } else { self.c.clone() };
        let has_powers = !self.r.is_zero() || !self.s.is_zero();
        let mut need_star = false;
        if !has_powers {
            return f.write_str(&fmt_rational(&c));
        }
        if c == -BigRational::one() {
            f.write_str("-")?;
        } else if !c.is_one() {
            f.write_str(&fmt_rational(&c))?;
            need_star = true;
        }
        if !self.r.is_zero() {
            if need_star {
                f.write_str("*")?;
            }
            fmt_power(f, "q", &self.r)?;
            need_star = true;
        }
        if !self.s.is_zero() {
            if need_star {
                f.write_str("*")?;
            }
            fmt_power(f, "q'", &self.s)?;
        }
        Ok(())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_signed(f, false)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(c: i64, r: Exponent, s: Exponent) -> Monomial {
        Monomial::new(rat_int(c), r, s)
    }

    #[test]
    fn orbit_equality_examples() {
        let a = m(2, Exponent::new(1, 2), Exponent::zero());
        let b = m(2, Exponent::new(5, 2), Exponent::zero());
        let c = m(3, Exponent::new(1, 2), Exponent::zero());
        assert!(monomial_q_orbit_equal(&a, &b));
        assert!(!monomial_q_orbit_equal(&a, &c));
        let d = m(1, Exponent::new(1, 3), Exponent::from_int(1));
        let e = m(1, Exponent::new(1, 3), Exponent::zero());
        assert!(!monomial_q_orbit_equal(&d, &e));
    }

    #[test]
    fn orbit_class_reduces_into_unit_interval() {
        let a = m(1, Exponent::new(-7, 3), Exponent::zero());
        assert_eq!(a.orbit_class().r, Exponent::new(2, 3));
        assert_eq!(
            m(5, Exponent::from_int(3), Exponent::zero())
                .orbit_class()
                .r,
            Exponent::zero()
        );
    }

    #[test]
    fn roots() {
        let x = Monomial::new(rat(4, 9), Exponent::new(1, 2), Exponent::zero());
        let r = x.root(2).unwrap();
        assert_eq!(r.c, rat(2, 3));
        assert_eq!(r.r, Exponent::new(1, 4));
        assert!(Monomial::constant(rat_int(2)).root(2).is_none());
        assert!(Monomial::constant(rat_int(-4)).root(2).is_none());
        assert_eq!(
            Monomial::constant(rat_int(-8)).root(3).unwrap().c,
            rat_int(-2)
        );
    }

    #[test]
    fn display() {
        let x = Monomial::new(rat(-3, 2), Exponent::new(1, 2), Exponent::from_int(2));
        assert_eq!(x.to_string(), "-3/2*q^(1/2)*q'^2");
        assert_eq!(
            Monomial::q_pow(Exponent::from_int(-1)).to_string(),
            "q^(-1)"
        );
        assert_eq!(Monomial::q_pow(Exponent::from_int(1)).to_string(), "q");
        assert_eq!(Monomial::constant(rat_int(-1)).to_string(), "-1");
    }
}
