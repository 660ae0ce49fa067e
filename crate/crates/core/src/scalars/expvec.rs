use std::collections::BTreeMap;
use std::fmt;

use num::{BigRational, Signed, Zero};

use super::{fmt_rational, Exponent};

/// A real exponent `p + Σ c_j τ_j` where `1, τ_1, τ_2, …` are declared
/// Q-linearly independent symbols.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExponentVector {
    pub p: BigRational,
    coeffs: BTreeMap<String, BigRational>,
}

impl ExponentVector {
    pub fn rational(p: BigRational) -> ExponentVector {
        ExponentVector {
            p,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn symbol(name: &str) -> ExponentVector {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.to_string(), BigRational::from_integer(1.into()));
        ExponentVector {
            p: BigRational::zero(),
            coeffs,
        }
    }

    /// Zero coefficients are dropped.
    pub fn new(
        p: BigRational,
        coeffs: impl IntoIterator<Item = (String, BigRational)>,
    ) -> ExponentVector {
        let mut v = ExponentVector::rational(p);
        for (k, c) in coeffs {
            v.add_coeff(k, c);
        }
        v
    }

    fn add_coeff(&mut self, k: String, c: BigRational) {
        let e = self
            .coeffs
            .entry(k.clone())
            .or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<String, BigRational> {
        &self.coeffs
    }

    pub fn coeff(&self, sym: &str) -> BigRational {
        self.coeffs
            .get(sym)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        let mut v = self.clone();
        v.p += &other.p;
        for (k, c) in &other.coeffs {
            v.add_coeff(k.clone(), c.clone());
        }
        v
    }

    pub fn sub(&self, other: &ExponentVector) -> ExponentVector {
        self.add(&other.scale(&BigRational::from_integer((-1).into())))
    }

    pub fn scale(&self, k: &BigRational) -> ExponentVector {
        if k.is_zero() {
            return ExponentVector::default();
        }
        ExponentVector {
            p: &self.p * k,
            coeffs: self
                .coeffs
                .iter()
                .map(|(s, c)| (s.clone(), c * k))
                .collect(),
        }
    }

    /// Same vector with the rational part reduced into `[0, 1)`.
    pub fn frac_part(&self) -> ExponentVector {
        ExponentVector {
            p: &self.p - self.p.floor(),
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn in_z(&self) -> bool {
        self.coeffs.is_empty() && self.p.is_integer()
    }

    pub fn in_q(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs.is_empty() {
            Some(&self.p)
        } else {
            None
        }
    }

    pub fn as_exponent(&self) -> Option<Exponent> {
        self.as_rational()
            .map(|p| Exponent::from_rational(p.clone()))
    }

    pub fn symbols(&self) -> impl Iterator<Item = &String> {
        self.coeffs.keys()
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (sym, c) in &self.coeffs {
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            if mag == BigRational::from_integer(1.into()) {
                f.write_str(sym)?;
            } else {
                write!(f, "{}*{}", fmt_rational(&mag), sym)?;
            }
            first = false;
        }
        if first {
            return f.write_str(&fmt_rational(&self.p));
        }
        if !self.p.is_zero() {
            let sign = if self.p.is_negative() { " - " } else { " + " };
            write!(f, "{}{}", sign, fmt_rational(&self.p.abs()))?;
        }
        Ok(())
    }
}

impl fmt::Debug for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for ExponentVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}
