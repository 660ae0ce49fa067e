use std::collections::BTreeMap;
use std::fmt;

use num::integer::lcm;
use num::{BigRational, One, Signed, ToPrimitive};
use serde::ser::SerializeStruct;

use super::ZPoly;
use crate::scalars::{Exponent, Monomial, QScalar};

/// Truncated Puiseux series `Σ_{e < ord} y_e z^e` with `e ∈ (1/l)Z`.
#[derive(Clone, PartialEq, Eq)]
pub struct PuiseuxTrunc {
    l: u32,
    ord: Exponent,
    terms: BTreeMap<Exponent, QScalar>,
}

fn check_ramification(e: &Exponent, l: u32) {
    let d = e.denom().to_u32().expect("small exponent denominator");
    assert!(l.is_multiple_of(d), "exponent {e} is not in (1/{l})Z");
}

impl PuiseuxTrunc {
    /// Drops zero coefficients and terms at or beyond `ord`. Panics if an
    /// exponent is not in `(1/l)Z`.
    pub fn new(
        l: u32,
        ord: Exponent,
        terms: impl IntoIterator<Item = (Exponent, QScalar)>,
    ) -> PuiseuxTrunc {
        assert!(l > 0, "ramification must be positive");
        let mut out = BTreeMap::new();
        for (e, c) in terms {
            if c.is_zero() || e >= ord {
                continue;
            }
            check_ramification(&e, l);
            out.insert(e, c);
        }
        PuiseuxTrunc { l, ord, terms: out }
    }

    pub fn zero(ord: Exponent) -> PuiseuxTrunc {
        PuiseuxTrunc::new(1, ord, [])
    }

    pub fn from_zpoly(p: &ZPoly, ord: Exponent) -> PuiseuxTrunc {
        PuiseuxTrunc::new(
            1,
            ord,
            p.coeffs()
                .iter()
                .map(|(k, c)| (Exponent::from_int(*k as i64), c.clone())),
        )
    }

    pub fn ramification(&self) -> u32 {
        self.l
    }

    pub fn order(&self) -> &Exponent {
        &self.ord
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, QScalar> {
        &self.terms
    }

    pub fn coeff(&self, e: &Exponent) -> QScalar {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exponent of the first nonzero term, `None` when every known term is 0.
    pub fn valuation(&self) -> Option<Exponent> {
        self.terms.keys().next().cloned()
    }

    /// Valuation, or the truncation order for an all-zero truncation.
    pub fn valuation_bound(&self) -> Exponent {
        self.valuation().unwrap_or_else(|| self.ord.clone())
    }

    pub fn truncate(&self, ord: &Exponent) -> PuiseuxTrunc {
        let ord = ord.clone().min(self.ord.clone());
        PuiseuxTrunc::new(self.l, ord, self.terms.clone())
    }

    pub fn neg(&self) -> PuiseuxTrunc {
        PuiseuxTrunc {
            l: self.l,
            ord: self.ord.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn add(&self, other: &PuiseuxTrunc) -> PuiseuxTrunc {
        let l = lcm(self.l, other.l);
        let ord = self.ord.clone().min(other.ord.clone());
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let v = terms.entry(e.clone()).or_default();
            *v = v.add(c);
        }
        PuiseuxTrunc::new(l, ord, terms)
    }

    pub fn sub(&self, other: &PuiseuxTrunc) -> PuiseuxTrunc {
        self.add(&other.neg())
    }

    /// Product; the result is known up to `min(o1 + v2, o2 + v1)`.
    pub fn mul(&self, other: &PuiseuxTrunc) -> PuiseuxTrunc {
        let l = lcm(self.l, other.l);
        let ord = (&self.ord + &other.valuation_bound()).min(&other.ord + &self.valuation_bound());
        let mut terms: BTreeMap<Exponent, QScalar> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if e >= ord {
                    break;
                }
                let v = terms.entry(e).or_default();
                *v = v.add(&c1.mul(c2));
            }
        }
        PuiseuxTrunc::new(l, ord, terms)
    }

    /// Exact product with a polynomial in `z`.
    pub fn mul_zpoly(&self, p: &ZPoly) -> PuiseuxTrunc {
        let Some(v) = p.valuation() else {
            return PuiseuxTrunc::zero(&self.ord + &self.valuation_bound());
        };
        let ord = &self.ord + &Exponent::from_int(v as i64);
        let mut terms: BTreeMap<Exponent, QScalar> = BTreeMap::new();
        for (k, a) in p.coeffs() {
            let shift = Exponent::from_int(*k as i64);
            for (e, c) in &self.terms {
                let v = terms.entry(e + &shift).or_default();
                *v = v.add(&a.mul(c));
            }
        }
        PuiseuxTrunc::new(self.l, ord, terms)
    }

    pub fn scale(&self, c: &QScalar) -> PuiseuxTrunc {
        PuiseuxTrunc::new(
            self.l,
            self.ord.clone(),
            self.terms.iter().map(|(e, v)| (e.clone(), v.mul(c))),
        )
    }

    /// Multiplication by `z^e`.
    pub fn shift(&self, e: &Exponent) -> PuiseuxTrunc {
        let l = lcm(self.l, e.denom().to_u32().expect("small denominator"));
        PuiseuxTrunc::new(
            l,
            &self.ord + e,
            self.terms.iter().map(|(k, c)| (k + e, c.clone())),
        )
    }

    /// `y(λz)` for `λ` with coefficient 1, so every `λ^e` stays a monomial.
    fn scale_arg_unit(&self, lambda: &Monomial) -> PuiseuxTrunc {
        debug_assert!(lambda.c.is_one());
        PuiseuxTrunc {
            l: self.l,
            ord: self.ord.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let m = Monomial::new(BigRational::one(), &lambda.r * e, &lambda.s * e);
                    (e.clone(), c.scale(&m))
                })
                .collect(),
        }
    }

    pub fn sigma_q_pow(&self, k: i64) -> PuiseuxTrunc {
        self.scale_arg_unit(&Monomial::q_pow(Exponent::from_int(k)))
    }

    pub fn sigma_q(&self) -> PuiseuxTrunc {
        self.sigma_q_pow(1)
    }

    pub fn sigma_qprime_pow(&self, k: i64) -> PuiseuxTrunc {
        self.scale_arg_unit(&Monomial::qp_pow(Exponent::from_int(k)))
    }
}

fn fmt_zpow(e: &Exponent) -> String {
    if e.is_zero() {
        String::new()
    } else if e.is_integer() && !e.is_negative() {
        if e.numer().is_one() {
            "z".into()
        } else {
            format!("z^{e}")
        }
    } else {
        format!("z^({e})")
    }
}

impl fmt::Display for PuiseuxTrunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            let z = fmt_zpow(e);
            match c.as_monomial() {
                Some(m) => {
                    let negative = m.c.is_negative();
                    let abs = if negative { m.neg() } else { m };
                    if first {
                        if negative {
                            f.write_str("-")?;
                        }
                    } else {
                        f.write_str(if negative { " - " } else { " + " })?;
                    }
                    if z.is_empty() {
                        write!(f, "{abs}")?;
                    } else if abs.is_one() {
                        f.write_str(&z)?;
                    } else {
                        write!(f, "{abs}*{z}")?;
                    }
                }
                None => {
                    if !first {
                        f.write_str(" + ")?;
                    }
                    if z.is_empty() {
                        write!(f, "({c})")?;
                    } else {
                        write!(f, "({c})*{z}")?;
                    }
                }
            }
            first = false;
        }
        if !first {
            f.write_str(" + ")?;
        }
        let big_o = fmt_zpow(&self.ord);
        write!(
            f,
            "O({})",
            if big_o.is_empty() {
                "1".to_string()
            } else {
                big_o
            }
        )
    }
}

impl fmt::Debug for PuiseuxTrunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for PuiseuxTrunc {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(e, c)| serde_json::json!({ "exponent": e.to_string(), "coefficient": c.to_string() }))
            .collect();
        let mut st = serializer.serialize_struct("PuiseuxTrunc", 3)?;
        st.serialize_field("ramification", &self.l)?;
        st.serialize_field("order", &self.ord)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}
