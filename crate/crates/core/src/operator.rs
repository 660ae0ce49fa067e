//! Linear q-difference operators `Σ a_i(z) σ_q^i` with polynomial coefficients.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratfun::{ZPoly, ZRatFun};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OperatorSpec {
    coeffs: Vec<ZPoly>,
}

impl OperatorSpec {
    /// `coeffs[i]` multiplies `σ_q^i`. Trailing zero coefficients are dropped.
    pub fn new(mut coeffs: Vec<ZPoly>) -> OperatorSpec {
        while coeffs.last().is_some_and(ZPoly::is_zero) {
            coeffs.pop();
        }
        OperatorSpec { coeffs }
    }

    /// Clears denominators of rational coefficients by their product.
    pub fn from_rational(coeffs: &[ZRatFun]) -> OperatorSpec {
        let mut common = ZPoly::one();
        for c in coeffs {
            if !c.denom().is_one()
                && !common
                    .div_rem(c.denom())
                    .map(|(_, r)| r.is_zero())
                    .unwrap_or(false)
            {
                common = common.mul(c.denom());
            }
        }
        let polys = coeffs
            .iter()
            .map(|c| {
                let (quo, rem) = common
                    .mul(c.numer())
                    .div_rem(c.denom())
                    .expect("nonzero denominator");
                debug_assert!(rem.is_zero());
                quo
            })
            .collect();
        OperatorSpec::new(polys)
    }

    pub fn coeffs(&self) -> &[ZPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> ZPoly {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// Order `n` of the operator; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Errors unless `a_0` and `a_n` are both nonzero.
    pub fn check_nondegenerate(&self) -> Result<usize> {
        let n = self
            .order()
            .ok_or_else(|| Error::DegenerateOperator("zero operator".into()))?;
        if self.coeffs[0].is_zero() {
            return Err(Error::DegenerateOperator("a_0 = 0".into()));
        }
        Ok(n)
    }

    pub fn shift_z(&self, k: u32) -> OperatorSpec {
        OperatorSpec::new(self.coeffs.iter().map(|c| c.shift(k)).collect())
    }

    pub fn scale(&self, c: &crate::scalars::QScalar) -> OperatorSpec {
        OperatorSpec::new(self.coeffs.iter().map(|a| a.scale(c)).collect())
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})*σ"),
                _ => format!("({c})*σ^{i}"),
            })
            .collect();
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join(" + "))
    }
}

impl Serialize for OperatorSpec {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let items: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        items.serialize(serializer)
    }
}
