use std::collections::BTreeMap;
use std::fmt;

use num::Signed;
use serde::ser::SerializeSeq;

use super::{ZPoly, ZRatFun};
use crate::scalars::{Exponent, Monomial, QScalar};

/// `u * z^m * ∏ (z - α)^e_α` with monomial roots `α`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FactoredRat {
    u: Monomial,
    m: i64,
    roots: BTreeMap<Monomial, i64>,
}

impl FactoredRat {
    /// Zero multiplicities are dropped.
    pub fn new(
        u: Monomial,
        m: i64,
        roots: impl IntoIterator<Item = (Monomial, i64)>,
    ) -> FactoredRat {
        let mut f = FactoredRat::unit(u);
        f.m = m;
        for (alpha, e) in roots {
            f.add_root(alpha, e);
        }
        f
    }

    pub fn one() -> FactoredRat {
        FactoredRat::unit(Monomial::one())
    }

    pub fn unit(u: Monomial) -> FactoredRat {
        FactoredRat {
            u,
            m: 0,
            roots: BTreeMap::new(),
        }
    }

    pub fn z_pow(m: i64) -> FactoredRat {
        FactoredRat {
            u: Monomial::one(),
            m,
            roots: BTreeMap::new(),
        }
    }

    /// `z - α`.
    pub fn linear(alpha: Monomial) -> FactoredRat {
        FactoredRat::new(Monomial::one(), 0, [(alpha, 1)])
    }

    fn add_root(&mut self, alpha: Monomial, e: i64) {
        let w = self.roots.entry(alpha.clone()).or_insert(0);
        *w += e;
        if *w == 0 {
            self.roots.remove(&alpha);
        }
    }

    pub fn unit_part(&self) -> &Monomial {
        &self.u
    }

    pub fn z_power(&self) -> i64 {
        self.m
    }

    pub fn roots(&self) -> &BTreeMap<Monomial, i64> {
        &self.roots
    }

    /// Total multiplicity `Σ e_α`.
    pub fn root_degree(&self) -> i64 {
        self.roots.values().sum()
    }

    pub fn is_one(&self) -> bool {
        self.u.is_one() && self.m == 0 && self.roots.is_empty()
    }

    pub fn mul(&self, other: &FactoredRat) -> FactoredRat {
        let mut f = self.clone();
        f.u = f.u.mul(&other.u);
        f.m += other.m;
        for (alpha, e) in &other.roots {
            f.add_root(alpha.clone(), *e);
        }
        f
    }

    pub fn inv(&self) -> FactoredRat {
        FactoredRat {
            u: self.u.inv(),
            m: -self.m,
            roots: self.roots.iter().map(|(a, e)| (a.clone(), -e)).collect(),
        }
    }

    pub fn div(&self, other: &FactoredRat) -> FactoredRat {
        self.mul(&other.inv())
    }

    pub fn pow(&self, k: i64) -> FactoredRat {
        if k == 0 {
            return FactoredRat::one();
        }
        FactoredRat {
            u: self.u.pow(k),
            m: self.m * k,
            roots: self.roots.iter().map(|(a, e)| (a.clone(), e * k)).collect(),
        }
    }

    pub fn scale_unit(&self, c: &Monomial) -> FactoredRat {
        let mut f = self.clone();
        f.u = f.u.mul(c);
        f
    }

    /// `f(λz) = u λ^(m + Σe) z^m ∏ (z - α/λ)^e`.
    pub fn scale_arg(&self, lambda: &Monomial) -> FactoredRat {
        FactoredRat {
            u: self.u.mul(&lambda.pow(self.m + self.root_degree())),
            m: self.m,
            roots: self
                .roots
                .iter()
                .map(|(a, e)| (a.div(lambda), *e))
                .collect(),
        }
    }

    pub fn sigma_q(&self) -> FactoredRat {
        self.sigma_q_pow(1)
    }

    pub fn sigma_q_pow(&self, k: i64) -> FactoredRat {
        self.scale_arg(&Monomial::q_pow(Exponent::from_int(k)))
    }

    pub fn sigma_qprime(&self) -> FactoredRat {
        self.sigma_qprime_pow(1)
    }

    pub fn sigma_qprime_pow(&self, k: i64) -> FactoredRat {
        self.scale_arg(&Monomial::qp_pow(Exponent::from_int(k)))
    }

    /// Divisor on the punctured line: the unit and `z^m` contribute nothing.
    pub fn divisor(&self) -> Divisor {
        Divisor::from_weights(self.roots.iter().map(|(a, e)| (a.clone(), *e)))
    }

    pub fn expand(&self) -> ZRatFun {
        let mut num = ZPoly::constant(QScalar::from_monomial(&self.u));
        let mut den = ZPoly::one();
        if self.m >= 0 {
            num = num.shift(self.m as u32);
        } else {
            den = den.shift(self.m.unsigned_abs() as u32);
        }
        for (alpha, e) in &self.roots {
            let lin = ZPoly::z().sub(&ZPoly::constant(QScalar::from_monomial(alpha)));
            let p = lin.pow(e.unsigned_abs() as u32);
            if *e > 0 {
                num = num.mul(&p);
            } else {
                den = den.mul(&p);
            }
        }
        ZRatFun::new(num, den).expect("nonzero factored denominator")
    }
}

impl fmt::Display for FactoredRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.m {
            0 => {}
            1 => parts.push("z".into()),
            m if m > 0 => parts.push(format!("z^{m}")),
            m => parts.push(format!("z^({m})")),
        }
        for (alpha, e) in &self.roots {
            let sign = if alpha.c.is_negative() { "+" } else { "-" };
            let abs = if alpha.c.is_negative() {
                alpha.neg()
            } else {
                alpha.clone()
            };
            let base = format!("(z {sign} {abs})");
            parts.push(match *e {
                1 => base,
                e if e > 0 => format!("{base}^{e}"),
                e => format!("{base}^({e})"),
            });
        }
        let body = parts.join("*");
        if body.is_empty() {
            return write!(f, "{}", self.u);
        }
        if self.u.is_one() {
            f.write_str(&body)
        } else if self.u == Monomial::one().neg() {
            write!(f, "-{body}")
        } else {
            write!(f, "{}*{body}", self.u)
        }
    }
}

impl fmt::Debug for FactoredRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for FactoredRat {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Finite integer-weighted sum of points of the multiplicative group.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Divisor {
    weights: BTreeMap<Monomial, i64>,
}

impl Divisor {
    pub fn zero() -> Divisor {
        Divisor::default()
    }

    pub fn from_weights(items: impl IntoIterator<Item = (Monomial, i64)>) -> Divisor {
        let mut d = Divisor::zero();
        for (p, w) in items {
            d.add_point(p, w);
        }
        d
    }

    pub fn add_point(&mut self, p: Monomial, w: i64) {
        let e = self.weights.entry(p.clone()).or_insert(0);
        *e += w;
        if *e == 0 {
            self.weights.remove(&p);
        }
    }

    pub fn weights(&self) -> &BTreeMap<Monomial, i64> {
        &self.weights
    }

    pub fn weight(&self, p: &Monomial) -> i64 {
        self.weights.get(p).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut d = self.clone();
        for (p, w) in &other.weights {
            d.add_point(p.clone(), *w);
        }
        d
    }

    pub fn scale(&self, k: i64) -> Divisor {
        Divisor::from_weights(self.weights.iter().map(|(p, w)| (p.clone(), w * k)))
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .weights
            .iter()
            .map(|(p, w)| format!("{w}[{p}]"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as a list of `{point, weight}` objects in point order.
impl serde::Serialize for Divisor {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.weights.len()))?;
        for (p, w) in &self.weights {
            seq.serialize_element(&serde_json::json!({ "point": p.to_string(), "weight": w }))?;
        }
        seq.end()
    }
}
