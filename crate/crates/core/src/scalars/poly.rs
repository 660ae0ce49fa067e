use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigRational, One, Signed, Zero};

use super::{Exponent, Monomial};

/// One term `c * q^r * q'^s` of a [`QPoly`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Term {
    pub r: Exponent,
    pub s: Exponent,
    pub c: BigRational,
}

impl Term {
    fn key_cmp(&self, other: &Term) -> Ordering {
        (&self.r, &self.s).cmp(&(&other.r, &other.s))
    }

    pub fn monomial(&self) -> Monomial {
        Monomial::new(self.c.clone(), self.r.clone(), self.s.clone())
    }
}

/// Finite sum of monomials with rational exponents in `q` and `q'`.
///
/// Terms are kept sorted by `(r, s)` with distinct keys and nonzero
/// coefficients. The lexicographic order on exponent pairs is a group
/// order, so leading and trailing terms are multiplicative.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QPoly {
    terms: Vec<Term>,
}

impl QPoly {
    pub fn zero() -> QPoly {
        QPoly { terms: Vec::new() }
    }

    pub fn one() -> QPoly {
        QPoly::from_monomial(&Monomial::one())
    }

    pub fn from_monomial(m: &Monomial) -> QPoly {
        QPoly {
            terms: vec![Term {
                r: m.r.clone(),
                s: m.s.clone(),
                c: m.c.clone(),
            }],
        }
    }

    pub fn from_rational(c: BigRational) -> QPoly {
        if c.is_zero() {
            QPoly::zero()
        } else {
            QPoly::from_monomial(&Monomial::constant(c))
        }
    }

    /// Builds a sum from arbitrary terms, combining equal keys.
    pub fn from_terms(terms: impl IntoIterator<Item = Term>) -> QPoly {
        let mut acc: BTreeMap<(Exponent, Exponent), BigRational> = BTreeMap::new();
        for t in terms {
            let e = acc.entry((t.r, t.s)).or_insert_with(BigRational::zero);
            *e += t.c;
        }
        QPoly {
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|((r, s), c)| Term { r, s, c })
                .collect(),
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && {
            let t = &self.terms[0];
            t.c.is_one() && t.r.is_zero() && t.s.is_zero()
        }
    }

    pub fn as_monomial(&self) -> Option<Monomial> {
        if self.terms.len() == 1 {
            Some(self.terms[0].monomial())
        } else {
            None
        }
    }

    pub fn lead(&self) -> Option<Monomial> {
        self.terms.last().map(Term::monomial)
    }

    pub fn trail(&self) -> Option<Monomial> {
        self.terms.first().map(Term::monomial)
    }

    pub fn neg(&self) -> QPoly {
        QPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    r: t.r.clone(),
                    s: t.s.clone(),
                    c: -&t.c,
                })
                .collect(),
        }
    }

    pub fn scale(&self, m: &Monomial) -> QPoly {
        QPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    r: &t.r + &m.r,
                    s: &t.s + &m.s,
                    c: &t.c * &m.c,
                })
                .collect(),
        }
    }

    pub fn scale_rational(&self, k: &BigRational) -> QPoly {
        if k.is_zero() {
            return QPoly::zero();
        }
        QPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    r: t.r.clone(),
                    s: t.s.clone(),
                    c: &t.c * k,
                })
                .collect(),
        }
    }

    fn merge(a: &[Term], b: &[Term]) -> Vec<Term> {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].key_cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].c + &b[j].c;
                    if !c.is_zero() {
                        out.push(Term {
                            r: a[i].r.clone(),
                            s: a[i].s.clone(),
                            c,
                        });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        out
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        QPoly {
            terms: QPoly::merge(&self.terms, &other.terms),
        }
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        // Each monomial shift of `big` stays sorted; merge the shifted copies pairwise.
        let mut parts: Vec<Vec<Term>> = small
            .terms
            .iter()
            .map(|t| big.scale(&t.monomial()).terms)
            .collect();
        while parts.len() > 1 {
            let mut next = Vec::with_capacity(parts.len().div_ceil(2));
            let mut it = parts.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(QPoly::merge(&a, &b)),
                    None => next.push(a),
                }
            }
            parts = next;
        }
        QPoly {
            terms: parts.pop().unwrap_or_default(),
        }
    }

    pub fn pow(&self, k: u32) -> QPoly {
        let mut acc = QPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact quotient `self / d` if `d` divides `self` as a Laurent sum.
    ///
    /// Every quotient term lies between `trail(self)/trail(d)` and
    /// `lead(self)/lead(d)`; leaving that window proves non-divisibility.
    pub fn div_exact(&self, d: &QPoly) -> Option<QPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(QPoly::zero());
        }
        if let Some(m) = d.as_monomial() {
            return Some(self.scale(&m.inv()));
        }
        if self.len() < 2 {
            return None;
        }
        let d_lead = d.terms.last().unwrap();
        let d_trail = &d.terms[0];
        let s_trail = &self.terms[0];
        let lo = (&s_trail.r - &d_trail.r, &s_trail.s - &d_trail.s);
        let s_lead = self.terms.last().unwrap();
        let hi = (&s_lead.r - &d_lead.r, &s_lead.s - &d_lead.s);
        if lo > hi {
            return None;
        }
        let mut rem: BTreeMap<(Exponent, Exponent), BigRational> = self
            .terms
            .iter()
            .map(|t| ((t.r.clone(), t.s.clone()), t.c.clone()))
            .collect();
        let mut quotient = Vec::new();
        while let Some((key, c)) = rem.iter().next_back() {
            let qr = &key.0 - &d_lead.r;
            let qs = &key.1 - &d_lead.s;
            if (&qr, &qs) < (&lo.0, &lo.1) {
                return None;
            }
            let qc = c / &d_lead.c;
            for t in &d.terms {
                let k = (&t.r + &qr, &t.s + &qs);
                let delta = &qc * &t.c;
                match rem.get_mut(&k) {
                    Some(v) => {
                        *v -= delta;
                        if v.is_zero() {
                            rem.remove(&k);
                        }
                    }
                    None => {
                        rem.insert(k, -delta);
                    }
                }
            }
            quotient.push(Term {
                r: qr,
                s: qs,
                c: qc,
            });
        }
        quotient.reverse();
        Some(QPoly { terms: quotient })
    }

    /// Substitutes numeric values through a caller-supplied term evaluator.
    pub fn eval_with<T, F>(&self, zero: T, mut f: F) -> T
    where
        T: std::ops::Add<Output = T>,
        F: FnMut(&Term) -> T,
    {
        let mut acc = zero;
        for t in &self.terms {
            acc = acc + f(t);
        }
        acc
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest term first reads naturally: q^2 - 2*q + 1.
        for (i, t) in self.terms.iter().rev().enumerate() {
            let m = t.monomial();
            if i == 0 {
                m.fmt_signed(f, false)?;
            } else {
                f.write_str(if t.c.is_negative() { " - " } else { " + " })?;
                m.fmt_signed(f, true)?;
            }
        }
        Ok(())
    }
}

impl QPoly {
    /// Lowest term first, as in `1 - q^(1/3)`.
    pub(crate) fn fmt_ascending(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let m = t.monomial();
            if i == 0 {
                m.fmt_signed(f, false)?;
            } else {
                f.write_str(if t.c.is_negative() { " - " } else { " + " })?;
                m.fmt_signed(f, true)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
