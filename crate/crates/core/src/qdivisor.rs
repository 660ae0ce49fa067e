//! q-divisors of rational functions and q-coboundary witnesses.
//!
//! `div_q f` pushes the divisor of `f` on the punctured line forward to
//! orbits of `q^Z`. It vanishes exactly when `f = c z^m b(qz)/b(z)`, and
//! [`solve_b`] builds such a `b` by telescoping along each orbit.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratfun::FactoredRat;
use crate::scalars::{Exponent, Monomial};

/// Weights on orbit classes, each keyed by the representative whose
/// q-exponent lies in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct QDivisor {
    weights: BTreeMap<Monomial, i64>,
}

impl QDivisor {
    pub fn zero() -> QDivisor {
        QDivisor::default()
    }

    pub fn add_point(&mut self, alpha: &Monomial, w: i64) {
        let class = alpha.orbit_class();
        let e = self.weights.entry(class.clone()).or_insert(0);
        *e += w;
        if *e == 0 {
            self.weights.remove(&class);
        }
    }

    pub fn weights(&self) -> &BTreeMap<Monomial, i64> {
        &self.weights
    }

    pub fn weight(&self, alpha: &Monomial) -> i64 {
        self.weights.get(&alpha.orbit_class()).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn add(&self, other: &QDivisor) -> QDivisor {
        let mut d = self.clone();
        for (p, w) in &other.weights {
            d.add_point(p, *w);
        }
        d
    }
}

impl fmt::Display for QDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .weights
            .iter()
            .map(|(p, w)| format!("{w}[π({p})]"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for QDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for QDivisor {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.weights.len()))?;
        for (p, w) in &self.weights {
            seq.serialize_element(&serde_json::json!({
                "class": p.to_string(),
                "c": crate::parse::rational_text(&p.c),
                "r": p.r.to_string(),
                "s": p.s.to_string(),
                "weight": w,
            }))?;
        }
        seq.end()
    }
}

pub fn div_q(f: &FactoredRat) -> QDivisor {
    let mut d = QDivisor::zero();
    for (alpha, e) in f.roots() {
        d.add_point(alpha, *e);
    }
    d
}

pub fn is_q_trivial(f: &FactoredRat) -> bool {
    div_q(f).is_zero()
}

/// Witness `f = c z^m b(qz)/b(z)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoboundaryForm {
    pub c: Monomial,
    pub m: i64,
    pub b: FactoredRat,
}

impl CoboundaryForm {
    /// Checks `f(z) b(z) = c z^m b(qz)` exactly.
    pub fn verify(&self, f: &FactoredRat) -> bool {
        let lhs = f.mul(&self.b);
        let rhs = self
            .b
            .sigma_q()
            .mul(&FactoredRat::z_pow(self.m))
            .scale_unit(&self.c);
        lhs == rhs
    }
}

/// Builds the coboundary witness of a q-trivial `f`.
///
/// On an orbit with top root `α` (largest q-exponent), the roots are
/// `α q^{-k}` with multiplicities `e_k`, and the partial sums
/// `S_k = e_0 + … + e_k` end at 0. Then `b = ∏_k (z - α q^{-k})^{-S_k}`
/// has `b(qz)/b(z)` equal to the orbit's factors up to `q^{deg b}`.
pub fn solve_b(f: &FactoredRat) -> Result<CoboundaryForm> {
    if !is_q_trivial(f) {
        return Err(Error::NotQTrivial);
    }
    let mut orbits: BTreeMap<Monomial, Vec<(&Monomial, i64)>> = BTreeMap::new();
    for (alpha, e) in f.roots() {
        orbits
            .entry(alpha.orbit_class())
            .or_default()
            .push((alpha, *e));
    }
    let mut b_roots: Vec<(Monomial, i64)> = Vec::new();
    for roots in orbits.values_mut() {
        roots.sort_by(|x, y| y.0.r.cmp(&x.0.r));
        let top = roots[0].0.clone();
        let mut weights: BTreeMap<i64, i64> = BTreeMap::new();
        for (alpha, e) in roots.iter() {
            let k = (&top.r - &alpha.r)
                .to_i64()
                .expect("same orbit, integer offset");
            weights.insert(k, *e);
        }
        let last = *weights.keys().next_back().unwrap();
        let mut partial = 0;
        for k in 0..last {
            partial += weights.get(&k).copied().unwrap_or(0);
            if partial != 0 {
                let point = top.div(&Monomial::q_pow(Exponent::from_int(k)));
                b_roots.push((point, -partial));
            }
        }
    }
    let b = FactoredRat::new(Monomial::one(), 0, b_roots);
    let c = f
        .unit_part()
        .div(&Monomial::q_pow(Exponent::from_int(b.root_degree())));
    let form = CoboundaryForm {
        c,
        m: f.z_power(),
        b,
    };
    if !form.verify(f) {
        return Err(Error::Invalid(format!(
            "coboundary construction failed to verify for `{f}`"
        )));
    }
    Ok(form)
}

/// `div_q` of `∏_j σ_{q'}^j(f)^{k_j}`.
pub fn divq_twisted_product(f: &FactoredRat, k: &[i64]) -> QDivisor {
    let mut prod = FactoredRat::one();
    for (j, kj) in k.iter().enumerate() {
        if *kj != 0 {
            prod = prod.mul(&f.sigma_qprime_pow(j as i64).pow(*kj));
        }
    }
    div_q(&prod)
}

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RankOneTag {
    FullGL1_Independent,
    ProperSubgroupH_Dependent,
    SigmaQPrimeConstant,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankOneVerdict {
    pub tag: RankOneTag,
    pub witness: Option<CoboundaryForm>,
}

/// Three-way classification of `σ_q y = a y`.
pub fn classify_rank_one(a: &FactoredRat) -> RankOneVerdict {
    match solve_b(a) {
        Err(_) => RankOneVerdict {
            tag: RankOneTag::FullGL1_Independent,
            witness: None,
        },
        Ok(w) => RankOneVerdict {
            tag: if w.m != 0 {
                RankOneTag::ProperSubgroupH_Dependent
            } else {
                RankOneTag::SigmaQPrimeConstant
            },
            witness: Some(w),
        },
    }
}
