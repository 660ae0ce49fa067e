//! Galois-group classification for generalized q-hypergeometric operators
//!
//! `L = zλ ∏ (a_i σ_q - 1) - ∏ ((b_j/q) σ_q - 1)` with `a_i = q^{α_i}` and
//! `b_j = q^{β_j}`. Every criterion depends only on the exponents modulo
//! `Z`, so the classifiers never touch `λ`.

use std::fmt;

use num::{BigInt, BigRational, One, Signed};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::integer_kernel;
use crate::operator::OperatorSpec;
use crate::qdivisor::{is_q_trivial, solve_b, CoboundaryForm};
use crate::ratfun::{FactoredRat, ZPoly};
use crate::scalars::{Exponent, ExponentVector, Monomial, QScalar};

/// Largest `n` accepted by the pairing search.
pub const MAX_BALANCED_N: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypergeometricSpec {
    pub n: usize,
    pub s: usize,
    pub alphas: Vec<ExponentVector>,
    pub betas: Vec<ExponentVector>,
    pub lambda: QScalar,
}

impl HypergeometricSpec {
    pub fn new(
        alphas: Vec<ExponentVector>,
        betas: Vec<ExponentVector>,
        lambda: QScalar,
    ) -> Result<HypergeometricSpec> {
        if alphas.is_empty() {
            return Err(Error::Invalid("at least one alpha is required".into()));
        }
        if lambda.is_zero() {
            return Err(Error::Invalid("lambda must be nonzero".into()));
        }
        for (j, b) in betas.iter().enumerate() {
            if b.in_z() && !b.p.is_positive() {
                return Err(Error::Invalid(format!(
                    "beta_{} = {b} puts b_{} in q^(-N)",
                    j + 1,
                    j + 1
                )));
            }
        }
        Ok(HypergeometricSpec {
            n: alphas.len(),
            s: betas.len(),
            alphas,
            betas,
            lambda,
        })
    }

    pub fn is_rational(&self) -> bool {
        self.alphas
            .iter()
            .chain(&self.betas)
            .all(ExponentVector::in_q)
    }

    fn rational(v: &[ExponentVector]) -> Result<Vec<BigRational>> {
        v.iter()
            .map(|x| {
                x.as_rational()
                    .cloned()
                    .ok_or_else(|| Error::IrrationalExponent(x.to_string()))
            })
            .collect()
    }

    pub fn rational_alphas(&self) -> Result<Vec<BigRational>> {
        HypergeometricSpec::rational(&self.alphas)
    }

    pub fn rational_betas(&self) -> Result<Vec<BigRational>> {
        HypergeometricSpec::rational(&self.betas)
    }

    /// True when `b_1 = q`, the normalization under which the series solves `L`.
    pub fn has_series_normalization(&self) -> bool {
        self.betas
            .first()
            .is_some_and(|b| b.as_rational().is_some_and(One::is_one))
    }

    fn series_name(&self) -> String {
        format!("{}Φ{}", self.n, self.s)
    }
}

fn q_pow(e: &BigRational) -> QScalar {
    QScalar::q_pow(Exponent::from_rational(e.clone()))
}

/// Coefficients in `σ` of `∏ (c_k σ - 1)`.
fn expand_sigma_product(cs: &[QScalar]) -> Vec<QScalar> {
    let mut acc = vec![QScalar::one()];
    for c in cs {
        let mut next = vec![QScalar::zero(); acc.len() + 1];
        for (k, a) in acc.iter().enumerate() {
            next[k] = next[k].sub(a);
            next[k + 1] = next[k + 1].add(&a.mul(c));
        }
        acc = next;
    }
    acc
}

/// Coefficients `a_0..a_max(n,s)` of the operator in `σ_q`.
pub fn build_operator(spec: &HypergeometricSpec) -> Result<OperatorSpec> {
    let a: Vec<QScalar> = spec.rational_alphas()?.iter().map(q_pow).collect();
    let b: Vec<QScalar> = spec
        .rational_betas()?
        .iter()
        .map(|e| q_pow(&(e - BigRational::one())))
        .collect();
    let p = expand_sigma_product(&a);
    let r = expand_sigma_product(&b);
    let len = p.len().max(r.len());
    let coeffs = (0..len)
        .map(|k| {
            let zpart = p
                .get(k)
                .map_or_else(ZPoly::zero, |c| ZPoly::term(c.mul(&spec.lambda), 1));
            let cpart = r
                .get(k)
                .map_or_else(ZPoly::zero, |c| ZPoly::constant(c.clone()));
            zpart.sub(&cpart)
        })
        .collect();
    Ok(OperatorSpec::new(coeffs))
}

fn differs_by_integer(a: &ExponentVector, b: &ExponentVector) -> bool {
    a.sub(b).in_z()
}

pub fn is_irreducible(spec: &HypergeometricSpec) -> bool {
    spec.alphas
        .iter()
        .all(|a| spec.betas.iter().all(|b| !differs_by_integer(a, b)))
}

/// Perfect matching `i ↦ μ(i)` on `0..n` under `ok(i, j)`.
///
/// Augmenting paths, with each row trying its own index first and then
/// the remaining columns in increasing order, so fixed points are kept
/// whenever they are compatible.
fn perfect_matching(n: usize, ok: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            std::iter::once(i)
                .chain((0..n).filter(move |&j| j != i))
                .filter(|&j| ok(i, j))
                .collect()
        })
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none_or(|w| augment(w, adj, seen, owner)) {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }
    for u in 0..n {
        let mut seen = vec![false; n];
        if !augment(u, &adj, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut mu = vec![0; n];
    for (v, u) in owner.iter().enumerate() {
        mu[u.expect("perfect matching")] = v;
    }
    Some(mu)
}

/// A permutation of `{1..n}` stored 1-based.
#[derive(Clone, PartialEq, Eq)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    fn from_zero_based(mu: &[usize]) -> Permutation {
        Permutation(mu.iter().map(|i| i + 1).collect())
    }

    pub fn cycles(&self) -> String {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.0[start] == start + 1 {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push((i + 1).to_string());
                i = self.0[i] - 1;
            }
            out.push_str(&format!("({})", cyc.join(" ")));
        }
        if out.is_empty() {
            "()".into()
        } else {
            out
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycles())
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serde_json::json!({ "cycles": self.cycles(), "images": self.0 }).serialize(serializer)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KummerWitness {
    pub d: usize,
    pub mu: Permutation,
    pub nu: Permutation,
}

fn shift_matching(v: &[ExponentVector], shift: &ExponentVector) -> Option<Vec<usize>> {
    perfect_matching(v.len(), |i, j| v[i].sub(&v[j]).sub(shift).in_z())
}

/// Smallest divisor `d ≠ 1` of `n` with both parameter lists stable mod `Z`
/// under a shift by `1/d`, with the permutations realizing it.
pub fn is_q_kummer_induced(spec: &HypergeometricSpec) -> Option<KummerWitness> {
    if spec.n != spec.s || !is_irreducible(spec) {
        return None;
    }
    (2..=spec.n).filter(|d| spec.n.is_multiple_of(*d)).find_map(|d| {
        let shift = ExponentVector::rational(BigRational::new(BigInt::one(), BigInt::from(d)));
        let mu = shift_matching(&spec.alphas, &shift)?;
        let nu = shift_matching(&spec.betas, &shift)?;
        Some(KummerWitness {
            d,
            mu: Permutation::from_zero_based(&mu),
            nu: Permutation::from_zero_based(&nu),
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GroupTag {
    SL,
    SO,
    Sp,
    GL,
    Reducible,
    KummerInduced,
    OutOfCriteria,
}

impl GroupTag {
    pub fn has_conclusions(self) -> bool {
        matches!(
            self,
            GroupTag::SL | GroupTag::SO | GroupTag::Sp | GroupTag::GL
        )
    }
}

/// `γ, μ_1, μ_2` with `γ + α_i + α_{μ_1(i)} ∈ Z` and `γ + β_j + β_{μ_2(j)} ∈ Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingWitness {
    pub gamma: BigRational,
    pub mu1: Permutation,
    pub mu2: Permutation,
}

impl Serialize for PairingWitness {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serde_json::json!({
            "gamma": crate::parse::rational_text(&self.gamma),
            "mu1": self.mu1,
            "mu2": self.mu2,
        })
        .serialize(serializer)
    }
}

fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Searches `γ` among `-α_1 - α_{i'}` (mod Z); every valid `γ` has this form.
pub fn find_pairing(alphas: &[BigRational], betas: &[BigRational]) -> Option<PairingWitness> {
    let n = alphas.len();
    let mut tried: Vec<BigRational> = Vec::new();
    for i in 0..n {
        let gamma = frac(&-(&alphas[0] + &alphas[i]));
        if tried.contains(&gamma) {
            continue;
        }
        tried.push(gamma.clone());
        let ok_a = |x: usize, y: usize| (&gamma + &alphas[x] + &alphas[y]).is_integer();
        let Some(mu1) = perfect_matching(n, ok_a) else {
            continue;
        };
        let ok_b = |x: usize, y: usize| (&gamma + &betas[x] + &betas[y]).is_integer();
        if let Some(mu2) = perfect_matching(betas.len(), ok_b) {
            return Some(PairingWitness {
                gamma,
                mu1: Permutation::from_zero_based(&mu1),
                mu2: Permutation::from_zero_based(&mu2),
            });
        }
    }
    None
}

/// One transcendence statement with the results it rests on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conclusion {
    pub statement: String,
    pub citations: Vec<&'static str>,
}

/// q-divisor data of the companion determinant `(-1)^n a_0/a_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeterminantInfo {
    pub det: Option<FactoredRat>,
    pub q_trivial: bool,
    pub witness: Option<CoboundaryForm>,
    pub method: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub tag: GroupTag,
    pub theorem_literal: bool,
    pub delta_conclusions: Vec<Conclusion>,
    pub sigma_conclusions: Vec<Conclusion>,
    pub pairing: Option<PairingWitness>,
    pub kummer: Option<KummerWitness>,
    pub determinant: Option<DeterminantInfo>,
    pub criteria: Vec<&'static str>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn citation_ids(&self) -> Vec<&'static str> {
        let mut ids: Vec<&'static str> = self.criteria.clone();
        for c in self.delta_conclusions.iter().chain(&self.sigma_conclusions) {
            ids.extend(c.citations.iter().copied());
        }
        let mut seen = std::collections::BTreeSet::new();
        ids.retain(|id| seen.insert(*id));
        ids
    }
}

fn analytic_note() -> String {
    "the standing analytic hypothesis 0 < |q| < 1 is assumed, not checked: q is formal here".into()
}

fn monomial_q(e: &BigRational) -> Monomial {
    Monomial::q_pow(Exponent::from_rational(e.clone()))
}

/// Factored companion determinant when `λ` is a monomial and the exponents
/// are rational; otherwise the q-divisor is decided from the exponents.
pub fn determinant_info(spec: &HypergeometricSpec) -> DeterminantInfo {
    let lambda = spec.lambda.as_monomial();
    let n = spec.n;
    let sum_alpha = spec
        .alphas
        .iter()
        .fold(ExponentVector::default(), |acc, a| acc.add(a));
    let sum_beta = spec
        .betas
        .iter()
        .fold(ExponentVector::default(), |acc, b| acc.add(b));
    if spec.s == n {
        // det = (zλ - 1) / (zλ A - B), A = q^{Σα}, B = q^{Σβ - n}.
        if let (Some(l), Some(sa), Some(sb)) =
            (&lambda, sum_alpha.as_rational(), sum_beta.as_rational())
        {
            let a = monomial_q(sa);
            let b = monomial_q(&(sb - BigRational::from_integer(BigInt::from(n))));
            let num = FactoredRat::linear(l.inv()).scale_unit(l);
            let den = FactoredRat::linear(b.div(&a).div(l)).scale_unit(&l.mul(&a));
            let det = num.div(&den);
            let witness = solve_b(&det).ok();
            return DeterminantInfo {
                q_trivial: witness.is_some(),
                det: Some(det),
                witness,
                method: "q-divisor of the factored determinant",
            };
        }
        return DeterminantInfo {
            det: None,
            q_trivial: sum_alpha.sub(&sum_beta).in_z(),
            witness: None,
            method: "root ratio q^(sum beta - n - sum alpha) lies in q^Z",
        };
    }
    if spec.s < n {
        // det = (zλ - (-1)^{n+s}) / (zλ A): one simple root, no root to cancel it.
        if let Some(l) = &lambda {
            let sign = if (n + spec.s).is_multiple_of(2) {
                Monomial::one()
            } else {
                Monomial::one().neg()
            };
            let unit = sum_alpha
                .as_rational()
                .map_or_else(Monomial::one, |sa| monomial_q(sa).inv());
            let det = FactoredRat::new(unit, -1, [(sign.div(l), 1)]);
            debug_assert!(!is_q_trivial(&det));
            let known_unit = sum_alpha.in_q();
            return DeterminantInfo {
                det: known_unit.then_some(det),
                q_trivial: false,
                witness: None,
                method: "q-divisor of the factored determinant",
            };
        }
        return DeterminantInfo {
            det: None,
            q_trivial: false,
            witness: None,
            method: "single simple root away from 0 cannot cancel in C^x/q^Z",
        };
    }
    DeterminantInfo {
        det: None,
        q_trivial: false,
        witness: None,
        method: "not computed for s > n",
    }
}

fn shifts_list(name: &str, count: usize) -> String {
    let term = |k: usize| match k {
        0 => format!("{name}(z)"),
        1 => format!("{name}(qz)"),
        k => format!("{name}(q^{k} z)"),
    };
    if count <= 3 {
        (0..count).map(term).collect::<Vec<_>>().join(", ")
    } else {
        format!("{}, {}, …, {}", term(0), term(1), term(count - 1))
    }
}

/// Attaches the transcendence conclusions for `tag`.
pub fn assemble_verdict(tag: GroupTag, spec: &HypergeometricSpec) -> Verdict {
    let mut v = Verdict {
        tag,
        theorem_literal: false,
        delta_conclusions: Vec::new(),
        sigma_conclusions: Vec::new(),
        pairing: None,
        kummer: None,
        determinant: None,
        criteria: Vec::new(),
        notes: Vec::new(),
    };
    let n = spec.n;
    let name = spec.series_name();
    let series = spec.has_series_normalization();
    match tag {
        GroupTag::SL | GroupTag::SO | GroupTag::Sp => {
            let (group, count) = match tag {
                GroupTag::SL => ("SL", n),
                GroupTag::SO => ("SO", n - 1),
                _ => ("Sp", n),
            };
            let mut statement = format!("G^δ contains {group}_{n}(C̃)");
            if series {
                statement.push_str(&format!(
                    "; {} are δ-algebraically independent over C(z)",
                    shifts_list(&name, count)
                ));
            }
            v.delta_conclusions.push(Conclusion {
                statement,
                citations: vec!["hyper.trichotomy", "hyper.delta.balanced"],
            });
            let det = determinant_info(spec);
            let mut parts = Vec::new();
            let mut cites = Vec::new();
            if series {
                parts.push(format!(
                    "{name}(z) is σ_q'-algebraically independent over C_E(z)"
                ));
                cites.push("hyper.sigma.balanced");
            }
            if det.q_trivial {
                parts.push(format!(
                    "any {count} entries of a nonzero meromorphic solution vector are σ_q'-algebraically independent over C_E(z)"
                ));
                cites.extend(["qdiv.trivial", "sigma.det-criterion"]);
            }
            if !parts.is_empty() {
                v.sigma_conclusions.push(Conclusion {
                    statement: parts.join("; "),
                    citations: cites,
                });
            }
            v.determinant = Some(det);
            v.notes.push(analytic_note());
        }
        GroupTag::GL => {
            let mut statement = format!("G = GL_{n}(C) and G^δ = GL_{n}(C̃)");
            if series {
                statement.push_str(&format!(
                    "; {} are δ-algebraically independent over C(z)",
                    shifts_list(&name, n)
                ));
            }
            v.delta_conclusions.push(Conclusion {
                statement,
                citations: vec!["hyper.gl.confluent", "hyper.delta.confluent"],
            });
            if series {
                v.sigma_conclusions.push(Conclusion {
                    statement: format!("{name}(z) is σ_q'-algebraically independent over C_E(z)"),
                    citations: vec!["hyper.sigma.confluent"],
                });
            }
            let det = determinant_info(spec);
            v.notes.push(format!(
                "det(A) has nonzero q-divisor ({}), so the σ_q'-group of σ_q y = det(A) y is GL_1",
                det.method
            ));
            v.determinant = Some(det);
            v.notes.push(analytic_note());
        }
        GroupTag::Reducible => v
            .notes
            .push("no conclusions: the operator is reducible".into()),
        GroupTag::KummerInduced => v
            .notes
            .push("no conclusions: the operator is q-Kummer induced".into()),
        GroupTag::OutOfCriteria => {
            v.notes
                .push("no conclusions: the implemented criteria do not apply".into());
        }
    }
    if !series && tag.has_conclusions() {
        v.notes
            .push("series statements need beta_1 = 1 (b_1 = q)".into());
    }
    v
}

/// Classifier for `n = s ≥ 2` with rational exponents.
pub fn classify_balanced(spec: &HypergeometricSpec) -> Result<Verdict> {
    if spec.n != spec.s || spec.n < 2 {
        return Err(Error::Invalid(
            "balanced classification needs n = s >= 2".into(),
        ));
    }
    if spec.n > MAX_BALANCED_N {
        return Err(Error::Capacity(format!(
            "n = {} exceeds the supported maximum {MAX_BALANCED_N}",
            spec.n
        )));
    }
    let alphas = spec.rational_alphas()?;
    let betas = spec.rational_betas()?;
    if !is_irreducible(spec) {
        let mut v = assemble_verdict(GroupTag::Reducible, spec);
        v.criteria.push("hyper.irreducible");
        return Ok(v);
    }
    if let Some(w) = is_q_kummer_induced(spec) {
        let mut v = assemble_verdict(GroupTag::KummerInduced, spec);
        v.kummer = Some(w);
        v.criteria.extend(["hyper.irreducible", "hyper.kummer"]);
        return Ok(v);
    }
    let sum: BigRational = alphas.iter().sum::<BigRational>() - betas.iter().sum::<BigRational>();
    let pairing = if sum.is_integer() {
        find_pairing(&alphas, &betas)
    } else {
        None
    };
    let tag = match &pairing {
        Some(_) if spec.n % 2 == 1 => GroupTag::SO,
        Some(_) => GroupTag::Sp,
        None => GroupTag::SL,
    };
    let mut v = assemble_verdict(tag, spec);
    v.pairing = pairing;
    v.theorem_literal = true;
    v.criteria
        .extend(["hyper.irreducible", "hyper.kummer", "hyper.trichotomy"]);
    v.notes.push(
        "theorem-literal: a pairing selects SO for odd n and Sp for even n, with no further parity check".into(),
    );
    Ok(v)
}

/// Connectedness of the Zariski closure of the group generated by
/// `Diag(e^{2iπα_1}, …, e^{2iπα_n})`.
///
/// It holds iff every integer relation `Σ m_i α_i ∈ Q` already lands in `Z`.
/// Such `m` form the integer kernel of the irrational-coefficient matrix,
/// and `m ↦ Σ m_i p_i mod Z` is linear, so checking a basis suffices.
pub fn torus_is_connected(alphas: &[ExponentVector]) -> bool {
    let symbols: Vec<String> = {
        let mut s: Vec<String> = alphas.iter().flat_map(|a| a.symbols().cloned()).collect();
        s.sort();
        s.dedup();
        s
    };
    let rows: Vec<Vec<BigRational>> = alphas
        .iter()
        .map(|a| symbols.iter().map(|t| a.coeff(t)).collect())
        .collect();
    integer_kernel(&rows).iter().all(|m| {
        let total: BigRational = m
            .iter()
            .zip(alphas)
            .map(|(mi, a)| BigRational::from_integer(mi.clone()) * &a.p)
            .sum();
        total.is_integer()
    })
}

/// Classifier for `n > s`, `n ≥ 2`.
pub fn classify_confluent(spec: &HypergeometricSpec) -> Result<Verdict> {
    if spec.n <= spec.s || spec.n < 2 {
        return Err(Error::Invalid(
            "confluent classification needs n > s and n >= 2".into(),
        ));
    }
    let separated = is_irreducible(spec);
    let connected = torus_is_connected(&spec.alphas);
    let tag = if separated && connected {
        GroupTag::GL
    } else {
        GroupTag::OutOfCriteria
    };
    let mut v = assemble_verdict(tag, spec);
    v.criteria.push("hyper.gl.confluent");
    if !separated {
        v.notes.push("some alpha_i - beta_j is an integer".into());
    }
    if !connected {
        v.notes
            .push("the torus generated by Diag(e^(2iπ alpha)) is not connected".into());
    }
    Ok(v)
}

/// Routes to the balanced or confluent classifier.
pub fn classify(spec: &HypergeometricSpec) -> Result<Verdict> {
    if spec.n == spec.s && spec.n >= 2 {
        return classify_balanced(spec);
    }
    if spec.n > spec.s && spec.n >= 2 {
        return classify_confluent(spec);
    }
    let mut v = assemble_verdict(GroupTag::OutOfCriteria, spec);
    v.notes.push(format!(
        "no criterion covers n = {}, s = {}",
        spec.n, spec.s
    ));
    Ok(v)
}
