//! Sparse linear systems over the scalar field.
//!
//! Elimination over `QScalar` is exact but the fractions are not reduced,
//! so dense elimination grows quickly. Ranks are therefore read off
//! modular images `q^{1/L} ↦ t`, `q'^{1/L'} ↦ h` in `F_p`; the pivot pattern
//! of a modular elimination then drives an exact elimination on a square
//! subsystem whose pivots are known to be nonzero.

use std::collections::BTreeMap;

use num::integer::lcm;
use num::{BigInt, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalars::{Exponent, Monomial, QScalar};

pub const PRIME: u64 = (1 << 61) - 1;

/// `Σ_j rows[i][j] x_j = rhs[i]` with sparse rows.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    pub cols: usize,
    pub rows: Vec<BTreeMap<usize, QScalar>>,
    pub rhs: Vec<QScalar>,
}

impl LinearSystem {
    pub fn new(cols: usize) -> LinearSystem {
        LinearSystem {
            cols,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn push(&mut self, row: BTreeMap<usize, QScalar>, rhs: QScalar) {
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn is_homogeneous(&self) -> bool {
        self.rhs.iter().all(QScalar::is_zero)
    }

    /// Exact residual `M x - b`, one entry per row.
    pub fn residual(&self, x: &[QScalar]) -> Vec<QScalar> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                row.iter()
                    .filter(|(j, _)| !x[**j].is_zero())
                    .fold(b.neg(), |acc, (j, a)| acc.add(&a.mul(&x[*j])))
            })
            .collect()
    }

    pub fn is_solution(&self, x: &[QScalar]) -> bool {
        self.residual(x).iter().all(QScalar::is_zero)
    }

    fn entries(&self) -> impl Iterator<Item = &QScalar> {
        self.rows.iter().flat_map(BTreeMap::values).chain(&self.rhs)
    }
}

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    acc
}

fn invmod(a: u64) -> Option<u64> {
    (a != 0).then(|| powmod(a, PRIME - 2))
}

fn bigint_mod(x: &BigInt) -> u64 {
    let p = BigInt::from(PRIME);
    let r = ((x % &p) + &p) % &p;
    r.to_u64().expect("reduced residue")
}

/// Ring map from Laurent polynomials in `q^{1/L}, q'^{1/L'}` to `F_p`.
#[derive(Clone, Debug, Serialize)]
pub struct Specialization {
    pub q_denominator: u64,
    pub qp_denominator: u64,
    pub t: u64,
    pub h: u64,
}

impl Specialization {
    fn exponent_denominators<'a>(values: impl Iterator<Item = &'a QScalar>) -> (u64, u64) {
        let mut lq = 1u64;
        let mut lqp = 1u64;
        for v in values {
            let terms = v
                .factors()
                .iter()
                .flat_map(|(p, _)| p.terms().iter().map(|t| (&t.r, &t.s)));
            for (r, s) in v.unit().map(|u| (&u.r, &u.s)).into_iter().chain(terms) {
                lq = lcm(lq, r.denom().to_u64().expect("small denominator"));
                lqp = lcm(lqp, s.denom().to_u64().expect("small denominator"));
            }
        }
        (lq, lqp)
    }

    pub fn random<'a>(
        values: impl Iterator<Item = &'a QScalar>,
        rng: &mut ChaCha8Rng,
    ) -> Specialization {
        let (q_denominator, qp_denominator) = Specialization::exponent_denominators(values);
        Specialization {
            q_denominator,
            qp_denominator,
            t: rng.gen_range(2..PRIME),
            h: rng.gen_range(2..PRIME),
        }
    }

    fn power(&self, base: u64, e: &Exponent, den: u64) -> u64 {
        let k = (e.value() * BigInt::from(den)).to_integer();
        let k = k.to_i64().expect("small exponent");
        if k >= 0 {
            powmod(base, k as u64)
        } else {
            invmod(powmod(base, k.unsigned_abs())).expect("nonzero base")
        }
    }

    pub fn monomial(&self, m: &Monomial) -> Option<u64> {
        let c = mulmod(bigint_mod(m.c.numer()), invmod(bigint_mod(m.c.denom()))?);
        Some(mulmod(
            c,
            mulmod(
                self.power(self.t, &m.r, self.q_denominator),
                self.power(self.h, &m.s, self.qp_denominator),
            ),
        ))
    }

    /// `None` when the denominator vanishes at this point.
    pub fn scalar(&self, x: &QScalar) -> Option<u64> {
        let eval = |p: &crate::scalars::QPoly| -> Option<u64> {
            p.terms().iter().try_fold(0u64, |acc, t| {
                Some((acc + self.monomial(&t.monomial())?) % PRIME)
            })
        };
        let Some(unit) = x.unit() else {
            return Some(0);
        };
        let mut num = self.monomial(unit)?;
        let mut den = 1u64;
        for (p, e) in x.factors() {
            let v = powmod(eval(p)?, e.unsigned_abs());
            if *e > 0 {
                num = mulmod(num, v);
            } else {
                den = mulmod(den, v);
            }
        }
        Some(mulmod(num, invmod(den)?))
    }
}

/// Pivot pattern of a modular elimination of `[M | b]`.
#[derive(Clone, Debug, Serialize)]
pub struct RankProfile {
    pub rank: usize,
    pub rank_augmented: usize,
    #[serde(skip)]
    pub pivots: Vec<(usize, usize)>,
}

pub fn modular_profile(sys: &LinearSystem, sp: &Specialization) -> Option<RankProfile> {
    let width = sys.cols + 1;
    let mut rows: Vec<(usize, Vec<u64>)> = Vec::with_capacity(sys.rows.len());
    for (i, (row, b)) in sys.rows.iter().zip(&sys.rhs).enumerate() {
        let mut v = vec![0u64; width];
        for (j, a) in row {
            v[*j] = sp.scalar(a)?;
        }
        v[sys.cols] = sp.scalar(b)?;
        rows.push((i, v));
    }
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..width {
        let Some(p) = (next..rows.len()).find(|&r| rows[r].1[col] != 0) else {
            continue;
        };
        rows.swap(next, p);
        let inv = invmod(rows[next].1[col]).expect("nonzero pivot");
        let pivot_row = rows[next].1.clone();
        for (_, row) in rows.iter_mut().skip(next + 1) {
            if row[col] == 0 {
                continue;
            }
            let f = mulmod(row[col], inv);
            for c in col..width {
                if pivot_row[c] != 0 {
                    row[c] = (row[c] + PRIME - mulmod(f, pivot_row[c])) % PRIME;
                }
            }
        }
        pivots.push((rows[next].0, col));
        next += 1;
    }
    let rank = pivots.iter().filter(|(_, c)| *c < sys.cols).count();
    Some(RankProfile {
        rank,
        rank_augmented: pivots.len(),
        pivots,
    })
}

/// Solves `sub · X = rhs` for several right-hand sides with the pivots on the
/// diagonal, in order. Errors if a pivot turns out to be zero.
fn solve_square(
    mut sub: Vec<Vec<QScalar>>,
    mut rhs: Vec<Vec<QScalar>>,
) -> Result<Vec<Vec<QScalar>>> {
    let r = sub.len();
    for k in 0..r {
        let pivot = sub[k][k].clone();
        if pivot.is_zero() {
            return Err(Error::SingularMatrix);
        }
        for i in k + 1..r {
            if sub[i][k].is_zero() {
                continue;
            }
            let f = sub[i][k].checked_div(&pivot)?;
            let pivot_row = sub[k].clone();
            for j in k..r {
                if !pivot_row[j].is_zero() {
                    sub[i][j] = sub[i][j].sub(&f.mul(&pivot_row[j]));
                }
            }
            for col in rhs.iter_mut() {
                if !col[k].is_zero() {
                    let v = col[i].sub(&f.mul(&col[k]));
                    col[i] = v;
                }
            }
        }
    }
    let mut out = Vec::with_capacity(rhs.len());
    for col in rhs {
        let mut x = vec![QScalar::zero(); r];
        for k in (0..r).rev() {
            let mut acc = col[k].clone();
            for j in k + 1..r {
                if !sub[k][j].is_zero() && !x[j].is_zero() {
                    acc = acc.sub(&sub[k][j].mul(&x[j]));
                }
            }
            x[k] = acc.checked_div(&sub[k][k])?;
        }
        out.push(x);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub enum Solution {
    /// A particular solution (free variables set to 0) and a kernel basis.
    Found {
        particular: Vec<QScalar>,
        kernel: Vec<Vec<QScalar>>,
        profile: RankProfile,
    },
    /// `rank [M|b] > rank M` at every specialization tried. Rigorous when
    /// `M` has full column rank modulo `p`, since ranks only drop under
    /// specialization.
    Inconsistent {
        profiles: Vec<RankProfile>,
        rigorous: bool,
    },
}

pub const DEFAULT_POINTS: usize = 3;

/// Solves the system; `kernel` requests an exact kernel basis as well.
pub fn solve(sys: &LinearSystem, kernel: bool, seed: u64) -> Result<Solution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut profiles = Vec::new();
    let mut attempts = 0;
    while profiles.len() < DEFAULT_POINTS {
        attempts += 1;
        if attempts > 4 * DEFAULT_POINTS {
            return Err(Error::Capacity(
                "no usable modular specialization found".into(),
            ));
        }
        let sp = Specialization::random(sys.entries(), &mut rng);
        let Some(profile) = modular_profile(sys, &sp) else {
            continue;
        };
        if profile.rank == profile.rank_augmented {
            if let Some(found) = exact_from_profile(sys, &profile, kernel)? {
                return Ok(found);
            }
        }
        profiles.push(profile);
    }
    let rigorous = profiles
        .iter()
        .any(|p| p.rank == sys.cols && p.rank_augmented > p.rank);
    let consistent_somewhere = profiles.iter().any(|p| p.rank == p.rank_augmented);
    if consistent_somewhere {
        return Err(Error::Capacity(
            "modular ranks were consistent but no exact solution verified".into(),
        ));
    }
    Ok(Solution::Inconsistent { profiles, rigorous })
}

fn exact_from_profile(
    sys: &LinearSystem,
    profile: &RankProfile,
    kernel: bool,
) -> Result<Option<Solution>> {
    let pivots = &profile.pivots;
    let pivot_cols: Vec<usize> = pivots.iter().map(|(_, c)| *c).collect();
    let free: Vec<usize> = (0..sys.cols).filter(|c| !pivot_cols.contains(c)).collect();
    let sub: Vec<Vec<QScalar>> = pivots
        .iter()
        .map(|(r, _)| {
            pivot_cols
                .iter()
                .map(|c| sys.rows[*r].get(c).cloned().unwrap_or_default())
                .collect()
        })
        .collect();
    let mut rhs = vec![pivots
        .iter()
        .map(|(r, _)| sys.rhs[*r].clone())
        .collect::<Vec<_>>()];
    if kernel {
        for f in &free {
            rhs.push(
                pivots
                    .iter()
                    .map(|(r, _)| sys.rows[*r].get(f).map_or_else(QScalar::zero, QScalar::neg))
                    .collect(),
            );
        }
    }
    let solved = match solve_square(sub, rhs) {
        Ok(s) => s,
        Err(Error::SingularMatrix) => return Ok(None),
        Err(e) => return Err(e),
    };
    let expand = |values: &[QScalar], free_one: Option<usize>| -> Vec<QScalar> {
        let mut x = vec![QScalar::zero(); sys.cols];
        for (c, v) in pivot_cols.iter().zip(values) {
            x[*c] = v.clone();
        }
        if let Some(f) = free_one {
            x[f] = QScalar::one();
        }
        x
    };
    let particular = expand(&solved[0], None);
    if !sys.is_solution(&particular) {
        return Ok(None);
    }
    let mut basis = Vec::new();
    for (k, f) in free.iter().enumerate().filter(|_| kernel) {
        let v = expand(&solved[k + 1], Some(*f));
        let homogeneous = LinearSystem {
            cols: sys.cols,
            rows: sys.rows.clone(),
            rhs: vec![QScalar::zero(); sys.rows.len()],
        };
        if !homogeneous.is_solution(&v) {
            return Ok(None);
        }
        basis.push(v);
    }
    Ok(Some(Solution::Found {
        particular,
        kernel: basis,
        profile: profile.clone(),
    }))
}

/// Plain exact Gauss-Jordan elimination with rows taken in a caller-chosen
/// order, so pivot choices can be varied. Intended for small systems and
/// for cross-checking.
pub fn solve_dense(sys: &LinearSystem, row_order: &[usize]) -> Result<Option<Vec<QScalar>>> {
    let width = sys.cols + 1;
    let mut rows: Vec<Vec<QScalar>> = row_order
        .iter()
        .map(|&i| {
            let mut v = vec![QScalar::zero(); width];
            for (j, a) in &sys.rows[i] {
                v[*j] = a.clone();
            }
            v[sys.cols] = sys.rhs[i].clone();
            v
        })
        .collect();
    let mut pivot_of_col = BTreeMap::new();
    let mut next = 0;
    for col in 0..sys.cols {
        let Some(p) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, p);
        let inv = rows[next][col].inv()?;
        rows[next] = rows[next].iter().map(|x| x.mul(&inv)).collect();
        let pivot_row = rows[next].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == next || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for c in col..width {
                if !pivot_row[c].is_zero() {
                    row[c] = row[c].sub(&f.mul(&pivot_row[c]));
                }
            }
        }
        pivot_of_col.insert(col, next);
        next += 1;
    }
    if rows[next..].iter().any(|r| !r[sys.cols].is_zero()) {
        return Ok(None);
    }
    let mut x = vec![QScalar::zero(); sys.cols];
    for (col, r) in pivot_of_col {
        x[col] = rows[r][sys.cols].clone();
    }
    Ok(Some(x))
}
