//! Square matrices over [`ZRatFun`].

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::OperatorSpec;
use crate::ratfun::ZRatFun;
use crate::scalars::QScalar;

#[derive(Clone, PartialEq, Eq)]
pub struct MatrixOverRat {
    n: usize,
    entries: Vec<ZRatFun>,
}

impl MatrixOverRat {
    pub fn zero(n: usize) -> MatrixOverRat {
        MatrixOverRat {
            n,
            entries: vec![ZRatFun::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> MatrixOverRat {
        MatrixOverRat::diag((0..n).map(|_| ZRatFun::one()).collect())
    }

    pub fn diag(d: Vec<ZRatFun>) -> MatrixOverRat {
        let mut m = MatrixOverRat::zero(d.len());
        for (i, x) in d.into_iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// Row-major construction; errors unless `rows` is square.
    pub fn from_rows(rows: Vec<Vec<ZRatFun>>) -> Result<MatrixOverRat> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("matrix must be square and nonempty".into()));
        }
        Ok(MatrixOverRat {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Companion matrix of `Σ a_i σ^i`: ones above the diagonal, last row
    /// `-a_0/a_n, …, -a_{n-1}/a_n`.
    pub fn companion(op: &OperatorSpec) -> Result<MatrixOverRat> {
        let n = op
            .order()
            .filter(|n| *n >= 1)
            .ok_or_else(|| Error::DegenerateOperator("companion needs order >= 1".into()))?;
        let an = ZRatFun::from_poly(op.coeff(n));
        let mut m = MatrixOverRat::zero(n);
        for i in 0..n - 1 {
            m.set(i, i + 1, ZRatFun::one());
        }
        for j in 0..n {
            let v = ZRatFun::from_poly(op.coeff(j)).checked_div(&an)?.neg();
            m.set(n - 1, j, v);
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &ZRatFun {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ZRatFun) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[ZRatFun] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<ZRatFun>> {
        self.entries
            .chunks(self.n)
            .map(<[ZRatFun]>::to_vec)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ZRatFun::is_zero)
    }

    pub fn map(&self, f: impl Fn(&ZRatFun) -> ZRatFun) -> MatrixOverRat {
        MatrixOverRat {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &MatrixOverRat) -> MatrixOverRat {
        assert_eq!(self.n, other.n);
        MatrixOverRat {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &MatrixOverRat) -> MatrixOverRat {
        assert_eq!(self.n, other.n);
        MatrixOverRat {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn mul(&self, other: &MatrixOverRat) -> MatrixOverRat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = MatrixOverRat::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZRatFun::zero();
                for k in 0..n {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn scale(&self, c: &ZRatFun) -> MatrixOverRat {
        self.map(|x| x.mul(c))
    }

    pub fn scale_scalar(&self, c: &QScalar) -> MatrixOverRat {
        self.map(|x| x.scale(c))
    }

    pub fn sigma_q_pow(&self, k: i64) -> MatrixOverRat {
        self.map(|x| x.sigma_q_pow(k))
    }

    pub fn sigma_q(&self) -> MatrixOverRat {
        self.sigma_q_pow(1)
    }

    pub fn sigma_qprime_pow(&self, k: i64) -> MatrixOverRat {
        self.map(|x| x.sigma_qprime_pow(k))
    }

    pub fn delta(&self) -> MatrixOverRat {
        self.map(ZRatFun::delta)
    }

    /// Determinant by elimination over the field of rational functions.
    pub fn det(&self) -> ZRatFun {
        let n = self.n;
        let mut rows = self.rows();
        let mut det = ZRatFun::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !rows[r][col].is_zero()) else {
                return ZRatFun::zero();
            };
            if p != col {
                rows.swap(p, col);
                det = det.neg();
            }
            let pivot = rows[col][col].clone();
            det = det.mul(&pivot);
            let inv = pivot.inv().expect("nonzero pivot");
            for r in col + 1..n {
                if rows[r][col].is_zero() {
                    continue;
                }
                let factor = rows[r][col].mul(&inv);
                for c in col..n {
                    let v = rows[r][c].sub(&factor.mul(&rows[col][c]));
                    rows[r][c] = v;
                }
            }
        }
        det
    }
}

impl fmt::Display for MatrixOverRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| {
                format!(
                    "[{}]",
                    r.iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl fmt::Debug for MatrixOverRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for MatrixOverRat {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect();
        rows.serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_zratfun;

    fn f(s: &str) -> ZRatFun {
        parse_zratfun(s).unwrap()
    }

    #[test]
    fn companion_shapes() {
        let op = OperatorSpec::new(vec![
            f("z + 1").as_poly().unwrap().clone(),
            f("z").as_poly().unwrap().clone(),
        ]);
        let a = MatrixOverRat::companion(&op).unwrap();
        assert_eq!(a.size(), 1);
        assert_eq!(*a.get(0, 0), f("-(z + 1)/z"));
        let op = OperatorSpec::new(vec![
            f("2").as_poly().unwrap().clone(),
            f("3").as_poly().unwrap().clone(),
            f("z").as_poly().unwrap().clone(),
        ]);
        let a = MatrixOverRat::companion(&op).unwrap();
        assert_eq!((a.get(0, 0).clone(), a.get(0, 1).clone()), (f("0"), f("1")));
        assert_eq!(a.det(), f("2/z"));
    }

    #[test]
    fn determinant_is_multiplicative() {
        let a =
            MatrixOverRat::from_rows(vec![vec![f("z"), f("1")], vec![f("q"), f("1/z")]]).unwrap();
        let b = MatrixOverRat::from_rows(vec![vec![f("1"), f("z^2")], vec![f("z - q"), f("3")]])
            .unwrap();
        assert_eq!(a.mul(&b).det(), a.det().mul(&b.det()));
    }
}
