//! Integer kernels of rational matrices.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

/// Basis of `{m ∈ Z^n : Σ_i m_i rows[i] = 0}` for `n` rational row vectors
/// of equal length.
///
/// Unimodular row operations bring `[M | I]` to echelon form in the `M`
/// block; the identity block of the rows whose `M` part vanished is a basis.
pub fn integer_kernel(rows: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    let n = rows.len();
    let k = rows.first().map_or(0, Vec::len);
    let mut scale = vec![BigInt::one(); k];
    for row in rows {
        for (j, x) in row.iter().enumerate() {
            scale[j] = scale[j].lcm(x.denom());
        }
    }
    let mut aug: Vec<Vec<BigInt>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v: Vec<BigInt> = row
                .iter()
                .enumerate()
                .map(|(j, x)| (x * BigRational::from_integer(scale[j].clone())).to_integer())
                .collect();
            v.extend((0..n).map(|t| {
                if t == i {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            }));
            v
        })
        .collect();
    let mut pivot = 0;
    for col in 0..k {
        loop {
            let nonzero: Vec<usize> = (pivot..n).filter(|&r| !aug[r][col].is_zero()).collect();
            let Some(&best) = nonzero.iter().min_by_key(|&&r| aug[r][col].abs()) else {
                break;
            };
            aug.swap(pivot, best);
            let mut done = true;
            for r in pivot + 1..n {
                if aug[r][col].is_zero() {
                    continue;
                }
                let f = aug[r][col].div_floor(&aug[pivot][col]);
                let src = aug[pivot].clone();
                for (x, y) in aug[r].iter_mut().zip(&src) {
                    *x -= &f * y;
                }
                if !aug[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                pivot += 1;
                break;
            }
        }
        if pivot == n {
            break;
        }
    }
    aug[pivot..].iter().map(|r| r[k..].to_vec()).collect()
}
