use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::PadicMatrix;
use crate::error::{Error, Result};
use crate::signature::Signature;

/// Largest row count accepted by the minors oracle.
pub const MAX_MINOR_ROWS: usize = 5;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Cofactor expansion along the first row.
fn det(m: &[Vec<BigInt>]) -> BigInt {
    let k = m.len();
    match k {
        0 => BigInt::from(1),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => {
            let mut acc = BigInt::zero();
            for c in 0..k {
                if m[0][c].is_zero() {
                    continue;
                }
                let sub: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != c)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][c] * det(&sub);
                if c % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

fn int_valuation(x: &BigInt, p: &BigInt) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let mut y = x.abs();
    let mut k = 0;
    while (&y % p).is_zero() {
        y /= p;
        k += 1;
    }
    Some(k)
}

/// Singular numbers from minors: `λ_n + … + λ_{n−k+1} = min val_p(k×k minor)`.
///
/// Residues are lifted to integers, so a determinant is trusted only while its valuation
/// is below the precision. Exponential in the size; meant as an independent check.
pub fn singular_numbers_via_minors(a: &PadicMatrix) -> Result<Signature> {
    let (n, m) = (a.rows(), a.cols());
    if n > m {
        return Err(Error::DimensionMismatch(format!(
            "singular numbers need rows <= cols, got {n}x{m}"
        )));
    }
    if n > MAX_MINOR_ROWS {
        return Err(Error::DimensionMismatch(format!(
            "minors oracle supports at most {MAX_MINOR_ROWS} rows"
        )));
    }
    let precision = a.precision();
    let p = BigInt::from(a.prime().get());
    let lifted = a.lifted();
    let zero_row = (0..n).any(|i| (0..m).all(|j| a.is_exact_zero(i, j)));

    let mut partial = vec![0i64; n + 1];
    for k in 1..=n {
        let mut best: Option<u32> = None;
        let mut any_nonzero = false;
        for rs in combinations(n, k) {
            for cs in combinations(m, k) {
                let sub: Vec<Vec<BigInt>> = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| lifted[i][j].clone()).collect())
                    .collect();
                let d = det(&sub);
                if let Some(v) = int_valuation(&d, &p) {
                    any_nonzero = true;
                    if v < precision && best.is_none_or(|b| v < b) {
                        best = Some(v);
                    }
                }
            }
        }
        match best {
            Some(v) => partial[k] = v as i64,
            None if !any_nonzero && zero_row => return Err(Error::SingularMatrix),
            None => return Err(Error::PrecisionExhausted { precision }),
        }
    }
    // partial[k] is the sum of the k smallest parts
    let mut parts: Vec<i64> = (1..=n)
        .map(|k| partial[k] - partial[k - 1] + a.shift())
        .collect();
    parts.reverse();
    // non-monotone partial sums only arise from determinants truncated by the precision
    Signature::new(parts).map_err(|_| Error::PrecisionExhausted { precision })
}
