use num_bigint::BigUint;
use num_traits::Zero;

use super::PadicMatrix;
use crate::error::{Error, Result};
use crate::signature::Signature;

/// Singular numbers by p-adic elimination.
///
/// At each stage the remaining entry of least valuation is taken as pivot (ties go to the
/// smallest `(row, col)`), every other row `j` is replaced by `u·row_j − (a_j/p^v)·row_r`
/// where `p^v·u` is the pivot, and the pivot row and column are dropped. Each update is
/// unimodular over `ℤₚ`, and entries stay known modulo `p^N` throughout.
pub fn smith_singular_numbers(a: &PadicMatrix) -> Result<Signature> {
    let (n, m) = (a.rows(), a.cols());
    if n > m {
        return Err(Error::DimensionMismatch(format!(
            "singular numbers need rows <= cols, got {n}x{m}"
        )));
    }
    let ring = a.ring().clone();
    let mut res: Vec<BigUint> = a.residues().to_vec();
    let mut exact: Vec<bool> = a.exact_zero_flags().to_vec();
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..m).collect();
    let mut pivots = Vec::with_capacity(n);

    while !rows.is_empty() {
        let mut best: Option<(u32, usize, usize)> = None;
        let mut unknown = false;
        'scan: for (ri, &i) in rows.iter().enumerate() {
            for (ci, &j) in cols.iter().enumerate() {
                let idx = i * m + j;
                if exact[idx] {
                    continue;
                }
                match ring.valuation(&res[idx]) {
                    None => unknown = true,
                    Some(v) => {
                        if best.is_none_or(|(bv, _, _)| v < bv) {
                            best = Some((v, ri, ci));
                            if v == 0 {
                                break 'scan;
                            }
                        }
                    }
                }
            }
        }
        let Some((v, ri, ci)) = best else {
            return Err(if unknown {
                Error::PrecisionExhausted {
                    precision: ring.precision(),
                }
            } else {
                Error::SingularMatrix
            });
        };
        let r = rows[ri];
        let c = cols[ci];
        pivots.push(v as i64);
        rows.remove(ri);
        cols.remove(ci);
        if rows.is_empty() {
            break;
        }

        let pv = ring.p_power(v as u64);
        let unit = if v == 0 {
            res[r * m + c].clone()
        } else {
            &res[r * m + c] / &pv
        };
        for &i in &rows {
            let a_idx = i * m + c;
            if exact[a_idx] {
                continue;
            }
            let factor = if res[a_idx].is_zero() {
                BigUint::zero()
            } else if v == 0 {
                res[a_idx].clone()
            } else {
                &res[a_idx] / &pv
            };
            for &j in &cols {
                let (ij, rj) = (i * m + j, r * m + j);
                let lhs = if exact[ij] {
                    BigUint::zero()
                } else {
                    &unit * &res[ij]
                };
                let rhs = if exact[rj] {
                    BigUint::zero()
                } else {
                    &factor * &res[rj]
                };
                let lhs = ring.reduce(lhs);
                let rhs = ring.reduce(rhs);
                res[ij] = ring.sub(&lhs, &rhs);
                exact[ij] = exact[ij] && exact[rj];
            }
        }
    }

    pivots.sort_unstable_by(|x, y| y.cmp(x));
    let shift = a.shift();
    Ok(Signature::from_unsorted(
        pivots.into_iter().map(|v| v + shift).collect(),
    ))
}
