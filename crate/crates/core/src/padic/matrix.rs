use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{valuation, PadicScalar, Prime, ResidueRing, Valuation};
use crate::error::{Error, Result};
use crate::signature::Signature;

/// A matrix over `ℚₚ` known modulo `p^(N + shift)`: `p^shift · R` with `R` integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicMatrix {
    ring: Arc<ResidueRing>,
    rows: usize,
    cols: usize,
    shift: i64,
    residues: Vec<BigUint>,
    exact_zero: Vec<bool>,
}

/// JSON form used by fixtures and the command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixLiteral {
    pub p: u64,
    pub precision: u32,
    #[serde(default)]
    pub shift: i64,
    pub entries: Vec<Vec<String>>,
}

impl PadicMatrix {
    /// Builds a matrix from raw parts. Residues are reduced; flagged entries must be zero.
    pub fn from_parts(
        ring: Arc<ResidueRing>,
        rows: usize,
        cols: usize,
        shift: i64,
        residues: Vec<BigUint>,
        exact_zero: Vec<bool>,
    ) -> Result<Self> {
        if residues.len() != rows * cols || exact_zero.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix",
                rows * cols
            )));
        }
        let residues: Vec<BigUint> = residues
            .into_iter()
            .zip(&exact_zero)
            .map(|(r, &z)| if z { BigUint::zero() } else { ring.reduce(r) })
            .collect();
        Ok(PadicMatrix {
            ring,
            rows,
            cols,
            shift,
            residues,
            exact_zero,
        })
    }

    /// Residues with no exact-zero information: a zero residue means "zero to precision".
    pub fn from_residues(
        ring: Arc<ResidueRing>,
        rows: usize,
        cols: usize,
        shift: i64,
        residues: Vec<BigUint>,
    ) -> Result<Self> {
        let flags = vec![false; rows * cols];
        Self::from_parts(ring, rows, cols, shift, residues, flags)
    }

    /// Factors out the minimal valuation and reduces the remaining integral entries.
    pub fn reduce(entries: &[Vec<BigRational>], p: Prime, precision: u32) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let shift = entries
            .iter()
            .flatten()
            .filter_map(|x| valuation(x, p).finite())
            .min()
            .unwrap_or(0);
        let ring = ResidueRing::new(p, precision);
        let pb = BigInt::from(p.get());
        let mut residues = Vec::with_capacity(rows * cols);
        let mut flags = Vec::with_capacity(rows * cols);
        for x in entries.iter().flatten() {
            if x.is_zero() {
                residues.push(BigUint::zero());
                flags.push(true);
                continue;
            }
            let scaled = if shift >= 0 {
                x / BigRational::from_integer(pb.pow(shift as u32))
            } else {
                x * BigRational::from_integer(pb.pow((-shift) as u32))
            };
            let num = ring.from_int(scaled.numer());
            let den = ring.from_int(scaled.denom());
            let inv = ring
                .inverse(&den)
                .ok_or_else(|| Error::DenominatorNotInvertible(x.to_string()))?;
            residues.push(ring.mul(&num, &inv));
            flags.push(false);
        }
        Self::from_parts(ring, rows, cols, shift, residues, flags)
    }

    pub fn from_integers(entries: &[Vec<i64>], p: Prime, precision: u32) -> Result<Self> {
        let q: Vec<Vec<BigRational>> = entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| BigRational::from_integer(x.into()))
                    .collect()
            })
            .collect();
        Self::reduce(&q, p, precision)
    }

    pub fn identity(n: usize, p: Prime, precision: u32) -> Self {
        diag_signature(&Signature::zeros(n), n, n, p, precision).expect("square identity")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn prime(&self) -> Prime {
        self.ring.prime()
    }

    pub fn precision(&self) -> u32 {
        self.ring.precision()
    }

    pub fn ring(&self) -> &Arc<ResidueRing> {
        &self.ring
    }

    /// 0-based residue access.
    pub fn residue(&self, i: usize, j: usize) -> &BigUint {
        &self.residues[i * self.cols + j]
    }

    pub fn is_exact_zero(&self, i: usize, j: usize) -> bool {
        self.exact_zero[i * self.cols + j]
    }

    pub fn entry(&self, i: usize, j: usize) -> PadicScalar {
        PadicScalar {
            residue: self.residue(i, j).clone(),
            precision: self.precision(),
            exact_zero: self.is_exact_zero(i, j),
        }
    }

    pub fn residues(&self) -> &[BigUint] {
        &self.residues
    }

    pub fn exact_zero_flags(&self) -> &[bool] {
        &self.exact_zero
    }

    pub fn with_shift(mut self, shift: i64) -> Self {
        self.shift = shift;
        self
    }

    fn check_same_ring(&self, other: &PadicMatrix) -> Result<()> {
        if self.prime() != other.prime() || self.precision() != other.precision() {
            return Err(Error::DimensionMismatch(format!(
                "ring mismatch: p={} N={} vs p={} N={}",
                self.prime(),
                self.precision(),
                other.prime(),
                other.precision()
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &PadicMatrix) -> Result<PadicMatrix> {
        self.check_same_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, m, l) = (self.rows, self.cols, other.cols);
        let mut residues = Vec::with_capacity(n * l);
        let mut flags = Vec::with_capacity(n * l);
        for i in 0..n {
            for j in 0..l {
                let mut acc = BigUint::zero();
                let mut exact = true;
                for k in 0..m {
                    let (za, zb) = (self.is_exact_zero(i, k), other.is_exact_zero(k, j));
                    if za || zb {
                        continue;
                    }
                    exact = false;
                    acc += self.residue(i, k) * other.residue(k, j);
                }
                residues.push(self.ring.reduce(acc));
                flags.push(exact);
            }
        }
        Ok(PadicMatrix {
            ring: self.ring.clone(),
            rows: n,
            cols: l,
            shift: self.shift + other.shift,
            residues,
            exact_zero: flags,
        })
    }

    /// Sum of two matrices; the result keeps the smaller shift.
    pub fn add(&self, other: &PadicMatrix) -> Result<PadicMatrix> {
        self.check_same_ring(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(
                "addition of unequal shapes".into(),
            ));
        }
        let shift = self.shift.min(other.shift);
        let fa = self.ring.p_power((self.shift - shift) as u64);
        let fb = self.ring.p_power((other.shift - shift) as u64);
        let mut residues = Vec::with_capacity(self.residues.len());
        let mut flags = Vec::with_capacity(self.residues.len());
        for idx in 0..self.residues.len() {
            let (za, zb) = (self.exact_zero[idx], other.exact_zero[idx]);
            let a = self.ring.mul(&self.residues[idx], &fa);
            let b = self.ring.mul(&other.residues[idx], &fb);
            residues.push(self.ring.add(&a, &b));
            flags.push(za && zb);
        }
        Ok(PadicMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            shift,
            residues,
            exact_zero: flags,
        })
    }

    /// `diag(p^{e_1}, …, p^{e_rows}) · A`; the minimal exponent moves into the shift.
    pub fn scale_rows(&self, exponents: &[i64]) -> Result<PadicMatrix> {
        if exponents.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "{} row exponents for {} rows",
                exponents.len(),
                self.rows
            )));
        }
        let base = exponents.iter().copied().min().unwrap_or(0);
        let mut out = self.clone();
        out.shift += base;
        for (i, &e) in exponents.iter().enumerate() {
            let rel = (e - base) as u64;
            if rel == 0 {
                continue;
            }
            let f = self.ring.p_power(rel);
            for j in 0..self.cols {
                let idx = i * self.cols + j;
                out.residues[idx] = self.ring.mul(&self.residues[idx], &f);
            }
        }
        Ok(out)
    }

    /// `A^{(i)}`: the last `rows − i + 1` rows, all columns (1-based `i`).
    pub fn corner(&self, i: usize) -> Result<PadicMatrix> {
        if i == 0 || i > self.rows {
            return Err(Error::IndexOutOfRange {
                index: i,
                bound: self.rows,
            });
        }
        let keep: Vec<usize> = (i - 1..self.rows).collect();
        Ok(self.select_rows(&keep))
    }

    /// Removes row `r` (1-based).
    pub fn delete_row(&self, r: usize) -> Result<PadicMatrix> {
        if r == 0 || r > self.rows {
            return Err(Error::IndexOutOfRange {
                index: r,
                bound: self.rows,
            });
        }
        let keep: Vec<usize> = (0..self.rows).filter(|&i| i != r - 1).collect();
        Ok(self.select_rows(&keep))
    }

    /// Swaps rows `a` and `b` (1-based).
    pub fn swap_rows(&self, a: usize, b: usize) -> Result<PadicMatrix> {
        for &r in &[a, b] {
            if r == 0 || r > self.rows {
                return Err(Error::IndexOutOfRange {
                    index: r,
                    bound: self.rows,
                });
            }
        }
        let mut order: Vec<usize> = (0..self.rows).collect();
        order.swap(a - 1, b - 1);
        Ok(self.select_rows(&order))
    }

    /// Rows listed by 0-based index, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> PadicMatrix {
        let mut residues = Vec::with_capacity(rows.len() * self.cols);
        let mut flags = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            let range = i * self.cols..(i + 1) * self.cols;
            residues.extend_from_slice(&self.residues[range.clone()]);
            flags.extend_from_slice(&self.exact_zero[range]);
        }
        PadicMatrix {
            ring: self.ring.clone(),
            rows: rows.len(),
            cols: self.cols,
            shift: self.shift,
            residues,
            exact_zero: flags,
        }
    }

    /// Top-left `rows × cols` block.
    pub fn block(&self, rows: usize, cols: usize) -> Result<PadicMatrix> {
        if rows > self.rows || cols > self.cols {
            return Err(Error::DimensionMismatch(format!(
                "block {rows}x{cols} of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut residues = Vec::with_capacity(rows * cols);
        let mut flags = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                residues.push(self.residue(i, j).clone());
                flags.push(self.is_exact_zero(i, j));
            }
        }
        Ok(PadicMatrix {
            ring: self.ring.clone(),
            rows,
            cols,
            shift: self.shift,
            residues,
            exact_zero: flags,
        })
    }

    pub fn transpose(&self) -> PadicMatrix {
        let mut residues = Vec::with_capacity(self.residues.len());
        let mut flags = Vec::with_capacity(self.residues.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                residues.push(self.residue(i, j).clone());
                flags.push(self.is_exact_zero(i, j));
            }
        }
        PadicMatrix {
            ring: self.ring.clone(),
            rows: self.cols,
            cols: self.rows,
            shift: self.shift,
            residues,
            exact_zero: flags,
        }
    }

    /// Same matrix known to fewer digits.
    pub fn truncate_precision(&self, precision: u32) -> Result<PadicMatrix> {
        if precision > self.precision() {
            return Err(Error::DimensionMismatch(format!(
                "cannot raise precision from {} to {precision}",
                self.precision()
            )));
        }
        let ring = ResidueRing::new(self.prime(), precision);
        let residues = self
            .residues
            .iter()
            .map(|r| ring.reduce(r.clone()))
            .collect();
        PadicMatrix::from_parts(
            ring,
            self.rows,
            self.cols,
            self.shift,
            residues,
            self.exact_zero.clone(),
        )
    }

    /// Integral part lifted to `[0, p^N)` as integers, row-major.
    pub fn lifted(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| BigInt::from(self.residue(i, j).clone()))
                    .collect()
            })
            .collect()
    }

    /// Valuation of entry `(i, j)` of the represented matrix, shift included.
    pub fn entry_valuation(&self, i: usize, j: usize) -> Result<Valuation> {
        Ok(match self.entry(i, j).valuation(self.prime())? {
            None => Valuation::Infinity,
            Some(v) => Valuation::Finite(v as i64 + self.shift),
        })
    }

    pub fn to_literal(&self) -> MatrixLiteral {
        MatrixLiteral {
            p: self.prime().get(),
            precision: self.precision(),
            shift: self.shift,
            entries: (0..self.rows)
                .map(|i| {
                    (0..self.cols)
                        .map(|j| self.residue(i, j).to_string())
                        .collect()
                })
                .collect(),
        }
    }

    /// Parses a literal; entries are integers (possibly negative), and `"0"` is an exact zero.
    pub fn from_literal(lit: &MatrixLiteral) -> Result<PadicMatrix> {
        let p = Prime::new(lit.p)?;
        if lit.precision == 0 {
            return Err(Error::InvalidSpec("precision must be positive".into()));
        }
        let ring = ResidueRing::new(p, lit.precision);
        let rows = lit.entries.len();
        let cols = lit.entries.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 || lit.entries.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("empty or ragged literal".into()));
        }
        let mut residues = Vec::with_capacity(rows * cols);
        let mut flags = Vec::with_capacity(rows * cols);
        for s in lit.entries.iter().flatten() {
            let x: BigInt = s
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("entry {s:?}: {e}")))?;
            flags.push(x.is_zero());
            residues.push(ring.from_int(&x));
        }
        PadicMatrix::from_parts(ring, rows, cols, lit.shift, residues, flags)
    }
}

impl fmt::Display for PadicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift != 0 {
            write!(f, "{}^{} * ", self.prime(), self.shift)?;
        }
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.residue(i, j))?;
            }
        }
        write!(f, "] mod {}^{}", self.prime(), self.precision())
    }
}

/// `diag_{rows×cols}(p^{λ_1}, …, p^{λ_rows})` with off-diagonal exact zeros.
pub fn diag_signature(
    lambda: &Signature,
    rows: usize,
    cols: usize,
    p: Prime,
    precision: u32,
) -> Result<PadicMatrix> {
    if lambda.len() != rows || rows > cols {
        return Err(Error::DimensionMismatch(format!(
            "signature of length {} for a {rows}x{cols} diagonal",
            lambda.len()
        )));
    }
    let ring = ResidueRing::new(p, precision);
    let shift = lambda.last().unwrap_or(0);
    let mut residues = vec![BigUint::zero(); rows * cols];
    let mut flags = vec![true; rows * cols];
    for (i, &l) in lambda.parts().iter().enumerate() {
        residues[i * cols + i] = ring.p_power((l - shift) as u64);
        flags[i * cols + i] = false;
    }
    PadicMatrix::from_parts(ring, rows, cols, shift, residues, flags)
}

impl PadicMatrix {
    /// Exact rational matrix `p^shift · lift(R)`.
    pub fn to_rationals(&self) -> Vec<Vec<BigRational>> {
        let p = BigInt::from(self.prime().get());
        let factor = if self.shift >= 0 {
            BigRational::from_integer(p.pow(self.shift as u32))
        } else {
            BigRational::new(BigInt::one(), p.pow((-self.shift) as u32))
        };
        self.lifted()
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| BigRational::from_integer(x) * &factor)
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn res(m: &PadicMatrix) -> Vec<Vec<u64>> {
        (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| m.residue(i, j).try_into().unwrap())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn reduce_identity() {
        let m = PadicMatrix::from_integers(&[vec![1, 0], vec![0, 1]], p(3), 5).unwrap();
        assert_eq!(m.shift(), 0);
        assert_eq!(res(&m), vec![vec![1, 0], vec![0, 1]]);
        assert!(m.is_exact_zero(0, 1));
    }

    #[test]
    fn reduce_half() {
        let m = PadicMatrix::reduce(&[vec![q(1, 2)]], p(2), 4).unwrap();
        assert_eq!(m.shift(), -1);
        assert_eq!(res(&m), vec![vec![1]]);
    }

    #[test]
    fn reduce_factors_common_power() {
        let m = PadicMatrix::from_integers(&[vec![25, 125]], p(5), 6).unwrap();
        assert_eq!(m.shift(), 2);
        assert_eq!(res(&m), vec![vec![1, 5]]);
    }

    #[test]
    fn reduce_unit_fraction() {
        // 3/4 at p = 5: residue * 4 == 3 mod 5^3
        let m = PadicMatrix::reduce(&[vec![q(3, 4)]], p(5), 3).unwrap();
        let r: u64 = m.residue(0, 0).try_into().unwrap();
        assert_eq!((r * 4) % 125, 3);
    }

    #[test]
    fn matmul_examples() {
        let pp = p(3);
        let a = PadicMatrix::from_integers(&[vec![2, 1], vec![4, 7]], pp, 6).unwrap();
        let id = PadicMatrix::identity(2, pp, 6);
        assert_eq!(id.matmul(&a).unwrap(), a);

        let d1 = diag_signature(&Signature::new(vec![1, 0]).unwrap(), 2, 2, pp, 6).unwrap();
        let d2 = PadicMatrix::from_integers(&[vec![1, 0], vec![0, 9]], pp, 6).unwrap();
        let prod = d1.matmul(&d2).unwrap();
        assert_eq!(
            prod.to_rationals(),
            vec![vec![q(3, 1), q(0, 1)], vec![q(0, 1), q(9, 1)]]
        );

        let x = PadicMatrix::from_integers(&[vec![0, 3], vec![1, 0]], pp, 6).unwrap();
        let y = PadicMatrix::from_integers(&[vec![1, 0], vec![0, 3]], pp, 6).unwrap();
        let xy = x.matmul(&y).unwrap();
        assert_eq!(
            xy.to_rationals(),
            vec![vec![q(0, 1), q(9, 1)], vec![q(1, 1), q(0, 1)]]
        );
        assert!(xy.is_exact_zero(0, 0));
        assert!(x.matmul(&PadicMatrix::identity(3, pp, 6)).is_err());
    }

    #[test]
    fn corner_and_delete() {
        let pp = p(2);
        let a = PadicMatrix::from_integers(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]], pp, 8)
            .unwrap();
        assert_eq!(a.corner(1).unwrap(), a);
        assert_eq!(res(&a.corner(3).unwrap()), vec![vec![7, 8, 9]]);
        assert_eq!(
            res(&a.delete_row(2).unwrap()),
            vec![vec![1, 2, 3], vec![7, 8, 9]]
        );
        assert_eq!(
            res(&a.corner(2).unwrap().delete_row(1).unwrap()),
            vec![vec![7, 8, 9]]
        );
        assert!(matches!(a.corner(4), Err(Error::IndexOutOfRange { .. })));
        assert!(a.delete_row(0).is_err());
        // A^(i) with its second row removed has the shape of the (i+1)-corner after a swap
        let swapped = a.swap_rows(2, 3).unwrap();
        let lhs = a.corner(2).unwrap().delete_row(2).unwrap();
        let rhs = swapped.corner(3).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn diag_rectangular_and_negative() {
        let pp = p(5);
        let d = diag_signature(&Signature::new(vec![1, 0]).unwrap(), 2, 3, pp, 4).unwrap();
        assert_eq!(res(&d), vec![vec![5, 0, 0], vec![0, 1, 0]]);
        let e = diag_signature(&Signature::new(vec![0, -2]).unwrap(), 2, 2, pp, 4).unwrap();
        assert_eq!(e.shift(), -2);
        assert_eq!(res(&e), vec![vec![25, 0], vec![0, 1]]);
        let id = diag_signature(&Signature::zeros(2), 2, 2, pp, 4).unwrap();
        assert_eq!(id, PadicMatrix::identity(2, pp, 4));
    }

    #[test]
    fn add_aligns_shifts() {
        let pp = p(3);
        let a = PadicMatrix::from_integers(&[vec![3, 0]], pp, 5).unwrap();
        let b = PadicMatrix::reduce(&[vec![q(1, 3), q(1, 1)]], pp, 5).unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.to_rationals(), vec![vec![q(10, 3), q(1, 1)]]);
    }

    #[test]
    fn scale_rows_moves_minimum_into_shift() {
        let pp = p(2);
        let a = PadicMatrix::from_integers(&[vec![1, 1], vec![1, 3]], pp, 10).unwrap();
        let s = a.scale_rows(&[5, 2]).unwrap();
        assert_eq!(s.shift(), 2);
        assert_eq!(res(&s), vec![vec![8, 8], vec![1, 3]]);
    }

    #[test]
    fn literal_round_trip() {
        let json = r#"{"p":2,"precision":64,"shift":0,"entries":[["1","0"],["0","1"]]}"#;
        let lit: MatrixLiteral = serde_json::from_str(json).unwrap();
        let m = PadicMatrix::from_literal(&lit).unwrap();
        assert_eq!(m, PadicMatrix::identity(2, p(2), 64));
        assert_eq!(m.to_literal(), lit);
        let neg = MatrixLiteral {
            p: 3,
            precision: 2,
            shift: 1,
            entries: vec![vec!["-1".into()]],
        };
        let n = PadicMatrix::from_literal(&neg).unwrap();
        assert_eq!(n.residue(0, 0), &BigUint::from(8u32));
        assert!(PadicMatrix::from_literal(&MatrixLiteral { p: 4, ..neg }).is_err());
    }
}
