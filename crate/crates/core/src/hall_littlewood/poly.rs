use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// Exact rational scalar.
pub type ExactScalar = BigRational;

pub fn rational(num: i64, den: i64) -> ExactScalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer power with negative exponents allowed for nonzero bases.
pub fn rational_pow(x: &ExactScalar, e: i64) -> ExactScalar {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), e.unsigned_abs() as usize)
    }
}

/// Laurent polynomial in one variable with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: BTreeMap<i64, ExactScalar>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly::default()
    }

    pub fn one() -> Self {
        UniPoly::constant(ExactScalar::one())
    }

    pub fn constant(c: ExactScalar) -> Self {
        UniPoly::monomial(c, 0)
    }

    pub fn monomial(c: ExactScalar, exp: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        UniPoly { coeffs }
    }

    /// The variable `x`.
    pub fn x() -> Self {
        UniPoly::monomial(ExactScalar::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, exp: i64) -> ExactScalar {
        self.coeffs
            .get(&exp)
            .cloned()
            .unwrap_or_else(ExactScalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &ExactScalar)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    fn add_term(&mut self, exp: i64, c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(exp).or_insert_with(ExactScalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn add_assign_ref(&mut self, other: &UniPoly) {
        for (&e, c) in &other.coeffs {
            self.add_term(e, c.clone());
        }
    }

    pub fn scale(&self, c: &ExactScalar) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|(&e, a)| (e, a * c)).collect(),
        }
    }

    /// Multiplies by `c · x^exp`.
    pub fn mul_monomial(&self, c: &ExactScalar, exp: i64) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|(&e, a)| (e + exp, a * c)).collect(),
        }
    }

    /// Exact evaluation; `x = 0` is rejected when a negative power is present.
    pub fn eval(&self, x: &ExactScalar) -> Option<ExactScalar> {
        if x.is_zero() && self.min_degree().is_some_and(|d| d < 0) {
            return None;
        }
        Some(
            self.coeffs
                .iter()
                .map(|(&e, c)| c * rational_pow(x, e))
                .fold(ExactScalar::zero(), |acc, v| acc + v),
        )
    }

    pub fn derivative(&self) -> UniPoly {
        let mut out = UniPoly::zero();
        for (&e, c) in &self.coeffs {
            out.add_term(e - 1, c * BigInt::from(e));
        }
        out
    }

    /// Sum of the coefficients.
    pub fn at_one(&self) -> ExactScalar {
        self.coeffs
            .values()
            .fold(ExactScalar::zero(), |acc, c| acc + c)
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        self + &(-rhs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        let mut out = UniPoly::zero();
        for (&ea, a) in &self.coeffs {
            for (&eb, b) in &rhs.coeffs {
                out.add_term(ea + eb, a * b);
            }
        }
        out
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&e, c)) in self.coeffs.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            match e {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}*x")?,
                _ => write!(f, "{a}*x^{e}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for UniPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, String> = self
            .coeffs
            .iter()
            .map(|(e, c)| (e.to_string(), c.to_string()))
            .collect();
        map.serialize(s)
    }
}
