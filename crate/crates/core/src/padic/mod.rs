//! Finite-precision arithmetic over `ℤₚ`/`ℚₚ` and singular numbers.
//!
//! A [`PadicMatrix`] stores residues modulo `p^N` together with one global power-of-`p`
//! shift, so the represented matrix is `p^shift · (integral part)`. Entries whose residue
//! is zero are either flagged as exact zeros or are "zero to precision `N`"; algorithms
//! never guess past the known digits and report [`Error::PrecisionExhausted`] instead.

mod matrix;
mod minors;
mod smith;

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use matrix::{diag_signature, MatrixLiteral, PadicMatrix};
pub use minors::singular_numbers_via_minors;
pub use smith::smith_singular_numbers;

/// A rational prime, verified by trial division.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p % d == 0 {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `t = 1/p`, the Hall-Littlewood parameter attached to this prime.
    pub fn t(self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.0))
    }
}

impl<'de> Deserialize<'de> for Prime {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = u64::deserialize(d)?;
        Prime::new(p).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `val_p` of a rational number; `Infinity` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(k) => Some(k),
            Valuation::Infinity => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(k) => write!(f, "{k}"),
            Valuation::Infinity => write!(f, "∞"),
        }
    }
}

fn int_valuation(x: &BigInt, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let mut x = x.abs();
    let mut k = 0;
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        x = q;
        k += 1;
    }
}

/// Writes a nonzero rational as `p^k · a/b` with `a, b` prime to `p` and returns `k`.
pub fn valuation(x: &BigRational, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    let num = int_valuation(x.numer(), p.0) as i64;
    let den = int_valuation(x.denom(), p.0) as i64;
    Valuation::Finite(num - den)
}

/// Valuation of a nonnegative integer; `None` for zero.
pub(crate) fn biguint_valuation(x: &BigUint, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    if p == 2 {
        return x.trailing_zeros().map(|z| z as u32);
    }
    if (x % p).is_zero() {
        let pb = BigUint::from(p);
        let mut y = x / &pb;
        let mut k = 1;
        while (&y % p).is_zero() {
            y /= &pb;
            k += 1;
        }
        Some(k)
    } else {
        Some(0)
    }
}

/// `ℤ/p^Nℤ`, shared by every entry of a matrix.
#[derive(Debug, PartialEq, Eq)]
pub struct ResidueRing {
    p: Prime,
    precision: u32,
    modulus: BigUint,
    mask: BigUint,
}

impl ResidueRing {
    pub fn new(p: Prime, precision: u32) -> Arc<Self> {
        assert!(precision >= 1, "precision must be positive");
        let modulus = BigUint::from(p.0).pow(precision);
        let mask = &modulus - 1u32;
        Arc::new(ResidueRing {
            p,
            precision,
            modulus,
            mask,
        })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn reduce(&self, x: BigUint) -> BigUint {
        if x < self.modulus {
            x
        } else if self.p.0 == 2 {
            x & &self.mask
        } else {
            x % &self.modulus
        }
    }

    pub fn from_int(&self, x: &BigInt) -> BigUint {
        let m = BigInt::from(self.modulus.clone());
        let r = x.mod_floor(&m);
        r.to_biguint().expect("mod_floor is nonnegative")
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        self.reduce(a * b)
    }

    pub fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.modulus {
            s - &self.modulus
        } else {
            s
        }
    }

    pub fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.modulus - (b - a)
        }
    }

    pub fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            BigUint::zero()
        } else {
            &self.modulus - a
        }
    }

    /// `p^e mod p^N`, zero once `e ≥ N`.
    pub fn p_power(&self, e: u64) -> BigUint {
        if e >= self.precision as u64 {
            BigUint::zero()
        } else {
            BigUint::from(self.p.0).pow(e as u32)
        }
    }

    pub fn valuation(&self, a: &BigUint) -> Option<u32> {
        biguint_valuation(a, self.p.0)
    }

    /// Inverse of a unit; `None` when `a` is divisible by `p`.
    pub fn inverse(&self, a: &BigUint) -> Option<BigUint> {
        if (a % self.p.0).is_zero() {
            return None;
        }
        if self.precision == 1 && self.p.0 == 2 {
            return Some(BigUint::one());
        }
        let pv = BigUint::from(self.p.0);
        let mut x = (a % &pv).modinv(&pv)?;
        // Newton lifting doubles the number of correct digits per step
        let mut digits = 1u32;
        let two = BigUint::from(2u32);
        while digits < self.precision {
            digits = (2 * digits).min(self.precision);
            let m = if digits == self.precision {
                self.modulus.clone()
            } else {
                pv.pow(digits)
            };
            let ax = (a * &x) % &m;
            let corr = if ax <= two { &two - ax } else { &m + &two - ax };
            x = (x * corr) % &m;
        }
        Some(x)
    }
}

/// One element of `ℤ/p^Nℤ`; `exact_zero` distinguishes a true zero from an unknown
/// element of `p^N ℤₚ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicScalar {
    pub residue: BigUint,
    pub precision: u32,
    pub exact_zero: bool,
}

impl PadicScalar {
    pub fn exact_zero(precision: u32) -> Self {
        PadicScalar {
            residue: BigUint::zero(),
            precision,
            exact_zero: true,
        }
    }

    /// Valuation of the residue. `Ok(None)` means an exact zero; a nonzero scalar whose
    /// residue vanished is reported as precision exhaustion.
    pub fn valuation(&self, p: Prime) -> Result<Option<u32>> {
        if self.exact_zero {
            return Ok(None);
        }
        match biguint_valuation(&self.residue, p.0) {
            Some(v) => Ok(Some(v)),
            None => Err(Error::PrecisionExhausted {
                precision: self.precision,
            }),
        }
    }
}
