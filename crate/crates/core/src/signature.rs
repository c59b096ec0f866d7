//! Integer signatures and plain integer vectors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A non-increasing tuple of integers `λ₁ ≥ λ₂ ≥ … ≥ λₙ`. Parts may be negative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Signature(Vec<i64>);

impl Signature {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSignature(parts));
        }
        Ok(Signature(parts))
    }

    /// Sorts arbitrary parts into a signature.
    pub fn from_unsorted(mut parts: Vec<i64>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Signature(parts)
    }

    pub fn empty() -> Self {
        Signature(Vec::new())
    }

    /// `c[k]`, the constant signature of length `k`.
    pub fn constant(c: i64, k: usize) -> Self {
        Signature(vec![c; k])
    }

    pub fn zeros(k: usize) -> Self {
        Self::constant(0, k)
    }

    pub fn parts(&self) -> &[i64] {
        &self.0
    }

    pub fn into_parts(self) -> Vec<i64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based part access, matching the usual `λ_i` indexing.
    pub fn part(&self, i: usize) -> i64 {
        self.0[i - 1]
    }

    pub fn first(&self) -> Option<i64> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<i64> {
        self.0.last().copied()
    }

    /// `|λ| = Σ λᵢ`.
    pub fn weight(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `n(λ) = Σ (i−1) λᵢ`.
    pub fn n_statistic(&self) -> i64 {
        self.0.iter().enumerate().map(|(i, &l)| i as i64 * l).sum()
    }

    /// Multiplicities `m_k(λ)` for every value present.
    pub fn multiplicities(&self) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for &l in &self.0 {
            *m.entry(l).or_insert(0) += 1;
        }
        m
    }

    /// `λ₁ − λₙ`; zero for the empty signature.
    pub fn spread(&self) -> i64 {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => a - b,
            _ => 0,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.spread() == 0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&l| l >= 0)
    }

    pub fn shifted(&self, c: i64) -> Signature {
        Signature(self.0.iter().map(|l| l + c).collect())
    }

    /// `self ≺_P lambda`: `λᵢ ≥ μᵢ ≥ λᵢ₊₁` with `len(μ) = len(λ) − 1`.
    pub fn interlaces(&self, lambda: &Signature) -> bool {
        self.len() + 1 == lambda.len()
            && self
                .0
                .iter()
                .enumerate()
                .all(|(i, &m)| lambda.0[i] >= m && m >= lambda.0[i + 1])
    }

    /// Balanced-pair condition `λᵢ + λ_{2n+1−i}` constant, used for GSp₂ₙ.
    pub fn is_balanced(&self) -> bool {
        let n = self.len();
        if n % 2 != 0 {
            return false;
        }
        let target = match n {
            0 => return true,
            _ => self.0[0] + self.0[n - 1],
        };
        (0..n / 2).all(|i| self.0[i] + self.0[n - 1 - i] == target)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Signature {
    type Err = Error;

    /// Parses `"1,0,0"`, `"(1,0,0)"` or `"[1, 0, 0]"`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s
            .trim()
            .trim_matches(|c| matches!(c, '(' | ')' | '[' | ']'));
        if trimmed.trim().is_empty() {
            return Ok(Signature::empty());
        }
        let parts = trimmed
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("bad part {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Signature::new(parts)
    }
}

impl TryFrom<Vec<i64>> for Signature {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Signature::new(v)
    }
}

impl Serialize for Signature {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Accepts integer or decimal-string parts.
#[derive(Deserialize)]
#[serde(untagged)]
enum PartRepr {
    Int(i64),
    Str(String),
}

pub(crate) fn deserialize_parts<'de, D: Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<i64>, D::Error> {
    let raw = Vec::<PartRepr>::deserialize(d)?;
    raw.into_iter()
        .map(|p| match p {
            PartRepr::Int(i) => Ok(i),
            PartRepr::Str(s) => s.trim().parse::<i64>().map_err(serde::de::Error::custom),
        })
        .collect()
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = deserialize_parts(d)?;
        Signature::new(parts).map_err(serde::de::Error::custom)
    }
}

/// A fixed-length integer tuple with no ordering constraint (e.g. the corner-sum process `v(k)`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct IntVector(pub Vec<i64>);

impl IntVector {
    pub fn zeros(n: usize) -> Self {
        IntVector(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for IntVector {
    fn from(v: Vec<i64>) -> Self {
        IntVector(v)
    }
}

impl From<&Signature> for IntVector {
    fn from(s: &Signature) -> Self {
        IntVector(s.parts().to_vec())
    }
}
