use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::Prime;
use crate::signature::Signature;

/// An exact rational probability, written as `"a/b"` in JSON.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactProb(pub BigRational);

impl FromStr for ExactProb {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
        };
        let q = match s.split_once('/') {
            Some((a, b)) => {
                let d = parse(b)?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                BigRational::new(parse(a)?, d)
            }
            None => BigRational::from_integer(parse(s)?),
        };
        Ok(ExactProb(q))
    }
}

impl fmt::Display for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for ExactProb {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ProbRepr {
    Int(i64),
    Str(String),
}

impl<'de> Deserialize<'de> for ExactProb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match ProbRepr::deserialize(d)? {
            ProbRepr::Int(i) => Ok(ExactProb(BigRational::from_integer(i.into()))),
            ProbRepr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Size of the ambient Haar matrix for corner ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmbientDim {
    Finite(usize),
    Infinity,
}

impl fmt::Display for AmbientDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmbientDim::Finite(n) => write!(f, "{n}"),
            AmbientDim::Infinity => write!(f, "infinity"),
        }
    }
}

impl FromStr for AmbientDim {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(AmbientDim::Infinity),
            t => t
                .parse()
                .map(AmbientDim::Finite)
                .map_err(|e| Error::Parse(format!("bad ambient dimension {s:?}: {e}"))),
        }
    }
}

impl Serialize for AmbientDim {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AmbientDim::Finite(n) => s.serialize_u64(*n as u64),
            AmbientDim::Infinity => s.serialize_str("infinity"),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DimRepr {
    Int(usize),
    Str(String),
}

impl<'de> Deserialize<'de> for AmbientDim {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match DimRepr::deserialize(d)? {
            DimRepr::Int(n) => Ok(AmbientDim::Finite(n)),
            DimRepr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// The law of a single step matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnsembleKind {
    /// `U·diag(p^λ)·V` with Haar `U, V`.
    FixedSN(Signature),
    /// Draw `λ` from a finite law, then as `FixedSN(λ)`.
    SNMixture(Vec<(Signature, ExactProb)>),
    /// Top `n×n` block of a Haar element of `GL_N(ℤₚ)`; `N = ∞` gives i.i.d. entries.
    CornerOfHaar(AmbientDim),
    /// i.i.d. uniform entries in `ℤₚ`.
    HaarEntries,
    /// Haar on `GSp_{2h}(ℤₚ)`; the dimension `n` must equal `2h`.
    GSpHaar(usize),
    /// `U·diag(p^λ)·V` with `U, V` Haar on `GSp_n(ℤₚ)` and `λ` balanced.
    GSpFixedSN(Signature),
    /// The deterministic sequence `A_k = diag(1, p^{2^{k−1}})` (`n = 2`).
    Counterexample,
}

fn default_precision_base() -> u32 {
    32
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub p: Prime,
    pub n: usize,
    #[serde(default = "default_precision_base")]
    pub precision_base: u32,
    pub kind: EnsembleKind,
}

/// Largest exponent for the counterexample sequence that still fits comfortably in memory.
pub const COUNTEREXAMPLE_MAX_STEP: u64 = 26;

impl EnsembleSpec {
    pub fn new(p: Prime, n: usize, kind: EnsembleKind) -> Result<Self> {
        let spec = EnsembleSpec {
            p,
            n,
            precision_base: default_precision_base(),
            kind,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fixed(p: Prime, lambda: Signature) -> Result<Self> {
        Self::new(p, lambda.len(), EnsembleKind::FixedSN(lambda))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: EnsembleSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.n == 0 {
            return bad("dimension must be positive".into());
        }
        if self.precision_base == 0 {
            return bad("precision_base must be positive".into());
        }
        match &self.kind {
            EnsembleKind::FixedSN(l) => {
                if l.len() != self.n {
                    return bad(format!(
                        "signature {l} has length {} != n = {}",
                        l.len(),
                        self.n
                    ));
                }
            }
            EnsembleKind::SNMixture(items) => {
                if items.is_empty() {
                    return bad("empty mixture".into());
                }
                let mut total = BigRational::zero();
                for (l, w) in items {
                    if l.len() != self.n {
                        return bad(format!(
                            "mixture signature {l} has length != n = {}",
                            self.n
                        ));
                    }
                    if !w.0.is_positive() {
                        return bad(format!("mixture weight {w} is not positive"));
                    }
                    total += &w.0;
                }
                if !total.is_one() {
                    return bad(format!("mixture weights sum to {total}, not 1"));
                }
                mixture_denominator(items)?;
            }
            EnsembleKind::CornerOfHaar(AmbientDim::Finite(big)) => {
                if *big < self.n {
                    return bad(format!("ambient dimension {big} < n = {}", self.n));
                }
            }
            EnsembleKind::CornerOfHaar(AmbientDim::Infinity) | EnsembleKind::HaarEntries => {}
            EnsembleKind::GSpHaar(h) => {
                if 2 * h != self.n {
                    return bad(format!("GSpHaar({h}) needs n = {}, got {}", 2 * h, self.n));
                }
            }
            EnsembleKind::GSpFixedSN(l) => {
                if l.len() != self.n || self.n % 2 != 0 {
                    return bad(format!(
                        "GSp signature {l} must have even length n = {}",
                        self.n
                    ));
                }
                if !l.is_balanced() {
                    return bad(format!("GSp signature {l} is not balanced"));
                }
            }
            EnsembleKind::Counterexample => {
                if self.n != 2 {
                    return bad("the counterexample sequence is 2x2".into());
                }
            }
        }
        Ok(())
    }

    /// Largest spread `μ₁ − μ_n` of the step law's singular numbers when it is bounded.
    pub fn max_spread(&self) -> Option<i64> {
        match &self.kind {
            EnsembleKind::FixedSN(l) | EnsembleKind::GSpFixedSN(l) => Some(l.spread()),
            EnsembleKind::SNMixture(items) => items.iter().map(|(l, _)| l.spread()).max(),
            EnsembleKind::GSpHaar(_) => Some(0),
            _ => None,
        }
    }

    /// Every support signature with its probability, for finite-support laws.
    pub fn finite_law(&self) -> Option<Vec<(Signature, BigRational)>> {
        match &self.kind {
            EnsembleKind::FixedSN(l) | EnsembleKind::GSpFixedSN(l) => {
                Some(vec![(l.clone(), BigRational::one())])
            }
            EnsembleKind::SNMixture(items) => Some(
                items
                    .iter()
                    .map(|(l, w)| (l.clone(), w.0.clone()))
                    .collect(),
            ),
            EnsembleKind::GSpHaar(_) => Some(vec![(Signature::zeros(self.n), BigRational::one())]),
            _ => None,
        }
    }

    /// Whether the step law has Haar-invariant corners of the general linear group.
    pub fn is_gl_bi_invariant(&self) -> bool {
        matches!(
            self.kind,
            EnsembleKind::FixedSN(_) | EnsembleKind::SNMixture(_)
        )
    }

    pub fn is_symplectic(&self) -> bool {
        matches!(
            self.kind,
            EnsembleKind::GSpHaar(_) | EnsembleKind::GSpFixedSN(_)
        )
    }
}

/// Common denominator of the mixture weights; draws use one uniform integer below it.
pub(crate) fn mixture_denominator(items: &[(Signature, ExactProb)]) -> Result<u64> {
    let mut d = BigInt::one();
    for (_, w) in items {
        d = num_integer::Integer::lcm(&d, w.0.denom());
    }
    d.to_u64()
        .ok_or_else(|| Error::InvalidSpec(format!("mixture denominator {d} exceeds 64 bits")))
}
