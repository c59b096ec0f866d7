use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::chains::{psi_unchecked, signatures_below};
use super::eval::{geometric_points, hl_skew_eval, principal_specialization};
use super::poly::{rational_pow, ExactScalar};
use crate::error::{Error, Result};
use crate::signature::Signature;

/// Finite law on signatures with exact probabilities summing to one.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SignatureDistribution {
    probs: BTreeMap<Signature, ExactScalar>,
}

/// One row of the JSON table form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionEntry {
    pub signature: Vec<i64>,
    pub prob: String,
}

impl SignatureDistribution {
    /// Drops zero entries; rejects negative masses and totals other than one.
    pub fn new(probs: BTreeMap<Signature, ExactScalar>) -> Result<Self> {
        let mut total = ExactScalar::zero();
        let mut kept = BTreeMap::new();
        for (s, p) in probs {
            if p.is_negative() {
                return Err(Error::ConstraintViolated(format!(
                    "negative mass {p} at {s}"
                )));
            }
            if !p.is_zero() {
                total += &p;
                kept.insert(s, p);
            }
        }
        if !total.is_one() {
            return Err(Error::ConstraintViolated(format!("total mass {total}")));
        }
        Ok(SignatureDistribution { probs: kept })
    }

    pub fn point_mass(s: Signature) -> Self {
        SignatureDistribution {
            probs: BTreeMap::from([(s, ExactScalar::one())]),
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Signature, ExactScalar)>) -> Result<Self> {
        let mut map: BTreeMap<Signature, ExactScalar> = BTreeMap::new();
        for (s, p) in pairs {
            *map.entry(s).or_insert_with(ExactScalar::zero) += p;
        }
        SignatureDistribution::new(map)
    }

    pub fn prob(&self, s: &Signature) -> ExactScalar {
        self.probs.get(s).cloned().unwrap_or_else(ExactScalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Signature, &ExactScalar)> {
        self.probs.iter()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &Signature> {
        self.probs.keys()
    }

    pub fn expectation(&self, f: impl Fn(&Signature) -> ExactScalar) -> ExactScalar {
        self.probs
            .iter()
            .fold(ExactScalar::zero(), |acc, (s, p)| acc + p * f(s))
    }

    pub fn mean_weight(&self) -> ExactScalar {
        self.expectation(|s| ExactScalar::from_integer(s.weight().into()))
    }

    pub fn shifted(&self, c: i64) -> Self {
        SignatureDistribution {
            probs: self
                .probs
                .iter()
                .map(|(s, p)| (s.shifted(c), p.clone()))
                .collect(),
        }
    }

    pub fn to_entries(&self) -> Vec<DistributionEntry> {
        self.probs
            .iter()
            .map(|(s, p)| DistributionEntry {
                signature: s.parts().to_vec(),
                prob: p.to_string(),
            })
            .collect()
    }

    pub fn from_entries(entries: &[DistributionEntry]) -> Result<Self> {
        let pairs = entries
            .iter()
            .map(|e| {
                let s = Signature::new(e.signature.clone())?;
                let p: ExactScalar = e
                    .prob
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad probability {:?}", e.prob)))?;
                Ok((s, p))
            })
            .collect::<Result<Vec<_>>>()?;
        SignatureDistribution::from_pairs(pairs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_entries()).expect("entries serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let entries: Vec<DistributionEntry> = serde_json::from_str(s)?;
        SignatureDistribution::from_entries(&entries)
    }
}

impl Serialize for SignatureDistribution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_entries().serialize(s)
    }
}

pub(crate) fn check_t(t: &ExactScalar) -> Result<()> {
    if t.is_positive() && *t < ExactScalar::one() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("t = {t} must lie in (0, 1)")))
    }
}

/// `P_μ(1, t, …, t^{n−1}; t)`.
pub(crate) fn principal_value(mu: &Signature, t: &ExactScalar) -> ExactScalar {
    principal_specialization(mu, &ExactScalar::one(), t)
}

/// Law of the singular numbers of the corner one row shorter than a bi-invariant matrix with
/// singular numbers `μ_top`.
pub fn corner_distribution(mu_top: &Signature, t: &ExactScalar) -> Result<SignatureDistribution> {
    check_t(t)?;
    let len = mu_top.len();
    if len < 2 {
        return Err(Error::DimensionMismatch(format!(
            "corner of a signature of length {len}"
        )));
    }
    let denom = principal_value(mu_top, t);
    let pairs = signatures_below(mu_top, len - 1).into_iter().map(|kappa| {
        let link = psi_unchecked(mu_top, &kappa, t);
        let rest = principal_specialization(&kappa, t, t);
        let p = link * rest / &denom;
        (kappa, p)
    });
    SignatureDistribution::from_pairs(pairs)
}

/// One full chain of corners `(μ^{(1)}, …, μ^{(n)})` with its probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerChain {
    pub corners: Vec<Signature>,
    pub prob: ExactScalar,
}

/// Joint law of `(SN(A^{(1)}), …, SN(A^{(n)}))` given `SN(A) = μ1`.
pub fn joint_corner_distribution(mu1: &Signature, t: &ExactScalar) -> Result<Vec<CornerChain>> {
    check_t(t)?;
    let n = mu1.len();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty signature".into()));
    }
    let denom = principal_value(mu1, t);
    let mut partial = vec![(vec![mu1.clone()], ExactScalar::one() / denom)];
    for i in 1..n {
        let x = rational_pow(t, i as i64 - 1);
        let mut next = Vec::new();
        for (chain, p) in partial {
            let top = chain.last().expect("non-empty chain");
            for kappa in signatures_below(top, top.len() - 1) {
                let factor =
                    psi_unchecked(top, &kappa, t) * rational_pow(&x, top.weight() - kappa.weight());
                let mut c = chain.clone();
                c.push(kappa);
                next.push((c, &p * factor));
            }
        }
        partial = next;
    }
    let last = rational_pow(t, n as i64 - 1);
    Ok(partial
        .into_iter()
        .map(|(corners, p)| {
            let tail = rational_pow(&last, corners.last().expect("non-empty").weight());
            CornerChain {
                corners,
                prob: p * tail,
            }
        })
        .filter(|c| !c.prob.is_zero())
        .collect())
}

/// Law of `SN(A^{(k)})` given `SN(A) = μ1`, for `1 ≤ k ≤ n`.
pub fn kth_corner_distribution(
    mu1: &Signature,
    k: usize,
    t: &ExactScalar,
) -> Result<SignatureDistribution> {
    check_t(t)?;
    let n = mu1.len();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, bound: n });
    }
    if k == 1 {
        return Ok(SignatureDistribution::point_mass(mu1.clone()));
    }
    let denom = principal_value(mu1, t);
    let top_points = geometric_points(t, 0, k - 1);
    let lower_start = rational_pow(t, k as i64 - 1);
    let pairs = signatures_below(mu1, n - k + 1)
        .into_iter()
        .map(|kappa| {
            let skew = hl_skew_eval(mu1, &kappa, &top_points, t)?;
            let rest = principal_specialization(&kappa, &lower_start, t);
            let p = skew * rest / &denom;
            Ok((kappa, p))
        })
        .collect::<Result<Vec<_>>>()?;
    SignatureDistribution::from_pairs(pairs)
}
