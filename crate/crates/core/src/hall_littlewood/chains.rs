use num_traits::One;
use serde::Serialize;

use super::poly::{rational_pow, ExactScalar};
use crate::error::{Error, Result};
use crate::signature::Signature;

/// `ψ_{λ/μ}(t) = ∏ (1 − t^{m_i(μ)})` over the values `i` with `m_i(μ) = m_i(λ) + 1`.
pub fn psi(lambda: &Signature, mu: &Signature, t: &ExactScalar) -> Result<ExactScalar> {
    if !mu.interlaces(lambda) {
        return Err(Error::NotInterlacing {
            lambda: lambda.parts().to_vec(),
            mu: mu.parts().to_vec(),
        });
    }
    Ok(psi_unchecked(lambda, mu, t))
}

pub(crate) fn psi_unchecked(lambda: &Signature, mu: &Signature, t: &ExactScalar) -> ExactScalar {
    let ml = lambda.multiplicities();
    let mut out = ExactScalar::one();
    for (value, m) in mu.multiplicities() {
        if ml.get(&value).copied().unwrap_or(0) + 1 == m {
            out *= ExactScalar::one() - rational_pow(t, m as i64);
        }
    }
    out
}

/// `μ = λ^{(1)} ≺_P λ^{(2)} ≺_P … = λ`, stored bottom-up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterlacingChain {
    pub levels: Vec<Signature>,
}

impl InterlacingChain {
    pub fn bottom(&self) -> &Signature {
        &self.levels[0]
    }

    pub fn top(&self) -> &Signature {
        self.levels.last().expect("chains have at least one level")
    }

    /// Number of links.
    pub fn steps(&self) -> usize {
        self.levels.len() - 1
    }

    /// `(|λ^{(1)}|, |λ^{(2)}| − |λ^{(1)}|, …)`.
    pub fn weight(&self) -> Vec<i64> {
        let mut out = vec![self.levels[0].weight()];
        out.extend(self.link_weights());
        out
    }

    /// Weight increments carried by each link, bottom link first.
    pub fn link_weights(&self) -> Vec<i64> {
        self.levels
            .windows(2)
            .map(|w| w[1].weight() - w[0].weight())
            .collect()
    }

    /// Product of the `ψ` factors over the links.
    pub fn psi(&self, t: &ExactScalar) -> ExactScalar {
        self.levels
            .windows(2)
            .map(|w| psi_unchecked(&w[1], &w[0], t))
            .fold(ExactScalar::one(), |acc, v| acc * v)
    }
}

/// Cartesian product of inclusive integer ranges; empty if any range is empty.
pub(crate) fn product_of_ranges(bounds: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::with_capacity(bounds.len())];
    for &(lo, hi) in bounds {
        if lo > hi {
            return Vec::new();
        }
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (lo..=hi).map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

/// `ν` can be extended by interlacing steps up to `λ`.
pub(crate) fn reaches(nu: &Signature, lambda: &Signature) -> bool {
    let (l, t) = (nu.len(), lambda.len());
    if l > t {
        return false;
    }
    let (np, lp) = (nu.parts(), lambda.parts());
    (0..l).all(|i| lp[i] >= np[i] && np[i] >= lp[i + t - l])
}

/// Every signature of length `len` that sits below `λ` in some chain.
pub fn signatures_below(lambda: &Signature, len: usize) -> Vec<Signature> {
    let t = lambda.len();
    if len > t {
        return Vec::new();
    }
    let lp = lambda.parts();
    let bounds: Vec<(i64, i64)> = (0..len).map(|i| (lp[i + t - len], lp[i])).collect();
    product_of_ranges(&bounds)
        .into_iter()
        .filter_map(|v| Signature::new(v).ok())
        .collect()
}

/// Signatures `ν'` with `ν ≺_P ν'` that can still reach `λ`.
pub(crate) fn steps_up(nu: &Signature, lambda: &Signature) -> Vec<Signature> {
    let l = nu.len();
    let t = lambda.len();
    if l >= t {
        return Vec::new();
    }
    let (np, lp) = (nu.parts(), lambda.parts());
    let bounds: Vec<(i64, i64)> = (0..=l)
        .map(|i| {
            let mut lo = lp[i + t - l - 1];
            let mut hi = lp[i];
            if i < l {
                lo = lo.max(np[i]);
            }
            if i > 0 {
                hi = hi.min(np[i - 1]);
            }
            (lo, hi)
        })
        .collect();
    product_of_ranges(&bounds)
        .into_iter()
        .map(|v| Signature::new(v).expect("interlacing bounds keep order"))
        .collect()
}

/// All chains from `μ` up to `λ` in `k` interlacing steps.
pub fn enumerate_chains(
    lambda: &Signature,
    mu: &Signature,
    k: usize,
) -> impl Iterator<Item = InterlacingChain> {
    let mut done = Vec::new();
    if mu.len() + k == lambda.len() && reaches(mu, lambda) {
        let mut frontier = vec![vec![mu.clone()]];
        for _ in 0..k {
            frontier = frontier
                .into_iter()
                .flat_map(|chain| {
                    let tip = chain.last().expect("non-empty").clone();
                    steps_up(&tip, lambda).into_iter().map(move |next| {
                        let mut c = chain.clone();
                        c.push(next);
                        c
                    })
                })
                .collect();
        }
        done = frontier
            .into_iter()
            .filter(|c| c.last() == Some(lambda))
            .map(|levels| InterlacingChain { levels })
            .collect();
    }
    done.into_iter()
}
