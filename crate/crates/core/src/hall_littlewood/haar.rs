use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::corners::{check_t, DistributionEntry};
use super::eval::{geometric_points, hl_p_eval, principal_specialization};
use super::poly::{rational_pow, ExactScalar};
use crate::ensembles::AmbientDim;
use crate::error::{Error, Result};
use crate::padic::Prime;
use crate::signature::Signature;

/// `b_λ(t) = ∏ φ_{m_i(λ)}(t)` over the nonzero values `i` of `λ`, `φ_m(t) = ∏_{j≤m} (1 − t^j)`.
pub fn b_lambda(lambda: &Signature, t: &ExactScalar) -> ExactScalar {
    let one = ExactScalar::one();
    let mut out = one.clone();
    for (value, m) in lambda.multiplicities() {
        if value == 0 {
            continue;
        }
        for j in 1..=m as i64 {
            out *= &one - rational_pow(t, j);
        }
    }
    out
}

/// `λ` with zero parts added or dropped to reach length `r`; `None` if it has more than `r`
/// nonzero parts.
fn resized(lambda: &Signature, r: usize) -> Option<Signature> {
    let mut parts: Vec<i64> = lambda.parts().iter().copied().filter(|&l| l != 0).collect();
    if parts.len() > r {
        return None;
    }
    parts.resize(r, 0);
    Some(Signature::from_unsorted(parts))
}

fn require_partition(lambda: &Signature) -> Result<()> {
    if lambda.is_nonnegative() {
        Ok(())
    } else {
        Err(Error::InvalidSignature(lambda.parts().to_vec()))
    }
}

/// `Q_λ = b_λ(t)·P_λ` in as many variables as there are points; `λ` must be nonnegative.
pub fn hl_q_eval(
    lambda: &Signature,
    points: &[ExactScalar],
    t: &ExactScalar,
) -> Result<ExactScalar> {
    require_partition(lambda)?;
    match resized(lambda, points.len()) {
        None => Ok(ExactScalar::zero()),
        Some(l) => Ok(b_lambda(lambda, t) * hl_p_eval(&l, points, t)?),
    }
}

/// `Π_t(a; b) = ∏_{i,j} (1 − t·aᵢbⱼ)/(1 − aᵢbⱼ)`.
pub fn cauchy_kernel(a: &[ExactScalar], b: &[ExactScalar], t: &ExactScalar) -> Result<ExactScalar> {
    let one = ExactScalar::one();
    let mut out = one.clone();
    for x in a {
        for y in b {
            let xy = x * y;
            if xy == one {
                return Err(Error::KernelPole);
            }
            out *= (&one - t * &xy) / (&one - &xy);
        }
    }
    Ok(out)
}

/// Which reading of the `Q` arguments `t^{s}, …, t^{N−n}` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum QConvention {
    /// `s = m − n − 1`, as printed.
    Literal,
    /// `s = m − n + 1`, which gives `N − m` arguments.
    Shifted,
}

impl QConvention {
    /// Exponent of the first argument.
    pub fn start(self, n: usize, m: usize) -> i64 {
        let (n, m) = (n as i64, m as i64);
        match self {
            QConvention::Literal => m - n - 1,
            QConvention::Shifted => m - n + 1,
        }
    }

    /// Exponent of the first argument and the number of arguments.
    pub fn arguments(self, n: usize, m: usize, ambient: usize) -> Result<(i64, usize)> {
        let start = self.start(n, m);
        let (n, m, big) = (n as i64, m as i64, ambient as i64);
        let count = big - n - start + 1;
        if count < 0 {
            return Err(Error::InvalidSpec(format!(
                "empty argument range for n={n}, m={m}, N={big}"
            )));
        }
        Ok((start, count as usize))
    }
}

/// Hall-Littlewood measure on `Sig_n⁺` with mass beyond `λ₁ = cutoff` dropped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedDistribution {
    pub n: usize,
    pub m: usize,
    pub ambient: AmbientDim,
    pub convention: QConvention,
    pub cutoff: i64,
    #[serde(skip)]
    pub probs: BTreeMap<Signature, ExactScalar>,
    #[serde(serialize_with = "display")]
    pub captured_mass: ExactScalar,
    pub omitted_mass: f64,
}

fn display<S: serde::Serializer>(x: &ExactScalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl TruncatedDistribution {
    pub fn prob(&self, s: &Signature) -> ExactScalar {
        self.probs.get(s).cloned().unwrap_or_else(ExactScalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Signature, &ExactScalar)> {
        self.probs.iter()
    }

    pub fn mean_weight(&self) -> ExactScalar {
        self.probs.iter().fold(ExactScalar::zero(), |acc, (s, p)| {
            acc + p * ExactScalar::from_integer(s.weight().into())
        })
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
}

/// Nonnegative signatures of length `n` with first part exactly `c`.
fn with_first_part(n: usize, c: i64) -> Vec<Signature> {
    fn extend(prefix: &mut Vec<i64>, n: usize, bound: i64, out: &mut Vec<Signature>) {
        if prefix.len() == n {
            out.push(Signature::new(prefix.clone()).expect("non-increasing by construction"));
            return;
        }
        for v in 0..=bound {
            prefix.push(v);
            extend(prefix, n, v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut prefix = vec![c];
    extend(&mut prefix, n, c, &mut out);
    out
}

/// Largest first part examined before giving up on reaching the tolerance.
pub const MAX_CUTOFF: i64 = 512;

/// Law of `SN` of the top `n×m` block of a Haar element of `GL_N(ℤₚ)`:
/// `P_λ(1, …, t^{n−1}) Q_λ(t^{s}, …, t^{N−n}) / Π_t(1, …, t^{n−1}; t^{s}, …, t^{N−n})`.
/// First parts `0, 1, 2, …` are added until the missing mass drops below `tolerance`.
pub fn hl_haar_corner_measure(
    n: usize,
    m: usize,
    ambient: AmbientDim,
    p: Prime,
    convention: QConvention,
    tolerance: f64,
) -> Result<TruncatedDistribution> {
    if n == 0 || m < n {
        return Err(Error::InvalidSpec(format!(
            "need 1 <= n <= m, got n={n}, m={m}"
        )));
    }
    let t = p.t();
    let one = ExactScalar::one();
    let a = geometric_points(&t, 0, n);
    // Q at geometric arguments reduces to a principal specialization; the infinite case is
    // its limit, and the kernel telescopes to ∏_{i<n} 1/(1 − t^{i+s}).
    let (start, count, kernel) = match ambient {
        AmbientDim::Finite(big) => {
            if big < m {
                return Err(Error::InvalidSpec(format!(
                    "need m <= N, got m={m}, N={big}"
                )));
            }
            let (start, count) = convention.arguments(n, m, big)?;
            let b = geometric_points(&t, start, count);
            (start, Some(count), cauchy_kernel(&a, &b, &t)?)
        }
        AmbientDim::Infinity => {
            let start = convention.start(n, m);
            let mut k = one.clone();
            for i in 0..n as i64 {
                let y = rational_pow(&t, i + start);
                if y == one {
                    return Err(Error::KernelPole);
                }
                k /= &one - y;
            }
            (start, None, k)
        }
    };
    let q_value = |lambda: &Signature| -> ExactScalar {
        let x = rational_pow(&t, start);
        match count {
            Some(r) => match resized(lambda, r) {
                None => ExactScalar::zero(),
                Some(l) => b_lambda(lambda, &t) * principal_specialization(&l, &x, &t),
            },
            None => rational_pow(&x, lambda.weight()) * rational_pow(&t, lambda.n_statistic()),
        }
    };
    let mut probs = BTreeMap::new();
    let mut captured = ExactScalar::zero();
    let mut cutoff = 0;
    loop {
        for lambda in with_first_part(n, cutoff) {
            let prob = principal_specialization(&lambda, &one, &t) * q_value(&lambda) / &kernel;
            if !prob.is_zero() {
                captured += &prob;
                probs.insert(lambda, prob);
            }
        }
        let omitted = (&one - &captured).to_f64().unwrap_or(f64::NAN);
        if omitted < -1e-12 {
            return Err(Error::ConstraintViolated(format!(
                "captured mass {captured} exceeds one"
            )));
        }
        if omitted < tolerance {
            return Ok(TruncatedDistribution {
                n,
                m,
                ambient,
                convention,
                cutoff,
                probs,
                captured_mass: captured,
                omitted_mass: omitted.max(0.0),
            });
        }
        if cutoff >= MAX_CUTOFF {
            return Err(Error::ConstraintViolated(format!(
                "mass {omitted:e} still missing at first part {cutoff}"
            )));
        }
        cutoff += 1;
    }
}

fn increment_arguments(n: usize, j: usize) -> Result<()> {
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, bound: n });
    }
    Ok(())
}

/// `E(x^{|SN^{(j)}| − |SN^{(j+1)}|})` for the top `n×n` block of Haar `GL_N(ℤₚ)`
/// (the last increment is `|SN^{(n)}|`): `Π_t(x; t^j, …, t^{N−n+j−1}) / Π_t(1; same)`.
pub fn haar_corner_increment_pgf(
    n: usize,
    ambient: AmbientDim,
    j: usize,
    t: &ExactScalar,
    x: &ExactScalar,
) -> Result<ExactScalar> {
    check_t(t)?;
    increment_arguments(n, j)?;
    let one = ExactScalar::one();
    match ambient {
        AmbientDim::Finite(big) => {
            if big < n {
                return Err(Error::InvalidSpec(format!(
                    "need n <= N, got n={n}, N={big}"
                )));
            }
            let b = geometric_points(t, j as i64, big - n);
            let top = cauchy_kernel(std::slice::from_ref(x), &b, t)?;
            let bottom = cauchy_kernel(&[one], &b, t)?;
            Ok(top / bottom)
        }
        AmbientDim::Infinity => {
            let tj = rational_pow(t, j as i64);
            let denom = &one - x * &tj;
            if denom.is_zero() {
                return Err(Error::KernelPole);
            }
            Ok((&one - tj) / denom)
        }
    }
}

/// Derivative at `x = 1` of the increment generating function.
pub fn haar_corner_increment_mean(
    n: usize,
    ambient: AmbientDim,
    j: usize,
    t: &ExactScalar,
) -> Result<ExactScalar> {
    check_t(t)?;
    increment_arguments(n, j)?;
    let one = ExactScalar::one();
    let f = |e: i64| {
        let y = rational_pow(t, e);
        &y / (&one - &y)
    };
    match ambient {
        AmbientDim::Finite(big) => {
            if big < n {
                return Err(Error::InvalidSpec(format!(
                    "need n <= N, got n={n}, N={big}"
                )));
            }
            let mut total = ExactScalar::zero();
            for y in geometric_points(t, j as i64, big - n) {
                let ty = t * &y;
                total += &y / (&one - &y) - &ty / (&one - &ty);
            }
            Ok(total)
        }
        AmbientDim::Infinity => Ok(f(j as i64)),
    }
}

/// Limits of `λ(k)/k` for products of Haar corners.
pub fn haar_corner_lln(n: usize, ambient: AmbientDim, p: Prime) -> Result<Vec<ExactScalar>> {
    let t = p.t();
    (1..=n)
        .map(|j| haar_corner_increment_mean(n, ambient, j, &t))
        .collect()
}
