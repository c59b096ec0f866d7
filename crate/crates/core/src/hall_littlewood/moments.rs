use num_traits::{One, Zero};
use serde::Serialize;

use super::corners::{
    check_t, joint_corner_distribution, kth_corner_distribution, principal_value,
    SignatureDistribution,
};
use super::eval::{hl_p_poly, Variable};
use super::poly::{rational_pow, ExactScalar, UniPoly};
use crate::ensembles::EnsembleSpec;
use crate::error::{Error, Result};
use crate::signature::Signature;

/// The law of `SN(A_1)` for ensembles with finite support.
pub fn law_of_spec(spec: &EnsembleSpec) -> Result<SignatureDistribution> {
    let law = spec
        .finite_law()
        .ok_or_else(|| Error::InvalidSpec("ensemble has no finite singular-number law".into()))?;
    SignatureDistribution::from_pairs(law)
}

fn law_len(law: &SignatureDistribution) -> Result<usize> {
    let mut lens = law.support().map(|s| s.len());
    let n = lens
        .next()
        .ok_or_else(|| Error::InvalidSpec("empty law".into()))?;
    if lens.any(|l| l != n) {
        return Err(Error::DimensionMismatch(
            "law mixes signature lengths".into(),
        ));
    }
    Ok(n)
}

/// `E(x^{|SN(A^{(j)})|})` given `SN(A) = μ1`.
pub fn corner_weight_pgf(mu1: &Signature, j: usize, t: &ExactScalar) -> Result<UniPoly> {
    check_t(t)?;
    let n = mu1.len();
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, bound: n });
    }
    let vars: Vec<Variable> = (0..n)
        .map(|i| {
            let c = rational_pow(t, i as i64);
            if i + 1 < j {
                Variable::scalar(c)
            } else {
                Variable::tracked(c)
            }
        })
        .collect();
    let num = hl_p_poly(mu1, &vars, t)?;
    Ok(num.scale(&principal_value(mu1, t).recip()))
}

/// `E|SN(A^{(j)})|` by differentiating the generating function at `x = 1`.
pub fn expected_corner_weight(
    law: &SignatureDistribution,
    j: usize,
    t: &ExactScalar,
) -> Result<ExactScalar> {
    let mut out = ExactScalar::zero();
    for (mu, p) in law.iter() {
        out += p * corner_weight_pgf(mu, j, t)?.derivative().at_one();
    }
    Ok(out)
}

/// The same expectation summed over the exact law of the `j`-th corner.
pub fn expected_corner_weight_direct(
    law: &SignatureDistribution,
    j: usize,
    t: &ExactScalar,
) -> Result<ExactScalar> {
    let mut out = ExactScalar::zero();
    for (mu, p) in law.iter() {
        out += p * kth_corner_distribution(mu, j, t)?.mean_weight();
    }
    Ok(out)
}

/// `(E|SN^{(1)}| − E|SN^{(2)}|, …, E|SN^{(n−1)}| − E|SN^{(n)}|, E|SN^{(n)}|)`.
pub fn lln_prediction(law: &SignatureDistribution, t: &ExactScalar) -> Result<Vec<ExactScalar>> {
    let n = law_len(law)?;
    let means = (1..=n)
        .map(|j| expected_corner_weight(law, j, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(differences(&means))
}

fn differences(w: &[ExactScalar]) -> Vec<ExactScalar> {
    (0..w.len())
        .map(|i| match w.get(i + 1) {
            Some(next) => &w[i] - next,
            None => w[i].clone(),
        })
        .collect()
}

/// Upper-bidiagonal matrix with `1` on the diagonal and `−1` above it.
pub fn bidiagonal_l(n: usize) -> Vec<Vec<ExactScalar>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        ExactScalar::one()
                    } else if j == i + 1 {
                        -ExactScalar::one()
                    } else {
                        ExactScalar::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn matmul(a: &[Vec<ExactScalar>], b: &[Vec<ExactScalar>]) -> Vec<Vec<ExactScalar>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(ExactScalar::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn transpose(a: &[Vec<ExactScalar>]) -> Vec<Vec<ExactScalar>> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Covariance `Σ` of the cumulative corner weights and its image `LΣLᵀ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerCovariance {
    pub means: Vec<ExactScalar>,
    pub sigma: Vec<Vec<ExactScalar>>,
    pub l_sigma_lt: Vec<Vec<ExactScalar>>,
}

pub fn corner_weight_covariance(
    law: &SignatureDistribution,
    t: &ExactScalar,
) -> Result<CornerCovariance> {
    let n = law_len(law)?;
    let mut first = vec![ExactScalar::zero(); n];
    let mut second = vec![vec![ExactScalar::zero(); n]; n];
    for (mu, p) in law.iter() {
        for chain in joint_corner_distribution(mu, t)? {
            let w: Vec<ExactScalar> = chain
                .corners
                .iter()
                .map(|c| ExactScalar::from_integer(c.weight().into()))
                .collect();
            let q = p * &chain.prob;
            for i in 0..n {
                first[i] += &q * &w[i];
                for j in 0..n {
                    second[i][j] += &q * &w[i] * &w[j];
                }
            }
        }
    }
    let sigma: Vec<Vec<ExactScalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| &second[i][j] - &first[i] * &first[j])
                .collect()
        })
        .collect();
    let l = bidiagonal_l(n);
    let l_sigma_lt = matmul(&matmul(&l, &sigma), &transpose(&l));
    Ok(CornerCovariance {
        means: first,
        sigma,
        l_sigma_lt,
    })
}

/// Exact determinant by fraction-carrying Gaussian elimination.
pub fn exact_determinant(m: &[Vec<ExactScalar>]) -> ExactScalar {
    let n = m.len();
    let mut a: Vec<Vec<ExactScalar>> = m.to_vec();
    let mut det = ExactScalar::one();
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return ExactScalar::zero();
        };
        if r != c {
            a.swap(r, c);
            det = -det;
        }
        let pivot = a[c][c].clone();
        det *= &pivot;
        for r in c + 1..n {
            let f = &a[r][c] / &pivot;
            if f.is_zero() {
                continue;
            }
            for k in c..n {
                let delta = &f * &a[c][k];
                a[r][k] -= delta;
            }
        }
    }
    det
}

pub fn leading_principal_minors(m: &[Vec<ExactScalar>]) -> Vec<ExactScalar> {
    (1..=m.len())
        .map(|k| {
            let sub: Vec<Vec<ExactScalar>> = m[..k].iter().map(|row| row[..k].to_vec()).collect();
            exact_determinant(&sub)
        })
        .collect()
}

/// Gaps `E|SN^{(i)}| − E|SN^{(i+1)}|` (last entry `E|SN^{(n)}|`) and whether they strictly
/// decrease.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CornerInequalityReport {
    #[serde(serialize_with = "serialize_rationals")]
    pub gaps: Vec<ExactScalar>,
    pub degenerate: bool,
    pub strict: bool,
}

fn serialize_rationals<S: serde::Serializer>(
    v: &[ExactScalar],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub fn verify_corner_inequality(
    law: &SignatureDistribution,
    t: &ExactScalar,
) -> Result<CornerInequalityReport> {
    let gaps = lln_prediction(law, t)?;
    let degenerate = law.support().all(Signature::is_constant);
    let strict = gaps.windows(2).all(|w| w[0] > w[1]);
    if !degenerate && !strict {
        let shown: Vec<String> = gaps.iter().map(|g| g.to_string()).collect();
        return Err(Error::InequalityViolated(shown.join(", ")));
    }
    Ok(CornerInequalityReport {
        gaps,
        degenerate,
        strict,
    })
}
