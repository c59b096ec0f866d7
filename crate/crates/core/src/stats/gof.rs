use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::hall_littlewood::{SignatureDistribution, TruncatedDistribution};
use crate::signature::Signature;

/// Counts of observed signatures.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SignatureHistogram {
    pub counts: BTreeMap<Signature, u64>,
    pub total: u64,
}

impl SignatureHistogram {
    pub fn new() -> Self {
        SignatureHistogram::default()
    }

    pub fn add(&mut self, s: Signature) {
        *self.counts.entry(s).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &SignatureHistogram) {
        for (s, c) in &other.counts {
            *self.counts.entry(s.clone()).or_insert(0) += c;
        }
        self.total += other.total;
    }

    pub fn count(&self, s: &Signature) -> u64 {
        self.counts.get(s).copied().unwrap_or(0)
    }

    pub fn frequency(&self, s: &Signature) -> f64 {
        self.count(s) as f64 / self.total.max(1) as f64
    }
}

impl FromIterator<Signature> for SignatureHistogram {
    fn from_iter<I: IntoIterator<Item = Signature>>(iter: I) -> Self {
        let mut h = SignatureHistogram::new();
        for s in iter {
            h.add(s);
        }
        h
    }
}

fn tv_against<'a>(
    emp: &SignatureHistogram,
    exact: impl Iterator<Item = (&'a Signature, &'a BigRational)>,
) -> Result<BigRational> {
    if emp.total == 0 {
        return Err(Error::InvalidSpec("empty histogram".into()));
    }
    let total = BigInt::from(emp.total);
    let mut sum = BigRational::zero();
    let mut seen = 0u64;
    for (s, p) in exact {
        let c = emp.count(s);
        seen += c;
        sum += (BigRational::new(BigInt::from(c), total.clone()) - p).abs();
    }
    sum += BigRational::new(BigInt::from(emp.total - seen), total);
    Ok(sum / BigInt::from(2))
}

/// `½ Σ |p̂ − p|` over the union of supports, exactly.
pub fn tv_distance(emp: &SignatureHistogram, exact: &SignatureDistribution) -> Result<BigRational> {
    tv_against(emp, exact.iter())
}

/// Upper bound on the distance to a truncated law: the distance to the captured part plus
/// half the omitted mass.
pub fn tv_distance_truncated(
    emp: &SignatureHistogram,
    exact: &TruncatedDistribution,
) -> Result<f64> {
    let captured = tv_against(emp, exact.iter())?;
    let missing = (BigRational::from_integer(1.into()) - &exact.captured_mass) / BigInt::from(2);
    Ok((captured + missing).to_f64().unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// Cells after pooling.
    pub cells: usize,
}

impl ChiSquareResult {
    pub fn rejects_at(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Pearson goodness of fit. Cells with expected count below 5 are pooled, smallest first.
pub fn chi_square_gof(observed: &[u64], probabilities: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != probabilities.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} observed cells against {} probabilities",
            observed.len(),
            probabilities.len()
        )));
    }
    let n: u64 = observed.iter().sum();
    if n == 0 {
        return Err(Error::InvalidSpec("no observations".into()));
    }
    let mut cells: Vec<(f64, f64)> = observed
        .iter()
        .zip(probabilities)
        .map(|(&o, &p)| (o as f64, p * n as f64))
        .collect();
    cells.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (o, e) in cells {
        if acc.1 > 0.0 || e < 5.0 {
            acc = (acc.0 + o, acc.1 + e);
            if acc.1 >= 5.0 {
                pooled.push(acc);
                acc = (0.0, 0.0);
            }
        } else {
            pooled.push((o, e));
        }
    }
    if acc.1 > 0.0 || acc.0 > 0.0 {
        match pooled.first_mut() {
            Some(first) => {
                first.0 += acc.0;
                first.1 += acc.1;
            }
            None => pooled.push(acc),
        }
    }
    if pooled.len() < 2 {
        return Err(Error::InvalidSpec(
            "fewer than two cells after pooling".into(),
        ));
    }
    let statistic: f64 = pooled
        .iter()
        .map(|&(o, e)| {
            if e > 0.0 {
                (o - e).powi(2) / e
            } else {
                f64::INFINITY
            }
        })
        .sum();
    let dof = pooled.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    Ok(ChiSquareResult {
        statistic,
        degrees_of_freedom: dof,
        p_value: dist.sf(statistic),
        cells: pooled.len(),
    })
}

/// Chi-square of a histogram against an exact law on signatures.
pub fn chi_square_signatures(
    emp: &SignatureHistogram,
    exact: &SignatureDistribution,
) -> Result<ChiSquareResult> {
    let mut observed = Vec::new();
    let mut probs = Vec::new();
    let mut seen = 0;
    for (s, p) in exact.iter() {
        let c = emp.count(s);
        seen += c;
        observed.push(c);
        probs.push(p.to_f64().unwrap_or(0.0));
    }
    if seen != emp.total {
        return Err(Error::ConstraintViolated(format!(
            "{} observations outside the support",
            emp.total - seen
        )));
    }
    chi_square_gof(&observed, &probs)
}

/// Two-sample chi-square homogeneity test over the union of observed signatures.
/// Cells whose smaller expected count falls below 5 are pooled, rarest first.
pub fn chi_square_homogeneity(
    a: &SignatureHistogram,
    b: &SignatureHistogram,
) -> Result<ChiSquareResult> {
    if a.total == 0 || b.total == 0 {
        return Err(Error::InvalidSpec("no observations".into()));
    }
    let (na, nb) = (a.total as f64, b.total as f64);
    let share = na.min(nb) / (na + nb);
    let mut cells: Vec<(u64, u64)> = a
        .counts
        .keys()
        .chain(b.counts.keys())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .map(|s| (a.count(s), b.count(s)))
        .collect();
    cells.sort_by_key(|&(x, y)| x + y);
    let mut pooled: Vec<(u64, u64)> = Vec::new();
    let mut acc = (0u64, 0u64);
    for (x, y) in cells {
        acc = (acc.0 + x, acc.1 + y);
        if (acc.0 + acc.1) as f64 * share >= 5.0 {
            pooled.push(acc);
            acc = (0, 0);
        }
    }
    if acc.0 + acc.1 > 0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => pooled.push(acc),
        }
    }
    if pooled.len() < 2 {
        return Err(Error::InvalidSpec(
            "fewer than two cells after pooling".into(),
        ));
    }
    let n = na + nb;
    let statistic: f64 = pooled
        .iter()
        .map(|&(x, y)| {
            let col = (x + y) as f64;
            let (ea, eb) = (na * col / n, nb * col / n);
            (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb
        })
        .sum();
    let dof = pooled.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    Ok(ChiSquareResult {
        statistic,
        degrees_of_freedom: dof,
        p_value: dist.sf(statistic),
        cells: pooled.len(),
    })
}
