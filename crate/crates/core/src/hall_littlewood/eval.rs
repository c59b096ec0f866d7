use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::chains::{psi_unchecked, steps_up};
use super::poly::{rational_pow, ExactScalar, UniPoly};
use crate::error::{Error, Result};
use crate::signature::Signature;

/// An evaluation point `c · x^e`, where `x` stays symbolic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub coeff: ExactScalar,
    pub x_exp: i64,
}

impl Variable {
    pub fn scalar(c: ExactScalar) -> Self {
        Variable { coeff: c, x_exp: 0 }
    }

    pub fn tracked(c: ExactScalar) -> Self {
        Variable { coeff: c, x_exp: 1 }
    }

    fn power(&self, w: i64, index: usize) -> Result<Option<UniPoly>> {
        if self.coeff.is_zero() {
            return match w {
                0 => Ok(Some(UniPoly::one())),
                w if w > 0 => Ok(None),
                _ => Err(Error::ZeroPointWithNegativeWeight { index }),
            };
        }
        Ok(Some(UniPoly::monomial(
            rational_pow(&self.coeff, w),
            self.x_exp * w,
        )))
    }
}

/// `(t^{start}, t^{start+1}, …)` with `count` entries.
pub fn geometric_points(t: &ExactScalar, start: i64, count: usize) -> Vec<ExactScalar> {
    (0..count as i64)
        .map(|i| rational_pow(t, start + i))
        .collect()
}

/// `P_{λ/μ}` at symbolic points, summed level by level over interlacing chains.
/// Point `i` is attached to the `i`-th link counted from `μ`.
pub fn hl_skew_poly(
    lambda: &Signature,
    mu: &Signature,
    points: &[Variable],
    t: &ExactScalar,
) -> Result<UniPoly> {
    if mu.len() + points.len() != lambda.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} points for P_{lambda}/{mu}",
            points.len()
        )));
    }
    let mut level: BTreeMap<Signature, UniPoly> = BTreeMap::new();
    if super::chains::reaches(mu, lambda) {
        level.insert(mu.clone(), UniPoly::one());
    }
    for (idx, point) in points.iter().enumerate() {
        let mut next: BTreeMap<Signature, UniPoly> = BTreeMap::new();
        for (nu, value) in &level {
            let w0 = nu.weight();
            for up in steps_up(nu, lambda) {
                let Some(factor) = point.power(up.weight() - w0, idx + 1)? else {
                    continue;
                };
                let coeff = psi_unchecked(&up, nu, t);
                let term = (value * &factor).scale(&coeff);
                next.entry(up).or_default().add_assign_ref(&term);
            }
        }
        level = next;
    }
    Ok(level.remove(lambda).unwrap_or_default())
}

pub fn hl_skew_eval(
    lambda: &Signature,
    mu: &Signature,
    points: &[ExactScalar],
    t: &ExactScalar,
) -> Result<ExactScalar> {
    let vars: Vec<Variable> = points.iter().cloned().map(Variable::scalar).collect();
    Ok(hl_skew_poly(lambda, mu, &vars, t)?.coefficient(0))
}

pub fn hl_p_eval(
    lambda: &Signature,
    points: &[ExactScalar],
    t: &ExactScalar,
) -> Result<ExactScalar> {
    hl_skew_eval(lambda, &Signature::empty(), points, t)
}

pub fn hl_p_poly(lambda: &Signature, points: &[Variable], t: &ExactScalar) -> Result<UniPoly> {
    hl_skew_poly(lambda, &Signature::empty(), points, t)
}

/// `v_λ(t) = ∏_i ∏_{j=1}^{m_i(λ)} (1 − t^j)/(1 − t)`.
pub fn v_lambda(lambda: &Signature, t: &ExactScalar) -> ExactScalar {
    let one = ExactScalar::one();
    let mut out = one.clone();
    for m in lambda.multiplicities().into_values() {
        for j in 1..=m as i64 {
            out *= (&one - rational_pow(t, j)) / (&one - t);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for sub in permutations(n - 1) {
        for pos in 0..n {
            let mut p = sub.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

/// `P_λ` by symmetrization over `S_n`; requires pairwise distinct points.
pub fn hl_p_symmetrized_oracle(
    lambda: &Signature,
    points: &[ExactScalar],
    t: &ExactScalar,
) -> Result<ExactScalar> {
    let n = lambda.len();
    if points.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} points for a signature of length {n}",
            points.len()
        )));
    }
    for i in 0..n {
        for j in i + 1..n {
            if points[i] == points[j] {
                return Err(Error::RepeatedPoints);
            }
        }
        if points[i].is_zero() && lambda.parts().iter().any(|&l| l < 0) {
            return Err(Error::ZeroPointWithNegativeWeight { index: i + 1 });
        }
    }
    let mut total = ExactScalar::zero();
    for sigma in permutations(n) {
        let x: Vec<&ExactScalar> = sigma.iter().map(|&s| &points[s]).collect();
        let mut term = ExactScalar::one();
        for (xi, &l) in x.iter().zip(lambda.parts()) {
            term *= rational_pow(xi, l);
        }
        for i in 0..n {
            for j in i + 1..n {
                term *= (x[i] - t * x[j]) / (x[i] - x[j]);
            }
        }
        total += term;
    }
    Ok(total / v_lambda(lambda, t))
}

/// `P_λ(x, xt, …, xt^{n−1}; t)` in closed form.
pub fn principal_specialization(
    lambda: &Signature,
    x: &ExactScalar,
    t: &ExactScalar,
) -> ExactScalar {
    let one = ExactScalar::one();
    let n = lambda.len() as i64;
    let mut out = rational_pow(x, lambda.weight()) * rational_pow(t, lambda.n_statistic());
    for j in 1..=n {
        out *= &one - rational_pow(t, j);
    }
    for m in lambda.multiplicities().into_values() {
        for j in 1..=m as i64 {
            out /= &one - rational_pow(t, j);
        }
    }
    out
}
