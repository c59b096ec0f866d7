//! The product process `λ(k)`, the corner-sum process `v(k)`, the interpolating sequences
//! between them, and the diagnostics used to compare the two.

mod diagnostics;
mod interpolation;
mod trajectory;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::padic::{smith_singular_numbers, PadicMatrix};
use crate::signature::{IntVector, Signature};

pub use diagnostics::{
    bounded_difference_profile, lambda_split_margins, split_diagnostic, split_margins,
    BoundedDifferenceProfile, SplitCriterion, SplitReport,
};
pub use interpolation::{interpolation_step, InterpolatingState};
pub use trajectory::{
    run_coupled_trajectory, CoupledRun, Escalation, ProductRun, StepRecord, Trajectory,
    TrajectoryMetadata, TrajectoryOptions, CSV_SCHEMA,
};

/// `SN(diag(p^{λ_prev}) · A)`. The smallest part of `λ_prev` only moves the shift, so
/// residue sizes follow the spread of `λ_prev`.
pub fn product_step(lambda_prev: &Signature, a: &PadicMatrix) -> Result<Signature> {
    if lambda_prev.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "signature of length {} against {} rows",
            lambda_prev.len(),
            a.rows()
        )));
    }
    smith_singular_numbers(&a.scale_rows(lambda_prev.parts())?)
}

/// `(|SN(A^{(1)})|, …, |SN(A^{(n)})|)`.
pub fn corner_weights(a: &PadicMatrix) -> Result<IntVector> {
    (1..=a.rows())
        .map(|i| Ok(smith_singular_numbers(&a.corner(i)?)?.weight()))
        .collect::<Result<Vec<_>>>()
        .map(IntVector)
}

/// Converts cumulative corner weights `W_i = Σ_k |SN(A_k^{(i)})|` into `v` with
/// `v_i + … + v_n = W_i`.
pub fn v_from_cumulative(cumulative: &[i64]) -> IntVector {
    let n = cumulative.len();
    IntVector(
        (0..n)
            .map(|i| cumulative[i] - cumulative.get(i + 1).copied().unwrap_or(0))
            .collect(),
    )
}

/// Outcome of comparing one increment with the corner-weight difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct EqualDifferenceVerdict {
    pub precondition_held: bool,
    /// `None` when the precondition fails and no claim is made.
    pub equality_held: Option<bool>,
    pub increment: i64,
    pub corner_difference: i64,
}

/// For `λ ∈ Sig_{j+1}` and an `n×n` matrix `A`, compares
/// `SN(diag(p^λ) A^{(n−j)})₁ − λ₁` with `|SN(A^{(n−j)})| − |SN(A^{(n−j+1)})|`
/// whenever `SN(diag(p^λ) A^{(n−j)})₂ < λ₁ + SN(A^{(n−j)})_{j+1}`.
pub fn check_equal_difference(
    lambda: &Signature,
    a: &PadicMatrix,
    j: usize,
) -> Result<EqualDifferenceVerdict> {
    let n = a.rows();
    if j == 0 || j >= n {
        return Err(Error::IndexOutOfRange {
            index: j,
            bound: n.saturating_sub(1),
        });
    }
    if lambda.len() != j + 1 {
        return Err(Error::DimensionMismatch(format!(
            "level {j} needs a signature of length {}",
            j + 1
        )));
    }
    let upper = a.corner(n - j)?;
    let lower = a.corner(n - j + 1)?;
    let sn_b = product_step(lambda, &upper)?;
    let sn_upper = smith_singular_numbers(&upper)?;
    let sn_lower = smith_singular_numbers(&lower)?;
    let lead = lambda.part(1);
    let precondition_held = sn_b.part(2) < lead + sn_upper.part(j + 1);
    let increment = sn_b.part(1) - lead;
    let corner_difference = sn_upper.weight() - sn_lower.weight();
    Ok(EqualDifferenceVerdict {
        precondition_held,
        equality_held: precondition_held.then_some(increment == corner_difference),
        increment,
        corner_difference,
    })
}

/// `(λ₁(k)/k, …, λ_n(k)/k)` at the last recorded step.
pub fn lyapunov_estimates(traj: &Trajectory) -> Result<Vec<BigRational>> {
    let last = traj
        .steps
        .last()
        .ok_or_else(|| Error::InvalidSpec("empty trajectory".into()))?;
    if last.k == 0 {
        return Err(Error::InvalidSpec("Lyapunov estimates need k >= 1".into()));
    }
    Ok(lyapunov_at(&last.lambda, last.k))
}

pub fn lyapunov_at(lambda: &Signature, k: u64) -> Vec<BigRational> {
    let den = BigInt::from(k);
    lambda
        .parts()
        .iter()
        .map(|&l| BigRational::new(BigInt::from(l), den.clone()))
        .collect()
}
