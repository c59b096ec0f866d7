use serde::Serialize;

use super::product_step;
use crate::error::{Error, Result};
use crate::padic::PadicMatrix;
use crate::signature::{IntVector, Signature};

/// `λ^{(j)}(k)`: the first `n−j` entries follow `v`, the last `j` evolve as a product
/// process driven by the corner `A^{(n−j+1)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterpolatingState {
    pub j: usize,
    pub lambda_j: IntVector,
}

impl InterpolatingState {
    pub fn initial(j: usize, n: usize) -> Result<Self> {
        if j == 0 || j > n {
            return Err(Error::IndexOutOfRange { index: j, bound: n });
        }
        Ok(InterpolatingState {
            j,
            lambda_j: IntVector::zeros(n),
        })
    }

    /// The evolving bottom block as a signature.
    pub fn bottom(&self) -> Result<Signature> {
        let n = self.lambda_j.len();
        Signature::new(self.lambda_j.0[n - self.j..].to_vec())
    }
}

pub fn interpolation_step(
    state: &InterpolatingState,
    v_next: &IntVector,
    a: &PadicMatrix,
) -> Result<InterpolatingState> {
    let n = a.rows();
    let j = state.j;
    if state.lambda_j.len() != n || v_next.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "interpolating state of length {} for a {n}-row matrix",
            state.lambda_j.len()
        )));
    }
    let bottom = product_step(&state.bottom()?, &a.corner(n - j + 1)?)?;
    let mut next = v_next.0[..n - j].to_vec();
    next.extend_from_slice(bottom.parts());
    Ok(InterpolatingState {
        j,
        lambda_j: IntVector(next),
    })
}
