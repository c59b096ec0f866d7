//! Samplers for the step-matrix laws: Haar on `GL_n(ℤₚ)`, bi-invariant laws with
//! prescribed singular numbers, corners of Haar matrices and i.i.d. entries.
//!
//! All samplers read from a [`DigitSource`], so a draw is a pure function of the source
//! and the precision, and raising the precision only appends digits.

mod rng;
mod spec;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::padic::{diag_signature, PadicMatrix, Prime, ResidueRing};
use crate::signature::Signature;
use crate::symplectic;

pub use rng::{entry_label, sample_uniform_residue, DigitSource, RngStream};
pub use spec::{AmbientDim, EnsembleKind, EnsembleSpec, ExactProb, COUNTEREXAMPLE_MAX_STEP};

const TAG_UNIFORM: u8 = 1;
const TAG_HAAR: u8 = 2;

/// Rank of an `n×m` matrix over `𝔽_p` given by its residues.
pub(crate) fn rank_mod_p(residues: &[BigUint], rows: usize, cols: usize, p: u64) -> usize {
    let mut a: Vec<u64> = residues
        .iter()
        .map(|r| (r % p).to_u64().expect("reduced below p"))
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        for j in 0..cols {
            a.swap(piv * cols + j, rank * cols + j);
        }
        let inv = mod_inverse(a[rank * cols + c], p);
        for r in 0..rows {
            if r == rank || a[r * cols + c] == 0 {
                continue;
            }
            let f = a[r * cols + c] * inv % p;
            for j in 0..cols {
                let sub = f * a[rank * cols + j] % p;
                a[r * cols + j] = (a[r * cols + j] + p - sub) % p;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub(crate) fn mod_inverse(a: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// `rows × cols` matrix of i.i.d. uniform residues (zeros are inexact).
pub fn sample_uniform_matrix(
    rows: usize,
    cols: usize,
    ring: &std::sync::Arc<ResidueRing>,
    src: &DigitSource,
) -> PadicMatrix {
    let residues = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .map(|(i, j)| src.residue(entry_label(TAG_UNIFORM, 0, i, j), ring))
        .collect();
    PadicMatrix::from_residues(ring.clone(), rows, cols, 0, residues).expect("shape")
}

/// Haar element of `GL_n(ℤₚ)` modulo `p^N`: uniform residues, rejected until invertible
/// modulo `p`.
pub fn sample_haar_gl(n: usize, p: Prime, precision: u32, src: &DigitSource) -> PadicMatrix {
    let ring = ResidueRing::new(p, precision);
    sample_haar_gl_in(n, &ring, src)
}

pub(crate) fn sample_haar_gl_in(
    n: usize,
    ring: &std::sync::Arc<ResidueRing>,
    src: &DigitSource,
) -> PadicMatrix {
    let p = ring.prime().get();
    for attempt in 0u32.. {
        let residues: Vec<BigUint> = (0..n * n)
            .map(|idx| src.residue(entry_label(TAG_HAAR, attempt, idx / n, idx % n), ring))
            .collect();
        if rank_mod_p(&residues, n, n, p) == n {
            return PadicMatrix::from_residues(ring.clone(), n, n, 0, residues).expect("shape");
        }
    }
    unreachable!("rejection loop is unbounded")
}

/// `U · diag_{rows×cols}(p^λ) · V` with independent Haar `U ∈ GL_rows`, `V ∈ GL_cols`.
pub fn sample_bi_invariant(
    lambda: &Signature,
    rows: usize,
    cols: usize,
    p: Prime,
    precision: u32,
    src: &DigitSource,
) -> Result<PadicMatrix> {
    if rows > cols || lambda.len() != rows {
        return Err(Error::DimensionMismatch(format!(
            "signature {lambda} for a {rows}x{cols} matrix"
        )));
    }
    let ring = ResidueRing::new(p, precision);
    let u = sample_haar_gl_in(rows, &ring, &src.child("U"));
    let v = sample_haar_gl_in(cols, &ring, &src.child("V"));
    let d = diag_signature(lambda, rows, cols, p, precision)?;
    u.matmul(&d)?.matmul(&v)
}

/// Top `n×m` block of Haar `GL_N(ℤₚ)`, or i.i.d. entries when `N = ∞`.
pub fn sample_corner_of_haar(
    n: usize,
    m: usize,
    ambient: AmbientDim,
    p: Prime,
    precision: u32,
    src: &DigitSource,
) -> Result<PadicMatrix> {
    if n > m {
        return Err(Error::DimensionMismatch(format!(
            "corner {n}x{m} needs n <= m"
        )));
    }
    let ring = ResidueRing::new(p, precision);
    match ambient {
        AmbientDim::Infinity => Ok(sample_uniform_matrix(n, m, &ring, src)),
        AmbientDim::Finite(big) => {
            if big < m {
                return Err(Error::DimensionMismatch(format!(
                    "corner {n}x{m} of a {big}x{big} matrix"
                )));
            }
            sample_haar_gl_in(big, &ring, src).block(n, m)
        }
    }
}

/// Draws one support signature of a finite mixture by its exact law.
pub fn draw_mixture_signature(
    items: &[(Signature, ExactProb)],
    src: &DigitSource,
) -> Result<Signature> {
    let d = spec::mixture_denominator(items)?;
    let mut rng = src.child("mixture").entry_rng(0);
    let u = rng.gen_range(0..d);
    let mut acc = 0u64;
    for (l, w) in items {
        let scaled = &w.0 * num_rational::BigRational::from_integer(d.into());
        acc += scaled
            .to_integer()
            .to_u64()
            .expect("weight below denominator");
        if u < acc {
            return Ok(l.clone());
        }
    }
    Err(Error::InvalidSpec("mixture weights do not sum to 1".into()))
}

impl EnsembleSpec {
    /// Spread of the singular numbers of `A_k` when it is known in advance.
    pub fn step_spread(&self, k: u64) -> Option<i64> {
        match self.kind {
            EnsembleKind::Counterexample => Some(counterexample_exponent(k) as i64),
            _ => self.max_spread(),
        }
    }

    /// Working precision for one isolated draw.
    pub fn default_precision(&self) -> u32 {
        self.precision_base + self.max_spread().unwrap_or(0) as u32
    }
}

fn counterexample_exponent(k: u64) -> u64 {
    1u64 << (k.max(1) - 1).min(62)
}

/// One draw of `A_k` (`k ≥ 1`) from the ensemble at the given precision.
pub fn draw_step_matrix(
    spec: &EnsembleSpec,
    k: u64,
    src: &DigitSource,
    precision: u32,
) -> Result<PadicMatrix> {
    let p = spec.p;
    let n = spec.n;
    match &spec.kind {
        EnsembleKind::FixedSN(l) => sample_bi_invariant(l, n, n, p, precision, src),
        EnsembleKind::SNMixture(items) => {
            let l = draw_mixture_signature(items, src)?;
            sample_bi_invariant(&l, n, n, p, precision, src)
        }
        EnsembleKind::CornerOfHaar(big) => sample_corner_of_haar(n, n, *big, p, precision, src),
        EnsembleKind::HaarEntries => {
            sample_corner_of_haar(n, n, AmbientDim::Infinity, p, precision, src)
        }
        EnsembleKind::GSpHaar(h) => Ok(symplectic::sample_haar_gsp(*h, p, precision, src).matrix),
        EnsembleKind::GSpFixedSN(l) => {
            Ok(symplectic::sample_bi_invariant_gsp(l, p, precision, src)?.matrix)
        }
        EnsembleKind::Counterexample => {
            if k > COUNTEREXAMPLE_MAX_STEP {
                return Err(Error::InvalidSpec(format!(
                    "counterexample steps are limited to k <= {COUNTEREXAMPLE_MAX_STEP}"
                )));
            }
            let e = counterexample_exponent(k);
            if e >= precision as u64 {
                return Err(Error::PrecisionExhausted { precision });
            }
            let ring = ResidueRing::new(p, precision);
            let residues = vec![
                BigUint::from(1u32),
                BigUint::zero(),
                BigUint::zero(),
                ring.p_power(e),
            ];
            PadicMatrix::from_parts(ring, 2, 2, 0, residues, vec![false, true, true, false])
        }
    }
}
