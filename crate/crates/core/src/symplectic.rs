//! `GSp_{2n}(ℚₚ)`: the similitude group of `Ω = [[0, J_n], [−J_n, 0]]`.
//!
//! Rows `i` and `2n+1−i` of an element form a hyperbolic pair. Haar elements of
//! `Sp_{2n}(ℤ/p^N)` are built one pair at a time as a uniformly random symplectic basis,
//! and `GSp` is reached through the section `u ↦ diag(I_n, u·I_n)`.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::ensembles::{entry_label, DigitSource};
use crate::error::{Error, Result};
use crate::padic::{
    diag_signature, smith_singular_numbers, PadicMatrix, PadicScalar, Prime, ResidueRing,
};
use crate::processes::corner_weights;
use crate::signature::{IntVector, Signature};

const TAG_VECTOR: u8 = 10;
const TAG_SOLUTION: u8 = 11;
const TAG_UNIT: u8 = 12;

/// The standard form on `ℚₚ^{2n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    pub n: usize,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Self {
        SymplecticForm { n }
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Entry `Ω_{ij}` (0-based) as `-1`, `0` or `1`.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        let d = self.dim();
        if i + j + 1 != d {
            0
        } else if i < self.n {
            1
        } else {
            -1
        }
    }

    pub fn gram(&self, p: Prime, precision: u32) -> PadicMatrix {
        let d = self.dim();
        let rows: Vec<Vec<i64>> = (0..d)
            .map(|i| (0..d).map(|j| self.entry(i, j)).collect())
            .collect();
        PadicMatrix::from_integers(&rows, p, precision).expect("square gram matrix")
    }

    /// `⟨x, y⟩ = xᵀ Ω y` modulo `p^N`.
    pub fn pairing(&self, x: &[BigUint], y: &[BigUint], ring: &ResidueRing) -> BigUint {
        let d = self.dim();
        let mut plus = BigUint::zero();
        let mut minus = BigUint::zero();
        for i in 0..d {
            let t = &x[i] * &y[d - 1 - i];
            if i < self.n {
                plus += t;
            } else {
                minus += t;
            }
        }
        ring.sub(&ring.reduce(plus), &ring.reduce(minus))
    }
}

/// An element of `GSp_{2n}(ℚₚ)` with its similitude `μ`, stored as `p^{μ_shift} · μ_residue`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GSpElement {
    pub matrix: PadicMatrix,
    pub similitude: PadicScalar,
    pub similitude_shift: i64,
}

impl GSpElement {
    /// Valuation of `μ(A)`.
    pub fn similitude_valuation(&self) -> Result<i64> {
        let v = self
            .similitude
            .valuation(self.matrix.prime())?
            .ok_or_else(|| Error::ConstraintViolated("similitude is zero".into()))?;
        Ok(v as i64 + self.similitude_shift)
    }
}

/// Returns the similitude of `A` if `A Ω Aᵀ = μ Ω` at the working precision.
pub fn is_gsp(a: &PadicMatrix) -> Result<Option<(PadicScalar, i64)>> {
    let d = a.rows();
    if d != a.cols() || d % 2 != 0 || d == 0 {
        return Err(Error::DimensionMismatch(format!(
            "GSp membership needs an even square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let form = SymplecticForm::new(d / 2);
    let ring = a.ring().clone();
    let row = |i: usize| -> Vec<BigUint> { (0..d).map(|j| a.residue(i, j).clone()).collect() };
    let rows: Vec<Vec<BigUint>> = (0..d).map(row).collect();
    let mu = form.pairing(&rows[0], &rows[d - 1], &ring);
    if mu.is_zero() {
        return Err(Error::PrecisionExhausted {
            precision: ring.precision(),
        });
    }
    let neg_mu = ring.neg(&mu);
    for i in 0..d {
        for j in 0..d {
            let m = form.pairing(&rows[i], &rows[j], &ring);
            let expected = match form.entry(i, j) {
                1 => &mu,
                -1 => &neg_mu,
                _ => {
                    if !m.is_zero() {
                        return Ok(None);
                    }
                    continue;
                }
            };
            if &m != expected {
                return Ok(None);
            }
        }
    }
    let scalar = PadicScalar {
        residue: mu,
        precision: ring.precision(),
        exact_zero: false,
    };
    Ok(Some((scalar, 2 * a.shift())))
}

/// Singular numbers of a `GSp` element, checked against the balanced-pairs constraint.
pub fn gsp_singular_numbers(a: &GSpElement) -> Result<Signature> {
    let sn = smith_singular_numbers(&a.matrix)?;
    if !sn.is_balanced() {
        return Err(Error::ConstraintViolated(format!(
            "singular numbers {sn} of a GSp element are not balanced"
        )));
    }
    Ok(sn)
}

struct BasisBuilder<'a> {
    form: SymplecticForm,
    ring: &'a Arc<ResidueRing>,
    pairs: Vec<(Vec<BigUint>, Vec<BigUint>)>,
}

impl BasisBuilder<'_> {
    /// Projection onto the Ω-complement of the pairs built so far.
    fn project(&self, x: &[BigUint]) -> Vec<BigUint> {
        let ring = self.ring;
        let mut out = x.to_vec();
        for (e, f) in &self.pairs {
            let xf = self.form.pairing(x, f, ring);
            let xe = self.form.pairing(x, e, ring);
            for k in 0..out.len() {
                let sub = ring.mul(&xf, &e[k]);
                let add = ring.mul(&xe, &f[k]);
                out[k] = ring.add(&ring.sub(&out[k], &sub), &add);
            }
        }
        out
    }

    fn uniform(&self, src: &DigitSource, tag: u8, pair: usize, attempt: u32) -> Vec<BigUint> {
        let d = self.form.dim();
        let x: Vec<BigUint> = (0..d)
            .map(|k| src.residue(entry_label(tag, attempt, pair, k), self.ring))
            .collect();
        self.project(&x)
    }
}

/// Haar element of `Sp_{2n}(ℤₚ)` modulo `p^N`.
pub fn sample_haar_sp(n: usize, p: Prime, precision: u32, src: &DigitSource) -> PadicMatrix {
    let ring = ResidueRing::new(p, precision);
    let form = SymplecticForm::new(n);
    let d = form.dim();
    let pv = p.get();
    let mut b = BasisBuilder {
        form,
        ring: &ring,
        pairs: Vec::with_capacity(n),
    };
    for a in 0..n {
        let e = (0u32..)
            .map(|attempt| b.uniform(src, TAG_VECTOR, a, attempt))
            .find(|v| v.iter().any(|c| !(c % pv).is_zero()))
            .expect("unbounded rejection");
        // a coordinate where ⟨e, s_j⟩ is a unit exists because e is primitive
        let (j, unit) = (0..d)
            .map(|j| {
                let mut s = vec![BigUint::zero(); d];
                s[j] = BigUint::one();
                (j, form.pairing(&e, &s, &ring))
            })
            .find(|(_, u)| !(u % pv).is_zero())
            .expect("primitive vector pairs to a unit");
        let mut s = vec![BigUint::zero(); d];
        s[j] = BigUint::one();
        let inv = ring.inverse(&unit).expect("unit");
        let f0: Vec<BigUint> = b.project(&s).iter().map(|c| ring.mul(c, &inv)).collect();
        let y = b.uniform(src, TAG_SOLUTION, a, 0);
        let coef = ring.sub(&BigUint::one(), &form.pairing(&e, &y, &ring));
        let w: Vec<BigUint> = y
            .iter()
            .zip(&f0)
            .map(|(yk, fk)| ring.add(yk, &ring.mul(&coef, fk)))
            .collect();
        b.pairs.push((e, w));
    }
    let mut residues = vec![BigUint::zero(); d * d];
    for (a, (e, f)) in b.pairs.into_iter().enumerate() {
        let top = a;
        let bottom = d - 1 - a;
        for k in 0..d {
            residues[top * d + k] = e[k].clone();
            residues[bottom * d + k] = f[k].clone();
        }
    }
    PadicMatrix::from_residues(ring, d, d, 0, residues).expect("square")
}

/// Uniform unit of `ℤ/p^N`.
fn sample_unit(ring: &ResidueRing, src: &DigitSource) -> BigUint {
    let p = ring.prime().get();
    (0u32..)
        .map(|attempt| src.residue(entry_label(TAG_UNIT, attempt, 0, 0), ring))
        .find(|u| !(u % p).is_zero())
        .expect("unbounded rejection")
}

/// Haar element of `GSp_{2n}(ℤₚ)` modulo `p^N`: `S · diag(I_n, u·I_n)`.
pub fn sample_haar_gsp(n: usize, p: Prime, precision: u32, src: &DigitSource) -> GSpElement {
    let s = sample_haar_sp(n, p, precision, &src.child("Sp"));
    let ring = s.ring().clone();
    let u = sample_unit(&ring, &src.child("unit"));
    let d = 2 * n;
    let mut residues = s.residues().to_vec();
    for i in 0..d {
        for j in n..d {
            residues[i * d + j] = ring.mul(&residues[i * d + j], &u);
        }
    }
    let matrix = PadicMatrix::from_residues(ring.clone(), d, d, 0, residues).expect("square");
    GSpElement {
        matrix,
        similitude: PadicScalar {
            residue: u,
            precision,
            exact_zero: false,
        },
        similitude_shift: 0,
    }
}

/// `U · diag(p^λ) · V` with independent Haar `U, V ∈ GSp_{2n}(ℤₚ)` and balanced `λ`.
pub fn sample_bi_invariant_gsp(
    lambda: &Signature,
    p: Prime,
    precision: u32,
    src: &DigitSource,
) -> Result<GSpElement> {
    if lambda.is_empty() || !lambda.is_balanced() {
        return Err(Error::ConstraintViolated(format!(
            "{lambda} is not a balanced signature of even length"
        )));
    }
    let d = lambda.len();
    let u = sample_haar_gsp(d / 2, p, precision, &src.child("U"));
    let v = sample_haar_gsp(d / 2, p, precision, &src.child("V"));
    let diag = diag_signature(lambda, d, d, p, precision)?;
    let matrix = u.matrix.matmul(&diag)?.matmul(&v.matrix)?;
    let ring = matrix.ring().clone();
    let c = lambda.part(1) + lambda.part(d);
    let tail = lambda.part(d);
    // μ(D) = p^c, with the diagonal's own shift tail counted twice
    let mu_d = ring.p_power((c - 2 * tail) as u64);
    let residue = ring.mul(
        &ring.mul(&u.similitude.residue, &v.similitude.residue),
        &mu_d,
    );
    Ok(GSpElement {
        similitude: PadicScalar {
            residue,
            precision,
            exact_zero: false,
        },
        similitude_shift: 2 * matrix.shift(),
        matrix,
    })
}

/// `|SN(A^{(i)})|` for `i = 1..2n`.
pub fn gsp_corner_weights(a: &GSpElement) -> Result<IntVector> {
    corner_weights(&a.matrix)
}
