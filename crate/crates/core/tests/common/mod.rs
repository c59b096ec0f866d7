#![allow(dead_code)]

use padic_rmt::ensembles::{sample_bi_invariant, sample_corner_of_haar, AmbientDim, DigitSource};
use padic_rmt::padic::{smith_singular_numbers, PadicMatrix, Prime};
use padic_rmt::stats::SignatureHistogram;
use padic_rmt::Signature;

pub fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

pub fn sig(v: &[i64]) -> Signature {
    Signature::new(v.to_vec()).unwrap()
}

pub fn sn(a: &PadicMatrix) -> Signature {
    smith_singular_numbers(a).unwrap()
}

/// Histogram of `SN(A^{(k)})` over `count` bi-invariant draws with seeds `first..first+count`.
pub fn corner_histogram(
    lambda: &Signature,
    k: usize,
    p: Prime,
    first: u64,
    count: u64,
) -> SignatureHistogram {
    let n = lambda.len();
    let precision = 24 + lambda.spread() as u32;
    (first..first + count)
        .map(|seed| {
            let a = sample_bi_invariant(lambda, n, n, p, precision, &DigitSource::from_seed(seed))
                .unwrap();
            sn(&a.corner(k).unwrap())
        })
        .collect()
}

/// Histogram of `SN` of the top `n×m` block of Haar `GL_N(ℤₚ)`.
pub fn haar_corner_histogram(
    n: usize,
    m: usize,
    ambient: AmbientDim,
    p: Prime,
    count: u64,
) -> SignatureHistogram {
    (0..count)
        .map(|seed| {
            let a =
                sample_corner_of_haar(n, m, ambient, p, 32, &DigitSource::from_seed(seed)).unwrap();
            sn(&a)
        })
        .collect()
}
