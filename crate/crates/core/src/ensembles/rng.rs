//! Reproducible digit streams.
//!
//! Every random object is addressed by a path: `(master_seed, stream_index, step)` is
//! hashed with SHA-256 into a 256-bit key, sub-objects derive child keys by hashing the
//! parent key with a tag, and each matrix entry reads from its own ChaCha8 stream selected
//! by a 64-bit label. Residues are assembled least-significant digit first from fixed-size
//! chunks, so the first `N` digits of an entry do not depend on `N`; re-drawing a step at a
//! higher precision extends the same numbers.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::padic::{Prime, ResidueRing};

const DOMAIN: &[u8] = b"padic-rmt/v1";

/// A named stream of randomness: one per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngStream {
            master_seed,
            stream_index,
        }
    }

    /// Randomness for step `k` of this stream.
    pub fn step(&self, k: u64) -> DigitSource {
        let mut h = Sha256::new();
        h.update(DOMAIN);
        h.update(self.master_seed.to_le_bytes());
        h.update(self.stream_index.to_le_bytes());
        h.update(k.to_le_bytes());
        DigitSource {
            key: h.finalize().into(),
        }
    }

    /// A general-purpose generator for this stream, independent of every step source.
    pub fn rng(&self) -> ChaCha8Rng {
        self.step(u64::MAX).child("aux").entry_rng(0)
    }
}

/// A 256-bit key from which entry streams and child sources are derived.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitSource {
    key: [u8; 32],
}

impl DigitSource {
    pub fn from_seed(seed: u64) -> Self {
        RngStream::new(seed, 0).step(0)
    }

    pub fn child(&self, tag: &str) -> DigitSource {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update((tag.len() as u64).to_le_bytes());
        h.update(tag.as_bytes());
        DigitSource {
            key: h.finalize().into(),
        }
    }

    pub fn child_index(&self, index: u64) -> DigitSource {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update(b"#");
        h.update(index.to_le_bytes());
        DigitSource {
            key: h.finalize().into(),
        }
    }

    pub fn entry_rng(&self, label: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(label);
        rng
    }

    /// Uniform residue modulo `p^N` on the stream `label`.
    pub fn residue(&self, label: u64, ring: &ResidueRing) -> BigUint {
        let mut rng = self.entry_rng(label);
        sample_uniform_residue(&mut rng, ring.prime(), ring.precision())
    }
}

/// Packs `(tag, attempt, i, j)` into one stream label.
pub fn entry_label(tag: u8, attempt: u32, i: usize, j: usize) -> u64 {
    ((tag as u64) << 56)
        | (((attempt as u64) & 0xFF_FFFF) << 32)
        | (((i as u64) & 0xFFFF) << 16)
        | ((j as u64) & 0xFFFF)
}

/// Number of base-`p` digits drawn per 64-bit chunk, and `p^digits` (`None` for `2^64`).
fn chunk_shape(p: u64) -> (u32, Option<u64>) {
    let mut c = 0u32;
    let mut acc: u128 = 1;
    while acc * (p as u128) <= 1u128 << 64 {
        acc *= p as u128;
        c += 1;
    }
    (c, u64::try_from(acc).ok())
}

/// `N` i.i.d. uniform base-`p` digits, least significant first, as an integer in `[0, p^N)`.
pub fn sample_uniform_residue<R: RngCore>(rng: &mut R, p: Prime, precision: u32) -> BigUint {
    let pv = p.get();
    let (c, bound) = chunk_shape(pv);
    let chunks = precision.div_ceil(c);
    let mut words: Vec<u64> = Vec::with_capacity(chunks as usize);
    for _ in 0..chunks {
        words.push(match bound {
            None => rng.next_u64(),
            Some(b) => rng.gen_range(0..b),
        });
    }
    let mut value = if bound.is_none() {
        let digits: Vec<u32> = words
            .iter()
            .flat_map(|w| [*w as u32, (*w >> 32) as u32])
            .collect();
        BigUint::from_slice(&digits)
    } else {
        let base = BigUint::from(bound.unwrap_or(0));
        let mut acc = BigUint::zero();
        for w in words.iter().rev() {
            acc = acc * &base + BigUint::from(*w);
        }
        acc
    };
    let total_digits = chunks * c;
    if total_digits > precision {
        let modulus = BigUint::from(pv).pow(precision);
        value %= modulus;
    }
    value
}
