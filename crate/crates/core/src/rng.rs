//! Deterministic, splittable random streams.
//!
//! Every random quantity in the crate (Gaussian probes, Rademacher start
//! vectors, sign flips, uniform index draws) comes from an [`RngStream`]
//! identified by `(seed, stream_id)`. The underlying generator is ChaCha20
//! keyed from the seed, with the stream id selecting ChaCha's 64-bit stream
//! (nonce). Child streams are derived with [`RngStream::derive`], which
//! hashes the parent id with the child index, so parallel workers never
//! share state and every draw sequence is a pure function of its stream.
//!
//! Frozen conventions (tests pin seeds against them):
//!
//! * uniform doubles use the top 53 bits of a `u64`;
//! * Gaussians use Box–Muller on `u1 ∈ (0, 1]`, `u2 ∈ [0, 1)`, emitting
//!   `r·cos(2πu2)` then `r·sin(2πu2)` with `r = sqrt(-2 ln u1)`;
//! * Rademacher signs take the lowest bit of successive `u64` words
//!   (1 → +1, 0 → −1);
//! * bounded indices use Lemire's multiply-and-reject method.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Identifies one reproducible random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Root stream for a seed.
    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, 0)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Child stream number `index`. Pure: same parent and index, same child.
    pub fn derive(&self, index: u64) -> RngStream {
        let id = splitmix64(self.stream_id.wrapping_mul(GOLDEN) ^ splitmix64(index ^ 0xD1B5_4A32_D192_ED03));
        RngStream::new(self.seed, id)
    }

    /// A fresh sampler positioned at the start of this stream.
    pub fn sampler(&self) -> Sampler {
        let mut key = [0u8; 32];
        let mut state = self.seed;
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(self.stream_id);
        Sampler { rng, spare: None }
    }
}

/// Stateful reader over one stream. Not meant to be shared across workers.
pub struct Sampler {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl Sampler {
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (0, 1].
    fn uniform_open_zero(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform_open_zero();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (sin, cos) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * sin);
        r * cos
    }

    pub fn sign(&mut self) -> f64 {
        if self.next_u64() & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    /// Unbiased draw from `[0, bound)`; `bound` must be nonzero.
    pub fn index(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        let bound = bound as u64;
        let mut product = (self.next_u64() as u128) * (bound as u128);
        let mut low = product as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                product = (self.next_u64() as u128) * (bound as u128);
                low = product as u64;
            }
        }
        (product >> 64) as usize
    }

    pub fn fill_gaussian(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.gaussian();
        }
    }
}

/// `n` i.i.d. standard normal draws from the start of `stream`.
pub fn gaussian_vector(stream: &RngStream, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let mut sampler = stream.sampler();
    Ok((0..n).map(|_| sampler.gaussian()).collect())
}

/// `n` i.i.d. uniform signs in {+1, −1}.
pub fn rademacher_vector(stream: &RngStream, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let mut sampler = stream.sampler();
    Ok((0..n).map(|_| sampler.sign()).collect())
}

/// First uniform index in `[0, bound)` drawn from `stream`.
pub fn uniform_index(stream: &RngStream, bound: usize) -> Result<usize> {
    if bound == 0 {
        return Err(Error::InvalidParameter("uniform_index bound must be at least 1".into()));
    }
    Ok(stream.sampler().index(bound))
}
