//! Reproducible random streams.
//!
//! A [`SeededRng`] is keyed by `(master_seed, stream_id)`. The underlying
//! generator is ChaCha12, a counter-based cipher stream: the master seed
//! selects the key, the stream id selects the nonce and the block counter
//! advances with every draw. Two generators with the same key and stream
//! produce the same sequence on every platform; distinct stream ids give
//! independent sequences, which is how Monte-Carlo trials are decoupled.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

#[derive(Clone, Debug)]
pub struct SeededRng {
    master_seed: u64,
    stream_id: u64,
    inner: ChaCha12Rng,
}

impl SeededRng {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            inner,
        }
    }

    /// Fresh generator on another stream of the same master seed.
    pub fn with_stream(&self, stream_id: u64) -> Self {
        Self::new(self.master_seed, stream_id)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`.
    fn uniform_nonzero(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Circularly-symmetric complex Gaussian CN(0, 1) by Box-Muller:
    /// real and imaginary parts are independent N(0, 1/2).
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let radius = (-self.uniform_nonzero().ln()).sqrt();
        let angle = 2.0 * PI * self.uniform();
        Complex64::from_polar(radius, angle)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.complex_gaussian().re * std::f64::consts::SQRT_2
    }
}

/// `n` i.i.d. CN(0, 1) samples.
pub fn sample_complex_gaussian(rng: &mut SeededRng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| rng.complex_gaussian()).collect()
}
