//! Seeded randomness for sweeps. The generator is SplitMix64, so streams are
//! identical on every platform.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::dense::C64;

pub struct CaseRng(SplitMix64);

impl CaseRng {
    pub fn new(seed: u64) -> Self {
        CaseRng(SplitMix64::seed_from_u64(seed))
    }

    /// Stream for one sweep case; distinct `(n, alpha, case)` give unrelated streams.
    pub fn for_case(seed: u64, n: usize, alpha: usize, case: usize) -> Self {
        let mut mix = SplitMix64::seed_from_u64(seed);
        let mut h = mix.next_u64();
        for v in [n as u64, alpha as u64, case as u64] {
            h = SplitMix64::seed_from_u64(h ^ v).next_u64();
        }
        CaseRng::new(h)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[-1, 1)`.
    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }

    /// Real and imaginary parts independent, uniform on `[-1, 1)`.
    pub fn complex(&mut self) -> C64 {
        let re = self.symmetric();
        C64::new(re, self.symmetric())
    }

    pub fn complex_vec(&mut self, len: usize) -> Vec<C64> {
        (0..len).map(|_| self.complex()).collect()
    }
}
