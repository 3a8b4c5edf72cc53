//! Seeded random streams.
//!
//! All randomness comes from SplitMix64 (Steele, Lea & Flood 2014), a 64-bit
//! generator whose state is a single counter, so any language can reproduce
//! the streams bit for bit:
//!
//! * uniform: `((x >> 11) + 0.5) · 2⁻⁵³`, strictly inside `(0, 1)`;
//! * normal: Box–Muller cosine branch on two consecutive uniforms,
//!   `sqrt(-2 ln u₁) · cos(2π u₂)`;
//! * split: a child stream seeded with the parent's next raw output.

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

const TWO_POW_MINUS_53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Clone, Debug)]
pub struct SeededRng(SplitMix64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * TWO_POW_MINUS_53
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn normals(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    /// Independent child stream.
    pub fn split(&mut self) -> Self {
        Self::new(self.next_u64())
    }
}
