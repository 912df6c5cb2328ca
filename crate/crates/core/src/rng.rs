//! Seeded random source shared by dataset generation and training.
//!
//! The generator is PCG XSL-RR 128/64 (`rand_pcg::Pcg64`, LCG multiplier
//! `0x2360ed051fc65da44385df649fccf645`). A `u64` seed `s` is expanded into
//! the 128-bit state `(s << 64) | (s ^ 0x9e3779b97f4a7c15)` on the fixed
//! stream `0xa02bdbf7bb3c0a7ac28fa16a64abf96`. Uniform doubles take the top
//! 53 bits of each output; normals use the Box-Muller cosine branch with no
//! cached second value. Every derived quantity is therefore reproducible from
//! these constants alone.

use rand::RngCore;
use rand_pcg::Pcg64;

const SEED_MIX: u64 = 0x9e37_79b9_7f4a_7c15;
const STREAM: u128 = 0x0a02_bdbf_7bb3_c0a7_ac28_fa16_a64a_bf96;

#[derive(Clone, Debug)]
pub struct SeededRng(Pcg64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        let state = ((seed as u128) << 64) | (seed ^ SEED_MIX) as u128;
        SeededRng(Pcg64::new(state, STREAM))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        // 1 - u lies in (0, 1], so the log is finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform index in `0..n` (`n > 0`).
    pub fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    /// Fisher-Yates, last position first.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// `k` distinct indices from `0..n`, in draw order.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        let k = k.min(n);
        for i in 0..k {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}
