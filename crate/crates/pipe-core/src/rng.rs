//! Deterministic random stream shared by parameter init, random graphs and
//! property runs.
//!
//! The generator is xoshiro256++ whose 256-bit state is filled from the 64-bit
//! seed by SplitMix64 (`rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64`).
//! Uniform reals in `[0, 1)` are `(next_u64 >> 11) * 2^-53`; nothing else
//! from `rand`'s distribution machinery is used, so streams are identical on
//! every platform.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::graphcore::Graph;

#[derive(Debug, Clone)]
pub struct Stream(Xoshiro256PlusPlus);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-s, s)`.
    pub fn symmetric(&mut self, s: f64) -> f64 {
        s * (2.0 * self.unit() - 1.0)
    }

    /// Uniform integer in `0..bound` by rejection, `bound > 0`.
    pub fn below(&mut self, bound: usize) -> usize {
        let bound = bound as u64;
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % bound) as usize;
            }
        }
    }

    /// Fisher-Yates permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.below(i + 1);
            p.swap(i, j);
        }
        p
    }

    /// Erdos-Renyi `G(n, p)`.
    pub fn gnp(&mut self, n: usize, p: f64) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if self.unit() < p {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(n, &edges).expect("generated edges are simple")
    }
}
