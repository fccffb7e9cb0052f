//! Counter-based random streams.
//!
//! Every random draw in the crate is addressed by `(seed, domain, index)`:
//! the seed and domain pick a ChaCha key, the index picks the ChaCha stream.
//! Bootstrap sample `i` therefore sees the same numbers no matter which
//! thread produces it or in which order samples are evaluated.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

/// Separates independent consumers of the run-level seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Bootstrap = 1,
    SimIdeal = 2,
    SimRandom = 3,
    Jitter = 4,
    PodiumTies = 5,
    Layout = 6,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// One independent random stream.
#[derive(Debug, Clone)]
pub struct Stream {
    inner: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64, domain: Domain, index: u64) -> Self {
        let key = splitmix64(seed ^ splitmix64(domain as u64));
        let mut inner = ChaCha8Rng::seed_from_u64(key);
        inner.set_stream(index);
        Self { inner }
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform integer in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        self.inner.random_range(0..n as u64) as usize
    }

    /// Standard normal variate by inverting the normal CDF of a uniform draw.
    pub fn standard_normal(&mut self) -> f64 {
        let standard = Normal::standard();
        loop {
            let u = self.uniform();
            // 0 maps to -inf
            if u > 0.0 {
                return standard.inverse_cdf(u);
            }
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_addressable() {
        let a: Vec<u64> = (0..4).map(|_| Stream::new(7, Domain::Bootstrap, 3).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut s3 = Stream::new(7, Domain::Bootstrap, 3);
        let mut s4 = Stream::new(7, Domain::Bootstrap, 4);
        assert_ne!(s3.next_u64(), s4.next_u64());
        let mut other = Stream::new(7, Domain::Jitter, 3);
        assert_ne!(Stream::new(7, Domain::Bootstrap, 3).next_u64(), other.next_u64());
    }

    #[test]
    fn normal_moments() {
        let mut s = Stream::new(11, Domain::SimRandom, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| s.standard_normal()).collect();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!(m.abs() < 0.03, "mean {m}");
        assert!((v - 1.0).abs() < 0.05, "var {v}");
    }
}
