//! Deterministic random streams.
//!
//! Every stochastic step in the library draws from a ChaCha8 generator keyed
//! by the caller's 64-bit seed, with a fixed 64-bit stream id per purpose:
//! `stream = (purpose << 32) | index`. Two runs with the same seed therefore
//! reproduce every draw bit for bit, independent of thread scheduling, and
//! other implementations can reproduce the streams from (seed, purpose,
//! index) alone.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream purposes. The numeric values are part of the reproducibility
/// contract and must not be renumbered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamPurpose {
    /// Subspace basis draws in synthetic data generation (index = subspace).
    Basis = 1,
    /// In-subspace point coefficient draws (index = subspace).
    Points = 2,
    /// Bernoulli dropout masks (index = subproblem t).
    Masks = 3,
    /// k-means++ initialization (index = restart).
    KmeansInit = 4,
    /// Monte-Carlo dropout objective samples (index = 0).
    MonteCarlo = 5,
    /// Iterative eigensolver start vectors (index = attempt).
    Eigs = 6,
}

/// Generator for `(seed, purpose, index)`.
pub fn stream_rng(seed: u64, purpose: StreamPurpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 32) | (index & 0xFFFF_FFFF));
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = stream_rng(7, StreamPurpose::Masks, 3);
        let mut b = stream_rng(7, StreamPurpose::Masks, 3);
        let mut c = stream_rng(7, StreamPurpose::Masks, 4);
        let xs: Vec<u64> = (0..8).map(|_| a.gen()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.gen()).collect();
        let zs: Vec<u64> = (0..8).map(|_| c.gen()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }
}
