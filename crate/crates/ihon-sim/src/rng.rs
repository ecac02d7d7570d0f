//! Seeded random-number streams.
//!
//! Each traffic source owns its own [`RngStream`], derived from the run seed
//! plus a per-source tag, so the GST sample sequence is unaffected by how
//! many draws the SM source consumes. The generator is PCG64-MCG: seedable,
//! documented, and bit-exact on replay with the same seed.

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;
use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum SampleError {
    #[error("exponential mean must be positive, got {0}")]
    NonPositiveMean(f64),
    #[error("uniform range is empty: lo {lo} > hi {hi}")]
    EmptyRange { lo: u32, hi: u32 },
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: Pcg64Mcg,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            rng: Pcg64Mcg::seed_from_u64(seed),
        }
    }

    /// Stream `tag` of the run seeded with `base`. Distinct tags give
    /// independent sequences; identical (base, tag) replays exactly.
    pub fn substream(base: u64, tag: u64) -> Self {
        Self::new(splitmix64(
            base.wrapping_add(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        ))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Exponential variate with the given mean (same unit as the mean),
    /// by inverse transform on a uniform draw in [0, 1).
    pub fn exp(&mut self, mean: f64) -> Result<f64, SampleError> {
        if !mean.is_finite() || mean <= 0.0 {
            return Err(SampleError::NonPositiveMean(mean));
        }
        let u: f64 = self.rng.gen();
        Ok(-mean * (1.0 - u).ln())
    }

    /// Uniform integer in `[lo, hi]`, endpoints included and equiprobable.
    pub fn uniform_int(&mut self, lo: u32, hi: u32) -> Result<u32, SampleError> {
        if lo > hi {
            return Err(SampleError::EmptyRange { lo, hi });
        }
        Ok(self.rng.gen_range(lo..=hi))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
