//! Counter-based random numbers for reproducible parallel ensembles.
//!
//! Every draw is a pure function of `(seed, stream, counter)`, so a path is
//! reproduced bit-for-bit from its key alone, no matter how work is split
//! across threads. Gaussians come from a Box-Muller pair of counter-indexed
//! uniforms; each call consumes exactly two counters.

use crate::algebra::Vec3;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer; passes the usual statistical batteries.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of path `path_index` from an ensemble master seed.
/// Nested by construction: adding paths never re-keys existing ones.
pub fn path_seed(master_seed: u64, path_index: u64) -> u64 {
    mix64(mix64(master_seed) ^ path_index.wrapping_mul(GOLDEN))
}

/// A deterministic Gaussian stream keyed by `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    key: u64,
    counter: u64,
}

impl GaussianStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        // the nonlinear mix between seed and stream keeps distinct streams
        // from being shifted copies of one another
        GaussianStream {
            key: mix64(mix64(seed) ^ stream.wrapping_mul(GOLDEN)),
            counter: 0,
        }
    }

    fn next_u64(&mut self) -> u64 {
        let v = mix64(self.key ^ self.counter.wrapping_mul(GOLDEN));
        self.counter = self.counter.wrapping_add(1);
        v
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Standard normal draw (Box-Muller, cosine branch).
    pub fn next_gaussian(&mut self) -> f64 {
        // u1 in (0, 1] so the logarithm is finite
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0);
        let u2 = self.next_uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Three independent standard normals.
    pub fn next_gaussian_vec3(&mut self) -> Vec3 {
        Vec3::new(self.next_gaussian(), self.next_gaussian(), self.next_gaussian())
    }
}
