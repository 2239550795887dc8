//! Seeded random streams.
//!
//! Every random quantity comes from ChaCha8 seeded with
//! `ChaCha8Rng::seed_from_u64(seed)` and switched to a numbered stream with
//! `set_stream`. Generators use the directed edge index `i * n + j` as the
//! stream number; the simulator uses the replica index. Uniform reals take
//! the top 53 bits of one `next_u64` draw.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

pub struct Stream(ChaCha8Rng);

impl Stream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * TWO_POW_NEG_53
    }

    /// Uniform on `(0, 1]`.
    #[inline]
    pub fn uniform_open_closed(&mut self) -> f64 {
        ((self.0.next_u64() >> 11) + 1) as f64 * TWO_POW_NEG_53
    }
}
