//! Counter-based random streams.
//!
//! Every draw in this crate comes from a small generator keyed by
//! `(seed, replicate, step, lane)`. The key is avalanche-hashed into a
//! starting state and the stream is then a splitmix64 sequence, so any step
//! of any replicate can be opened independently of every other one. This is
//! what makes parallel and serial runs bit-identical: workers never share
//! generator state, they just open the streams they need.
//!
//! The `lane` separates independent uses of the same `(replicate, step)`
//! coordinate; e.g. a Gaussian fill step of a completed model must not
//! disturb the draws the base model would have made at that index.

use rand::{Error as RandError, RngCore};

/// Lane for the model's own step draws.
pub const LANE_MODEL: u64 = 0;
/// Lane for Gaussian fill steps appended by the completion construction.
pub const LANE_FILL: u64 = 1;
/// Lane for bootstrap resampling.
pub const LANE_BOOTSTRAP: u64 = 2;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

// Per-field salts; arbitrary odd constants so that permuting key fields
// cannot alias two streams.
const SALT_SEED: u64 = 0x243F_6A88_85A3_08D3;
const SALT_REPLICATE: u64 = 0x1319_8A2E_0370_7344;
const SALT_STEP: u64 = 0xA409_3822_299F_31D1;
const SALT_LANE: u64 = 0x082E_FA98_EC4E_6C89;

/// splitmix64 finalizer: a bijective 64-bit avalanche mix.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn absorb(h: u64, v: u64, salt: u64) -> u64 {
    mix64(h ^ mix64(v ^ salt))
}

/// A splitmix64 stream positioned by an avalanche hash of its key.
///
/// Streams are cheap to open (a handful of multiplies), which matters
/// because simulation opens one per path step.
#[derive(Clone, Debug)]
pub struct StreamRng {
    state: u64,
}

/// Open the stream for `(seed, replicate, step, lane)`.
pub fn stream(seed: u64, replicate: u64, step: u64, lane: u64) -> StreamRng {
    let mut h = mix64(seed ^ SALT_SEED);
    h = absorb(h, replicate, SALT_REPLICATE);
    h = absorb(h, step, SALT_STEP);
    h = absorb(h, lane, SALT_LANE);
    StreamRng { state: h }
}

/// Derive a child seed from a parent seed and a context tag. Used where a
/// whole sub-computation (e.g. bootstrap resampling) needs its own seed
/// space disjoint from path simulation.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    absorb(mix64(seed ^ SALT_SEED), tag, SALT_LANE)
}

impl RngCore for StreamRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let word = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&word[..chunk.len()]);
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), RandError> {
        self.fill_bytes(dest);
        Ok(())
    }
}
