//! Deterministic random streams.
//!
//! One master seed drives every experiment. A child stream is addressed by
//! `(trial, purpose, antenna)`: the ChaCha8 key is the SplitMix64 expansion
//! of `(master, trial)`, and the 64-bit ChaCha stream id is
//! `purpose << 32 | antenna`. Streams therefore never depend on the order in
//! which trials or antennas are processed, so parallel and sequential runs
//! draw identical numbers.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::scalar::{lit, Real};

pub type Stream = ChaCha8Rng;

/// What a stream is used for. The discriminant is part of the stream id and
/// must never be reordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u32)]
pub enum Purpose {
    Geometry = 1,
    Waveform = 2,
    JammerWaveform = 3,
    Measurement = 4,
    Noise = 5,
    Scene = 6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub trial: u64,
    pub purpose: Purpose,
    pub antenna: u32,
}

impl StreamKey {
    pub fn new(trial: u64, purpose: Purpose) -> Self {
        Self {
            trial,
            purpose,
            antenna: 0,
        }
    }

    pub fn antenna(mut self, antenna: usize) -> Self {
        self.antenna = antenna as u32;
        self
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the child stream for `key` from `master`.
pub fn derive_stream(master: u64, key: StreamKey) -> Stream {
    let mut state = master;
    let mut state = splitmix64(&mut state) ^ key.trial.wrapping_mul(0xD1B5_4A32_D192_ED03);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream((u64::from(key.purpose as u32) << 32) | u64::from(key.antenna));
    rng
}

/// Circularly-symmetric complex Gaussian with total variance `variance`
/// (each of the real and imaginary parts has variance `variance / 2`).
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, variance: T) -> Complex<T> {
    let scale = (variance / lit(2.0)).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(lit::<T>(re) * scale, lit::<T>(im) * scale)
}

pub fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    lit(rng.random::<f64>())
}
