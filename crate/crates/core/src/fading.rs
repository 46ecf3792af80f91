//! Nakagami-m channel sampling and reproducible random streams.
//!
//! A Nakagami-m magnitude `X` with shape `m` and spread `omega` is drawn as
//! the square root of a gamma variate with shape `m` and mean `omega`, which
//! is valid for any real `m >= 0.5`. Complex coefficients pair that
//! magnitude with an independent phase, uniform on `[0, 2pi)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};

/// Shape and spread of one Nakagami-m link class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParam {
    m: f64,
    omega: f64,
}

impl FadingParam {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        if !(m >= 0.5) || !m.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Nakagami shape m must be >= 0.5, got {m}"
            )));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Nakagami spread omega must be > 0, got {omega}"
            )));
        }
        Ok(Self { m, omega })
    }

    /// Unit-power link with shape `m`.
    pub fn unit(m: f64) -> Result<Self> {
        Self::new(m, 1.0)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Prepared sampler; reuse it in hot loops instead of calling
    /// [`sample_nakagami_magnitude`] per draw.
    pub fn sampler(&self) -> NakagamiSampler {
        NakagamiSampler {
            power: Gamma::new(self.m, self.omega / self.m).expect("validated shape and scale are positive and finite"),
        }
    }
}

/// Polar form of a complex channel coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexCoefficient {
    pub magnitude: f64,
    pub phase: f64,
}

impl ComplexCoefficient {
    /// Builds a coefficient, reducing `phase` into `[0, 2pi)`.
    pub fn new(magnitude: f64, phase: f64) -> Result<Self> {
        if !(magnitude >= 0.0) || !magnitude.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "magnitude must be finite and >= 0, got {magnitude}"
            )));
        }
        Ok(Self {
            magnitude,
            phase: wrap_phase(phase),
        })
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }
}

/// Reduces an angle into `[0, 2pi)`.
pub fn wrap_phase(phase: f64) -> f64 {
    let r = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone)]
pub struct NakagamiSampler {
    power: Gamma<f64>,
}

impl NakagamiSampler {
    /// Squared magnitude, gamma-distributed with shape m and mean omega.
    #[inline]
    pub fn sample_power<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.power.sample(rng)
    }

    #[inline]
    pub fn sample_magnitude<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_power(rng).sqrt()
    }

    #[inline]
    pub fn sample_complex<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexCoefficient {
        let magnitude = self.sample_magnitude(rng);
        let phase = uniform_phase(rng);
        ComplexCoefficient { magnitude, phase }
    }
}

#[inline]
pub(crate) fn uniform_phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let phase = rng.random::<f64>() * TAU;
    if phase >= TAU {
        0.0
    } else {
        phase
    }
}

pub fn sample_nakagami_magnitude<R: Rng + ?Sized>(p: &FadingParam, rng: &mut R) -> f64 {
    p.sampler().sample_magnitude(rng)
}

pub fn sample_complex<R: Rng + ?Sized>(p: &FadingParam, rng: &mut R) -> ComplexCoefficient {
    p.sampler().sample_complex(rng)
}

/// A deterministic random stream addressed by `(seed, stream_id)`.
///
/// Streams with equal seeds but distinct ids are independent ChaCha8
/// streams over the same key.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}
