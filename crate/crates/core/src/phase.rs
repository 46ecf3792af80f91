//! Discrete phase-shift codebooks and per-element phase alignment.

use std::f64::consts::{PI, TAU};

use crate::error::{check_len, Error, Result};
use crate::fading::{wrap_phase, ComplexCoefficient};

/// Uniform `2^b`-level codebook with levels at the cell midpoints
/// `(2i + 1) * delta / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCodebook {
    bits: u32,
    levels: u64,
    delta: f64,
}

impl PhaseCodebook {
    pub const MAX_BITS: u32 = 52;

    pub fn new(bits: u32) -> Result<Self> {
        if bits == 0 || bits > Self::MAX_BITS {
            return Err(Error::InvalidParameter(format!(
                "resolution bits must be in 1..={}, got {bits}",
                Self::MAX_BITS
            )));
        }
        let levels = 1u64 << bits;
        Ok(Self {
            bits,
            levels,
            delta: TAU / levels as f64,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> u64 {
        self.levels
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn level(&self, i: u64) -> f64 {
        (2 * i + 1) as f64 * self.delta / 2.0
    }

    /// All levels in ascending order. Only sensible for small `bits`.
    pub fn levels(&self) -> Vec<f64> {
        (0..self.levels).map(|i| self.level(i)).collect()
    }

    pub fn contains(&self, phase: f64) -> bool {
        let i = (phase / self.delta - 0.5).round();
        i >= 0.0 && (i as u64) < self.levels && (self.level(i as u64) - phase).abs() < 1e-12
    }
}

/// Phase resolution of an IRS: a finite codebook or ideal continuous
/// alignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseMode {
    Discrete(PhaseCodebook),
    Continuous,
}

impl PhaseMode {
    pub fn discrete(bits: u32) -> Result<Self> {
        PhaseCodebook::new(bits).map(PhaseMode::Discrete)
    }

    /// Bits of resolution, `None` for continuous.
    pub fn bits(&self) -> Option<u32> {
        match self {
            PhaseMode::Discrete(cb) => Some(cb.bits()),
            PhaseMode::Continuous => None,
        }
    }

    /// Maps an ideal phase onto what this mode can realise.
    #[inline]
    pub fn apply(&self, target: f64) -> f64 {
        match self {
            PhaseMode::Discrete(cb) => quantize(target, cb),
            PhaseMode::Continuous => wrap_phase(target),
        }
    }
}

/// Reflection amplitude and per-element phases of one IRS.
#[derive(Debug, Clone, PartialEq)]
pub struct IrsSetting {
    beta: f64,
    phases: Vec<f64>,
}

impl IrsSetting {
    pub fn new(beta: f64, phases: Vec<f64>, mode: &PhaseMode) -> Result<Self> {
        check_beta(beta)?;
        if let PhaseMode::Discrete(cb) = mode {
            if let Some(p) = phases.iter().find(|&&p| !cb.contains(p)) {
                return Err(Error::InvalidParameter(format!(
                    "phase {p} is not a level of the {}-bit codebook",
                    cb.bits()
                )));
            }
        }
        Ok(Self { beta, phases })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn elements(&self) -> usize {
        self.phases.len()
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "reflection amplitude beta must be in (0, 1], got {beta}"
        )));
    }
    Ok(())
}

/// Nearest codebook level below-and-centred: `delta * (floor(t / delta) + 1/2)`
/// with `t` reduced into `[0, 2pi)`.
#[inline]
pub fn quantize(target_phase: f64, cb: &PhaseCodebook) -> f64 {
    let t = wrap_phase(target_phase);
    let cell = ((t / cb.delta).floor() as u64).min(cb.levels - 1);
    cb.level(cell)
}

/// Signed circular difference `a - b` in `[-pi, pi)`.
#[inline]
pub fn circular_diff(a: f64, b: f64) -> f64 {
    (a - b + PI).rem_euclid(TAU) - PI
}

/// Ideal phase aligning element `k` of a link without direct path onto the
/// common reference `theta_tilde`.
#[inline]
pub(crate) fn ideal_phase(reference: f64, big_g: &ComplexCoefficient, g: &ComplexCoefficient) -> f64 {
    reference - big_g.phase - g.phase
}

/// Optimal phases when the user has no direct link to the BS.
pub fn optimal_phases_s1(
    big_g: &[ComplexCoefficient],
    g: &[ComplexCoefficient],
    mode: &PhaseMode,
    theta_tilde: f64,
) -> Result<Vec<f64>> {
    check_len(big_g.len(), g.len())?;
    Ok(big_g
        .iter()
        .zip(g)
        .map(|(a, b)| mode.apply(ideal_phase(theta_tilde, a, b)))
        .collect())
}

/// Optimal phases when a direct link `h` exists: every reflected term is
/// steered onto `arg(h)`.
pub fn optimal_phases_s2(
    h: &ComplexCoefficient,
    big_g: &[ComplexCoefficient],
    g: &[ComplexCoefficient],
    mode: &PhaseMode,
) -> Result<Vec<f64>> {
    optimal_phases_s1(big_g, g, mode, h.phase)
}
