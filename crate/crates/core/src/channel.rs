//! Per-user channel realizations, equivalent gains and their ordering.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{check_len, Error, Result};
use crate::fading::{ComplexCoefficient, FadingParam, NakagamiSampler};
use crate::phase::{check_beta, ideal_phase, optimal_phases_s1, optimal_phases_s2, IrsSetting, PhaseMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Users are reached only through their IRS.
    NoDirectLink,
    /// Users additionally receive a direct BS signal.
    WithDirectLink,
}

impl Scenario {
    pub fn label(&self) -> &'static str {
        match self {
            Scenario::NoDirectLink => "1",
            Scenario::WithDirectLink => "2",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "i" | "no-direct-link" | "nodirectlink" => Ok(Scenario::NoDirectLink),
            "2" | "ii" | "with-direct-link" | "withdirectlink" => Ok(Scenario::WithDirectLink),
            other => Err(Error::Config(format!("unknown scenario '{other}'"))),
        }
    }
}

/// Geometry, phase resolution and fading of one multi-IRS NOMA group.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub scenario: Scenario,
    /// Users, one IRS each.
    pub users: usize,
    /// Reflecting elements per IRS.
    pub elements: usize,
    pub mode: PhaseMode,
    pub beta: f64,
    /// BS to IRS links.
    pub bs_irs: FadingParam,
    /// IRS to user links.
    pub irs_user: FadingParam,
    /// BS to user links, only drawn in [`Scenario::WithDirectLink`].
    pub direct: FadingParam,
    /// Common reference phase used when there is no direct link.
    pub theta_tilde: f64,
}

impl ScenarioParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        scenario: Scenario,
        users: usize,
        elements: usize,
        mode: PhaseMode,
        beta: f64,
        m_big_g: f64,
        m_g: f64,
        m_h: f64,
    ) -> Result<Self> {
        let p = Self {
            scenario,
            users,
            elements,
            mode,
            beta,
            bs_irs: FadingParam::unit(m_big_g)?,
            irs_user: FadingParam::unit(m_g)?,
            direct: FadingParam::unit(m_h)?,
            theta_tilde: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// N = 2, K = 2, b = 3, beta = 0.9, m_G = 2, m_g = 1, m_h = 1.
    pub fn defaults(scenario: Scenario) -> Self {
        Self::new(
            scenario,
            2,
            2,
            PhaseMode::discrete(3).expect("3 bits is valid"),
            0.9,
            2.0,
            1.0,
            1.0,
        )
        .expect("default parameters are valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.users == 0 {
            return Err(Error::InvalidParameter("need at least one user".into()));
        }
        if self.elements == 0 {
            return Err(Error::InvalidParameter("need at least one reflecting element".into()));
        }
        check_beta(self.beta)
    }

    pub fn with_mode(&self, mode: PhaseMode) -> Self {
        Self { mode, ..self.clone() }
    }

    pub fn has_direct_link(&self) -> bool {
        self.scenario == Scenario::WithDirectLink
    }
}

/// All links of one user.
#[derive(Debug, Clone, PartialEq)]
pub struct UserChannel {
    pub big_g: Vec<ComplexCoefficient>,
    pub g: Vec<ComplexCoefficient>,
    pub h: Option<ComplexCoefficient>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub users: Vec<UserChannel>,
}

impl ChannelRealization {
    pub fn draw<R: Rng + ?Sized>(params: &ScenarioParams, rng: &mut R) -> Self {
        let s = LinkSamplers::new(params);
        let users = (0..params.users)
            .map(|_| {
                let h = params.has_direct_link().then(|| s.direct.sample_complex(rng));
                let (big_g, g) = (0..params.elements)
                    .map(|_| (s.bs_irs.sample_complex(rng), s.irs_user.sample_complex(rng)))
                    .unzip();
                UserChannel { big_g, g, h }
            })
            .collect();
        Self { users }
    }
}

impl UserChannel {
    /// Optimal IRS setting for this user under `params.mode`.
    pub fn optimal_setting(&self, params: &ScenarioParams) -> Result<IrsSetting> {
        let phases = match &self.h {
            Some(h) => optimal_phases_s2(h, &self.big_g, &self.g, &params.mode)?,
            None => optimal_phases_s1(&self.big_g, &self.g, &params.mode, params.theta_tilde)?,
        };
        IrsSetting::new(params.beta, phases, &params.mode)
    }

    /// Equivalent gain with the optimal setting applied.
    pub fn gain(&self, params: &ScenarioParams) -> Result<f64> {
        let setting = self.optimal_setting(params)?;
        match &self.h {
            Some(h) => equivalent_gain_s2(h, &self.big_g, &self.g, &setting),
            None => equivalent_gain_s1(&self.big_g, &self.g, &setting),
        }
    }
}

fn reflected_sum(big_g: &[ComplexCoefficient], g: &[ComplexCoefficient], setting: &IrsSetting) -> Result<Complex64> {
    check_len(big_g.len(), g.len())?;
    check_len(big_g.len(), setting.elements())?;
    Ok(big_g
        .iter()
        .zip(g)
        .zip(setting.phases())
        .map(|((a, b), &theta)| a.to_complex() * b.to_complex() * Complex64::from_polar(1.0, theta))
        .sum::<Complex64>()
        * setting.beta())
}

/// `beta * |sum_k G_k g_k e^{j theta_k}|`.
pub fn equivalent_gain_s1(big_g: &[ComplexCoefficient], g: &[ComplexCoefficient], setting: &IrsSetting) -> Result<f64> {
    Ok(reflected_sum(big_g, g, setting)?.norm())
}

/// `|h + beta * sum_k G_k g_k e^{j theta_k}|`.
pub fn equivalent_gain_s2(
    h: &ComplexCoefficient,
    big_g: &[ComplexCoefficient],
    g: &[ComplexCoefficient],
    setting: &IrsSetting,
) -> Result<f64> {
    Ok((h.to_complex() + reflected_sum(big_g, g, setting)?).norm())
}

/// Gains sorted ascending, with `permutation[i]` the zero-based original
/// user index of `gains[i]`. Ties keep original index order.
#[derive(Debug, Clone, PartialEq)]
pub struct GainVector {
    pub gains: Vec<f64>,
    pub permutation: Vec<usize>,
}

impl GainVector {
    pub fn from_unordered(unordered: &[f64]) -> Self {
        let mut permutation: Vec<usize> = (0..unordered.len()).collect();
        permutation.sort_by(|&a, &b| unordered[a].total_cmp(&unordered[b]).then(a.cmp(&b)));
        let gains = permutation.iter().map(|&i| unordered[i]).collect();
        Self { gains, permutation }
    }
}

/// How per-element phase errors are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GainPath {
    /// Draw complex coefficients and apply the quantized phases.
    #[default]
    FullComplex,
    /// Draw magnitudes only and sample each element's residual phase error
    /// uniformly on `[-delta/2, delta/2)`.
    UniformError,
}

#[derive(Debug, Clone)]
struct LinkSamplers {
    bs_irs: NakagamiSampler,
    irs_user: NakagamiSampler,
    direct: NakagamiSampler,
}

impl LinkSamplers {
    fn new(p: &ScenarioParams) -> Self {
        Self {
            bs_irs: p.bs_irs.sampler(),
            irs_user: p.irs_user.sampler(),
            direct: p.direct.sampler(),
        }
    }
}

/// Hot-loop gain generator. Produces the same values as drawing a
/// [`ChannelRealization`] and calling [`UserChannel::gain`], without
/// allocating.
#[derive(Debug, Clone)]
pub struct GainSampler {
    params: ScenarioParams,
    links: LinkSamplers,
    path: GainPath,
}

impl GainSampler {
    pub fn new(params: &ScenarioParams) -> Self {
        Self::with_path(params, GainPath::FullComplex)
    }

    pub fn with_path(params: &ScenarioParams, path: GainPath) -> Self {
        Self {
            params: params.clone(),
            links: LinkSamplers::new(params),
            path,
        }
    }

    pub fn params(&self) -> &ScenarioParams {
        &self.params
    }

    /// One user's gain under `params.mode`.
    #[inline]
    pub fn user_gain<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.user_gains_in(rng, &[self.params.mode])[0]
    }

    /// One channel draw evaluated under up to four phase modes at once
    /// (matched realizations).
    pub fn user_gains_in<R: Rng + ?Sized>(&self, rng: &mut R, modes: &[PhaseMode]) -> [f64; 4] {
        assert!(modes.len() <= 4, "at most four phase modes per draw");
        let p = &self.params;
        let mut acc = [Complex64::new(0.0, 0.0); 4];
        match self.path {
            GainPath::FullComplex => {
                let h = p.has_direct_link().then(|| self.links.direct.sample_complex(rng));
                let reference = h.map_or(p.theta_tilde, |h| h.phase);
                for _ in 0..p.elements {
                    let a = self.links.bs_irs.sample_complex(rng);
                    let b = self.links.irs_user.sample_complex(rng);
                    let amp = a.magnitude * b.magnitude;
                    let ideal = ideal_phase(reference, &a, &b);
                    for (slot, mode) in acc.iter_mut().zip(modes) {
                        let theta = mode.apply(ideal);
                        *slot += Complex64::from_polar(amp, a.phase + b.phase + theta);
                    }
                }
                for slot in acc.iter_mut().take(modes.len()) {
                    *slot *= p.beta;
                    if let Some(h) = h {
                        *slot += h.to_complex();
                    }
                }
            }
            GainPath::UniformError => {
                let h = p.has_direct_link().then(|| self.links.direct.sample_magnitude(rng));
                for _ in 0..p.elements {
                    let amp = self.links.bs_irs.sample_magnitude(rng) * self.links.irs_user.sample_magnitude(rng);
                    let u: f64 = rng.random();
                    for (slot, mode) in acc.iter_mut().zip(modes) {
                        let err = match mode {
                            PhaseMode::Discrete(cb) => (u - 0.5) * cb.delta(),
                            PhaseMode::Continuous => 0.0,
                        };
                        *slot += Complex64::from_polar(amp, err);
                    }
                }
                for slot in acc.iter_mut().take(modes.len()) {
                    *slot *= p.beta;
                    if let Some(h) = h {
                        *slot += h;
                    }
                }
            }
        }
        acc.map(|c| c.norm())
    }

    /// Fills `out` with one independent gain per user (unordered).
    pub fn unordered_gains<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for slot in out.iter_mut() {
            *slot = self.user_gain(rng);
        }
    }
}

/// Draws one fresh realization per user, applies optimal phases and sorts.
pub fn draw_ordered_gains<R: Rng + ?Sized>(params: &ScenarioParams, rng: &mut R) -> GainVector {
    let sampler = GainSampler::new(params);
    let mut gains = vec![0.0; params.users];
    sampler.unordered_gains(rng, &mut gains);
    GainVector::from_unordered(&gains)
}
