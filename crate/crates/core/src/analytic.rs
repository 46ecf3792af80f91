//! High-SNR asymptotics: small-argument CDF constants, ordered-gain CDFs,
//! NOMA decoding thresholds, outage bounds and diversity orders.
//!
//! Near the origin the unordered gain's lower bound behaves like
//! `F(y) ~ xi * y^d` where `d = 2 m_s K` without a direct link and
//! `d = 2 m_h + 2 m_s K` with one. The discrete-phase bound uses
//! `a = beta cos(pi / 2^b)` and is an upper bound on outage; replacing `a`
//! with `beta` gives the continuous-phase value, which lower-bounds it.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::channel::{Scenario, ScenarioParams};
use crate::error::{check_len, Error, Result};
use crate::phase::PhaseMode;
use crate::special::ln_gamma_unchecked as ln_gamma;

/// Largest group size for which binomial weights are computed exactly.
pub const MAX_ANALYTIC_USERS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Noma,
    Oma,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Noma => "noma",
            Scheme::Oma => "oma",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "noma" => Ok(Scheme::Noma),
            "oma" => Ok(Scheme::Oma),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// `n choose k`, exact.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    // each partial product is itself a binomial coefficient, so the division is exact
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConstants {
    pub m_s: f64,
    pub m_l: f64,
    pub m_h: f64,
    pub elements: usize,
    pub beta: f64,
    /// `beta cos(pi / 2^b)`, or `beta` for continuous phases.
    pub a: f64,
    /// Leading coefficient of a single product-of-Nakagami term's Laplace
    /// transform, `L(s) ~ phi2 s^{-2 m_s}`.
    pub phi2: f64,
    pub zeta1: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub zeta2: f64,
    pub xi3: f64,
    pub xi4: f64,
}

impl AsymptoticConstants {
    pub fn new(params: &ScenarioParams) -> Result<Self> {
        params.validate()?;
        for (name, f) in [("m_G", params.bs_irs), ("m_g", params.irs_user), ("m_h", params.direct)] {
            if f.omega() != 1.0 {
                return Err(Error::UnsupportedParameters(format!(
                    "closed forms assume unit-power links, {name} has omega = {}",
                    f.omega()
                )));
            }
        }
        let (m_big_g, m_g) = (params.bs_irs.m(), params.irs_user.m());
        if m_big_g == m_g {
            return Err(Error::UnsupportedParameters(format!(
                "closed forms need m_G != m_g, both are {m_g}"
            )));
        }
        let a = match params.mode {
            PhaseMode::Discrete(cb) if cb.bits() < 2 => {
                return Err(Error::UnsupportedParameters(
                    "closed forms need at least 2 resolution bits".into(),
                ))
            }
            PhaseMode::Discrete(cb) => params.beta * (PI / f64::from(1u32 << cb.bits().min(31))).cos(),
            PhaseMode::Continuous => params.beta,
        };
        let m_s = m_big_g.min(m_g);
        let m_l = m_big_g.max(m_g);
        let m_h = params.direct.m();
        let k = params.elements as f64;
        let beta = params.beta;

        let ln_phi2 = 0.5 * PI.ln()
            + (m_s - m_l + 1.0) * 4f64.ln()
            + m_s * (m_s * m_l).ln()
            + ln_gamma(2.0 * m_s)
            + ln_gamma(2.0 * m_l - 2.0 * m_s)
            - ln_gamma(m_s)
            - ln_gamma(m_l)
            - ln_gamma(m_l - m_s + 0.5);

        let d1 = 2.0 * m_s * k;
        let ln_zeta1 = k * ln_phi2 - d1.ln() - ln_gamma(d1);

        let d2 = 2.0 * m_h + d1;
        let ln_zeta2 =
            m_h * (2.0 * m_h).ln() + ln_gamma(2.0 * m_h) + k * ln_phi2 - d2.ln() - ln_gamma(m_h) - ln_gamma(d2);

        let ln_a_pow = d1 * a.ln();
        let ln_beta_pow = d1 * beta.ln();

        let c = Self {
            m_s,
            m_l,
            m_h,
            elements: params.elements,
            beta,
            a,
            phi2: ln_phi2.exp(),
            zeta1: ln_zeta1.exp(),
            xi1: (ln_zeta1 - ln_a_pow).exp(),
            xi2: (ln_zeta1 - ln_beta_pow).exp(),
            zeta2: ln_zeta2.exp(),
            xi3: (ln_zeta2 - ln_a_pow).exp(),
            xi4: (ln_zeta2 - ln_beta_pow).exp(),
        };
        let all = [c.phi2, c.zeta1, c.xi1, c.xi2, c.zeta2, c.xi3, c.xi4];
        if all.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::UnsupportedParameters(
                "asymptotic constants are outside floating-point range".into(),
            ));
        }
        Ok(c)
    }

    /// Small-argument CDF exponent of one unordered gain.
    pub fn cdf_exponent(&self, scenario: Scenario) -> f64 {
        match scenario {
            Scenario::NoDirectLink => 2.0 * self.m_s * self.elements as f64,
            Scenario::WithDirectLink => 2.0 * self.m_h + 2.0 * self.m_s * self.elements as f64,
        }
    }

    /// `(xi_discrete_bound, xi_continuous)` for the scenario.
    pub fn xis(&self, scenario: Scenario) -> (f64, f64) {
        match scenario {
            Scenario::NoDirectLink => (self.xi1, self.xi2),
            Scenario::WithDirectLink => (self.xi3, self.xi4),
        }
    }
}

/// Which asymptotic CDF to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdfMode {
    /// CDF of the discrete-phase gain's lower bound (uses `a`); evaluated
    /// at the outage threshold it upper-bounds outage.
    UpperViaLowerBoundCdf,
    /// Exact small-argument CDF for continuous phases (uses `beta`).
    ContinuousExact,
}

fn check_user(n: usize, users: usize) -> Result<()> {
    if users > MAX_ANALYTIC_USERS {
        return Err(Error::UnsupportedParameters(format!(
            "closed forms support at most {MAX_ANALYTIC_USERS} users, got {users}"
        )));
    }
    if n == 0 || n > users {
        return Err(Error::InvalidParameter(format!(
            "user index must be in 1..={users}, got {n}"
        )));
    }
    Ok(())
}

/// CDF of the `n`-th smallest of `users` i.i.d. variables whose common CDF
/// is `f`, in the alternating-sum form
/// `N!/((N-n)!(n-1)!) sum_i C(N-n, i) (-1)^i / (n+i) f^{n+i}`.
pub fn ordered_cdf_from_unordered(f: f64, n: usize, users: usize) -> Result<f64> {
    check_user(n, users)?;
    let (nn, n32) = (users as u32, n as u32);
    let lead = (u128::from(n32) * binomial(nn, n32)) as f64;
    let sum: f64 = (0..=(nn - n32))
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(nn - n32, i) as f64 / f64::from(n32 + i) * f.powi((n32 + i) as i32)
        })
        .sum();
    Ok(lead * sum)
}

fn ordered_cdf(y: f64, n: usize, params: &ScenarioParams, mode: CdfMode, scenario: Scenario) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(Error::InvalidParameter(format!("gain must be >= 0, got {y}")));
    }
    check_user(n, params.users)?;
    let c = AsymptoticConstants::new(params)?;
    let (xi_bound, xi_cont) = c.xis(scenario);
    let xi = match mode {
        CdfMode::UpperViaLowerBoundCdf => xi_bound,
        CdfMode::ContinuousExact => xi_cont,
    };
    let unordered = xi * y.powf(c.cdf_exponent(scenario));
    ordered_cdf_from_unordered(unordered, n, params.users)
}

/// Small-`y` CDF of the `n`-th ordered gain without a direct link.
pub fn ordered_cdf_s1(y: f64, n: usize, params: &ScenarioParams, mode: CdfMode) -> Result<f64> {
    ordered_cdf(y, n, params, mode, Scenario::NoDirectLink)
}

/// Small-`z` CDF of the `n`-th ordered gain with a direct link.
pub fn ordered_cdf_s2(z: f64, n: usize, params: &ScenarioParams, mode: CdfMode) -> Result<f64> {
    ordered_cdf(z, n, params, mode, Scenario::WithDirectLink)
}

/// Power allocation and target rates of a NOMA group, strongest power
/// (weakest user) first.
#[derive(Debug, Clone, PartialEq)]
pub struct NomaConfig {
    pub alphas: Vec<f64>,
    pub rates: Vec<f64>,
}

impl NomaConfig {
    pub fn new(alphas: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        check_len(alphas.len(), rates.len())?;
        let c = Self { alphas, rates };
        c.validate()?;
        Ok(c)
    }

    /// Reference allocations for N = 2, 3, 4 with unit target rates.
    pub fn defaults(users: usize) -> Result<Self> {
        let alphas = match users {
            2 => vec![0.9, 0.1],
            3 => vec![0.7, 0.2, 0.1],
            4 => vec![0.6, 0.25, 0.1, 0.05],
            n => return Err(Error::Config(format!("no default power allocation for N = {n}"))),
        };
        Self::new(alphas, vec![1.0; users])
    }

    pub fn users(&self) -> usize {
        self.alphas.len()
    }

    pub fn validate(&self) -> Result<()> {
        check_len(self.alphas.len(), self.rates.len())?;
        if self.alphas.is_empty() {
            return Err(Error::InvalidParameter("empty power allocation".into()));
        }
        let total: f64 = self.alphas.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "power allocation must sum to 1, sums to {total}"
            )));
        }
        if self.alphas.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::InvalidParameter("power coefficients must be > 0".into()));
        }
        if self.alphas.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidParameter(
                "power coefficients must be strictly descending".into(),
            ));
        }
        if self.rates.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(Error::InvalidParameter("target rates must be > 0".into()));
        }
        Ok(())
    }

    /// Target SINRs `2^R - 1`.
    pub fn target_sinrs(&self) -> Vec<f64> {
        self.rates.iter().map(|r| 2f64.powf(*r) - 1.0).collect()
    }

    /// Squared-gain threshold for decoding message `l` (zero-based) at unit
    /// transmit SNR.
    fn unit_thresholds(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let gammas = self.target_sinrs();
        let n = self.alphas.len();
        (0..n)
            .map(|l| {
                let rest: f64 = self.alphas[l + 1..].iter().sum();
                let margin = self.alphas[l] - gammas[l] * rest;
                if l + 1 < n && margin <= 0.0 {
                    return Err(Error::InfeasibleAllocation { user: l + 1, margin });
                }
                // for the last message rest == 0 so margin == alpha_N
                Ok(gammas[l] / margin)
            })
            .collect()
    }
}

/// SIC decoding thresholds on the squared gain at transmit SNR `rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct NomaThresholds {
    pub rho: f64,
    pub gamma_tilde: Vec<f64>,
    /// `rho_tilde[n][l]` for `l <= n` (both zero-based): threshold user `n`
    /// must clear to decode message `l`.
    pub rho_tilde: Vec<Vec<f64>>,
    pub rho_tilde_max: Vec<f64>,
}

impl NomaThresholds {
    pub fn users(&self) -> usize {
        self.rho_tilde_max.len()
    }
}

pub fn noma_thresholds(alphas: &[f64], rates: &[f64], rho: f64) -> Result<NomaThresholds> {
    let cfg = NomaConfig::new(alphas.to_vec(), rates.to_vec())?;
    thresholds_for(&cfg, rho)
}

pub fn thresholds_for(cfg: &NomaConfig, rho: f64) -> Result<NomaThresholds> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter(format!("transmit SNR must be > 0, got {rho}")));
    }
    let per_message: Vec<f64> = cfg.unit_thresholds()?.into_iter().map(|t| t / rho).collect();
    let rho_tilde: Vec<Vec<f64>> = (0..per_message.len()).map(|n| per_message[..=n].to_vec()).collect();
    let rho_tilde_max = rho_tilde
        .iter()
        .map(|row| row.iter().copied().fold(f64::MIN, f64::max))
        .collect();
    Ok(NomaThresholds {
        rho,
        gamma_tilde: cfg.target_sinrs(),
        rho_tilde,
        rho_tilde_max,
    })
}

/// Target SINR of one OMA user holding `1/N` of the resource block.
pub fn oma_target_sinr(users: usize, rate: f64) -> f64 {
    2f64.powf(users as f64 * rate) - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSet {
    pub upper: f64,
    pub lower: f64,
    pub diversity: f64,
    pub scheme: Scheme,
    pub scenario: Scenario,
    /// One-based user index; `None` for OMA where all users coincide.
    pub user: Option<usize>,
}

/// Per-user diversity order exponent without the `n` multiplier.
fn base_diversity(scenario: Scenario, params: &ScenarioParams) -> f64 {
    let m_s = params.bs_irs.m().min(params.irs_user.m());
    let reflected = m_s * params.elements as f64;
    match scenario {
        Scenario::NoDirectLink => reflected,
        Scenario::WithDirectLink => params.direct.m() + reflected,
    }
}

pub fn diversity_order(scheme: Scheme, scenario: Scenario, n: usize, params: &ScenarioParams) -> f64 {
    let d = base_diversity(scenario, params);
    match scheme {
        Scheme::Noma => n as f64 * d,
        Scheme::Oma => d,
    }
}

pub fn outage_bounds_noma(n: usize, params: &ScenarioParams, noma: &NomaThresholds) -> Result<BoundSet> {
    check_user(n, params.users)?;
    check_len(params.users, noma.users())?;
    let c = AsymptoticConstants::new(params)?;
    let scenario = params.scenario;
    let (xi_up, xi_low) = c.xis(scenario);
    let d0 = base_diversity(scenario, params);
    let nf = n as f64;
    let coef = binomial(params.users as u32, n as u32) as f64;
    let power = noma.rho_tilde_max[n - 1].powf(nf * d0);
    Ok(BoundSet {
        upper: coef * xi_up.powi(n as i32) * power,
        lower: coef * xi_low.powi(n as i32) * power,
        diversity: nf * d0,
        scheme: Scheme::Noma,
        scenario,
        user: Some(n),
    })
}

pub fn outage_bounds_oma(params: &ScenarioParams, rates: &[f64], rho: f64) -> Result<BoundSet> {
    check_len(params.users, rates.len())?;
    let rate = rates[0];
    if rates.iter().any(|&r| r != rate) {
        return Err(Error::UnsupportedParameters(
            "OMA bounds assume one common target rate".into(),
        ));
    }
    if !(rate > 0.0) || !(rho > 0.0) {
        return Err(Error::InvalidParameter("rate and SNR must be > 0".into()));
    }
    let c = AsymptoticConstants::new(params)?;
    let scenario = params.scenario;
    let (xi_up, xi_low) = c.xis(scenario);
    let d0 = base_diversity(scenario, params);
    let power = (oma_target_sinr(params.users, rate) / rho).powf(d0);
    Ok(BoundSet {
        upper: xi_up * power,
        lower: xi_low * power,
        diversity: d0,
        scheme: Scheme::Oma,
        scenario,
        user: None,
    })
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(scenario: Scenario) -> ScenarioParams {
        ScenarioParams::defaults(scenario)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn a_for_three_bits() {
        let c = AsymptoticConstants::new(&params(Scenario::NoDirectLink)).unwrap();
        assert_relative_eq!(c.a, 0.9 * (PI / 8.0).cos(), max_relative = 1e-15);
        assert!((c.a - 0.831_492).abs() < 1e-6);
    }

    #[test]
    fn default_constants_by_hand() {
        // m_s = 1, m_l = 2: phi2 = 2 Gamma(1) Gamma(2) * 2 / (Gamma(1) Gamma(2)) = 4
        let c = AsymptoticConstants::new(&params(Scenario::NoDirectLink)).unwrap();
        assert_relative_eq!(c.phi2, 4.0, max_relative = 1e-13);
        // zeta1 = 4^2 / (4 * Gamma(4)) = 2/3
        assert_relative_eq!(c.zeta1, 2.0 / 3.0, max_relative = 1e-13);
        // zeta2 = 2 * Gamma(2) * 16 / (6 * Gamma(1) * Gamma(6)) = 2/45
        assert_relative_eq!(c.zeta2, 2.0 / 45.0, max_relative = 1e-13);
        assert_relative_eq!(c.xi2, (2.0 / 3.0) / 0.9f64.powi(4), max_relative = 1e-13);
    }

    #[test]
    fn xi_ratio_is_beta_over_a() {
        for bits in 2..8 {
            let p = params(Scenario::NoDirectLink).with_mode(PhaseMode::discrete(bits).unwrap());
            let c = AsymptoticConstants::new(&p).unwrap();
            let expected = (c.beta / c.a).powf(4.0);
            assert_relative_eq!(c.xi1 / c.xi2, expected, max_relative = 1e-13);
            assert_relative_eq!(c.xi3 / c.xi4, expected, max_relative = 1e-13);
            assert!(c.xi1 >= c.xi2 && c.xi3 >= c.xi4);
        }
        let c = AsymptoticConstants::new(&params(Scenario::NoDirectLink).with_mode(PhaseMode::Continuous)).unwrap();
        assert_eq!(c.xi1, c.xi2);
        assert_eq!(c.xi3, c.xi4);
    }

    #[test]
    fn unsupported_parameters() {
        let mut p = params(Scenario::NoDirectLink);
        p.irs_user = crate::fading::FadingParam::unit(2.0).unwrap();
        assert!(matches!(
            AsymptoticConstants::new(&p),
            Err(Error::UnsupportedParameters(_))
        ));
        let p = params(Scenario::NoDirectLink).with_mode(PhaseMode::discrete(1).unwrap());
        assert!(matches!(
            AsymptoticConstants::new(&p),
            Err(Error::UnsupportedParameters(_))
        ));
        let mut p = params(Scenario::NoDirectLink);
        p.bs_irs = crate::fading::FadingParam::new(2.0, 3.0).unwrap();
        assert!(matches!(
            AsymptoticConstants::new(&p),
            Err(Error::UnsupportedParameters(_))
        ));
    }

    #[test]
    fn ordered_cdf_collapses() {
        let p1 = ScenarioParams {
            users: 1,
            ..params(Scenario::NoDirectLink)
        };
        let c = AsymptoticConstants::new(&p1).unwrap();
        let y = 0.05;
        assert_eq!(ordered_cdf_s1(0.0, 1, &p1, CdfMode::ContinuousExact).unwrap(), 0.0);
        assert_relative_eq!(
            ordered_cdf_s1(y, 1, &p1, CdfMode::UpperViaLowerBoundCdf).unwrap(),
            c.xi1 * y.powi(4),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            ordered_cdf_s2(y, 1, &p1, CdfMode::ContinuousExact).unwrap(),
            c.xi4 * y.powi(6),
            max_relative = 1e-14
        );
        assert_eq!(ordered_cdf_s2(0.0, 1, &p1, CdfMode::ContinuousExact).unwrap(), 0.0);

        let p2 = params(Scenario::NoDirectLink);
        let x = c.xi2 * y.powi(4);
        assert_relative_eq!(
            ordered_cdf_s1(y, 1, &p2, CdfMode::ContinuousExact).unwrap(),
            2.0 * x - x * x,
            max_relative = 1e-14
        );
        let x = c.xi3 * y.powi(6);
        assert_relative_eq!(
            ordered_cdf_s2(y, 1, &p2, CdfMode::UpperViaLowerBoundCdf).unwrap(),
            2.0 * x - x * x,
            max_relative = 1e-14
        );
        // n = N: max of two
        assert_relative_eq!(
            ordered_cdf_s2(y, 2, &p2, CdfMode::UpperViaLowerBoundCdf).unwrap(),
            x * x,
            max_relative = 1e-12
        );
        assert!(ordered_cdf_s1(y, 3, &p2, CdfMode::ContinuousExact).is_err());
    }

    #[test]
    fn ordered_transform_matches_binomial_form() {
        // alternating sum equals sum_{j >= n} C(N, j) F^j (1 - F)^{N - j}
        for users in 1..=6usize {
            for n in 1..=users {
                for &f in &[0.0f64, 0.01, 0.3, 0.77, 1.0] {
                    let direct: f64 = (n..=users)
                        .map(|j| {
                            binomial(users as u32, j as u32) as f64
                                * f.powi(j as i32)
                                * (1.0 - f).powi((users - j) as i32)
                        })
                        .sum();
                    let alt = ordered_cdf_from_unordered(f, n, users).unwrap();
                    assert!((alt - direct).abs() < 1e-12, "N={users} n={n} F={f}");
                }
            }
        }
    }

    #[test]
    fn exponent_law() {
        let p = ScenarioParams {
            users: 3,
            ..params(Scenario::NoDirectLink)
        };
        for n in 1..=3 {
            let r = ordered_cdf_s1(1e-4, n, &p, CdfMode::UpperViaLowerBoundCdf).unwrap()
                / ordered_cdf_s1(2e-4, n, &p, CdfMode::UpperViaLowerBoundCdf).unwrap();
            let expected = 2f64.powf(-4.0 * n as f64);
            assert!((r / expected - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn thresholds_reference_allocation() {
        let t = noma_thresholds(&[0.9, 0.1], &[1.0, 1.0], 1.0).unwrap();
        assert_eq!(t.gamma_tilde, vec![1.0, 1.0]);
        assert_relative_eq!(t.rho_tilde[0][0], 1.25, max_relative = 1e-15);
        assert_relative_eq!(t.rho_tilde[1][0], 1.25, max_relative = 1e-15);
        assert_relative_eq!(t.rho_tilde[1][1], 10.0, max_relative = 1e-15);
        assert_relative_eq!(t.rho_tilde_max[0], 1.25, max_relative = 1e-15);
        assert_relative_eq!(t.rho_tilde_max[1], 10.0, max_relative = 1e-15);

        let t2 = noma_thresholds(&[0.9, 0.1], &[1.0, 1.0], 2.0).unwrap();
        for (a, b) in t.rho_tilde.iter().flatten().zip(t2.rho_tilde.iter().flatten()) {
            assert_relative_eq!(*a, 2.0 * b, max_relative = 1e-15);
        }
    }

    #[test]
    fn thresholds_errors() {
        assert!(matches!(
            noma_thresholds(&[0.5, 0.5], &[1.0, 1.0], 1.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            noma_thresholds(&[0.55, 0.45], &[2.0, 2.0], 1.0),
            Err(Error::InfeasibleAllocation { user: 1, .. })
        ));
        assert!(noma_thresholds(&[0.6, 0.5], &[1.0, 1.0], 1.0).is_err());
        assert!(noma_thresholds(&[0.9, 0.1], &[1.0], 1.0).is_err());
        assert!(noma_thresholds(&[0.9, 0.1], &[1.0, 0.0], 1.0).is_err());
        assert!(noma_thresholds(&[0.9, 0.1], &[1.0, 1.0], 0.0).is_err());
        for n in 2..=4 {
            assert!(thresholds_for(&NomaConfig::defaults(n).unwrap(), 1.0).is_ok());
        }
    }

    #[test]
    fn noma_bounds_by_hand() {
        let p = params(Scenario::NoDirectLink);
        let c = AsymptoticConstants::new(&p).unwrap();
        let t = noma_thresholds(&[0.9, 0.1], &[1.0, 1.0], 100.0).unwrap();
        let b = outage_bounds_noma(1, &p, &t).unwrap();
        assert_relative_eq!(b.upper, 2.0 * c.xi1 * t.rho_tilde_max[0].powi(2), max_relative = 1e-13);
        assert_relative_eq!(b.lower, 2.0 * c.xi2 * t.rho_tilde_max[0].powi(2), max_relative = 1e-13);
        assert_eq!(b.diversity, 2.0);
        for n in 1..=2 {
            let b = outage_bounds_noma(n, &p, &t).unwrap();
            let ratio = (c.beta / c.a).powf(4.0 * n as f64);
            assert_relative_eq!(b.upper / b.lower, ratio, max_relative = 1e-13);
        }
        let p2 = params(Scenario::WithDirectLink);
        let b = outage_bounds_noma(2, &p2, &t).unwrap();
        assert_eq!(b.diversity, 6.0);
    }

    #[test]
    fn oma_bounds() {
        assert_eq!(oma_target_sinr(2, 1.0), 3.0);
        let p = params(Scenario::NoDirectLink);
        let b = outage_bounds_oma(&p, &[1.0, 1.0], 1000.0).unwrap();
        assert_eq!(b.diversity, 2.0);
        let c = AsymptoticConstants::new(&p).unwrap();
        assert_relative_eq!(b.upper, c.xi1 * (3.0f64 / 1000.0).powi(2), max_relative = 1e-13);
        let cont = outage_bounds_oma(&p.with_mode(PhaseMode::Continuous), &[1.0, 1.0], 1000.0).unwrap();
        assert_eq!(cont.upper, cont.lower);
        assert!(matches!(
            outage_bounds_oma(&p, &[1.0, 2.0], 1000.0),
            Err(Error::UnsupportedParameters(_))
        ));
        let b2 = outage_bounds_oma(&params(Scenario::WithDirectLink), &[1.0, 1.0], 1000.0).unwrap();
        assert_eq!(b2.diversity, 3.0);
    }

    #[test]
    fn diversity_table() {
        let p = params(Scenario::NoDirectLink);
        assert_eq!(diversity_order(Scheme::Noma, Scenario::NoDirectLink, 1, &p), 2.0);
        assert_eq!(diversity_order(Scheme::Noma, Scenario::NoDirectLink, 2, &p), 4.0);
        assert_eq!(diversity_order(Scheme::Noma, Scenario::WithDirectLink, 1, &p), 3.0);
        assert_eq!(diversity_order(Scheme::Noma, Scenario::WithDirectLink, 2, &p), 6.0);
        assert_eq!(diversity_order(Scheme::Oma, Scenario::NoDirectLink, 2, &p), 2.0);
        assert_eq!(diversity_order(Scheme::Oma, Scenario::WithDirectLink, 1, &p), 3.0);
        for mode in [
            PhaseMode::Continuous,
            PhaseMode::discrete(2).unwrap(),
            PhaseMode::discrete(7).unwrap(),
        ] {
            let q = ScenarioParams {
                beta: 0.3,
                ..p.with_mode(mode)
            };
            assert_eq!(diversity_order(Scheme::Noma, Scenario::WithDirectLink, 2, &q), 6.0);
        }
    }

    #[test]
    fn db_conversions() {
        assert_relative_eq!(db_to_linear(30.0), 1000.0, max_relative = 1e-14);
        assert_relative_eq!(linear_to_db(100.0), 20.0, max_relative = 1e-14);
    }
}
