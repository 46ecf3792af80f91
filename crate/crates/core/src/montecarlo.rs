//! Monte Carlo outage estimation for IRS-NOMA, IRS-OMA and a full-duplex
//! decode-and-forward relay baseline.
//!
//! Trials run in fixed-size batches. Batch `i` always draws from
//! `RngStream::new(seed, i)` and batch results are reduced in batch order,
//! so counts do not depend on the number of worker threads. Every SNR point
//! of a sweep is evaluated on the same channel draws.

use rayon::prelude::*;

use crate::analytic::{db_to_linear, oma_target_sinr, NomaConfig, Scheme};
use crate::channel::{GainSampler, GainVector, ScenarioParams};
use crate::error::{check_len, Error, Result};
use crate::fading::{FadingParam, RngStream};
use crate::phase::PhaseMode;

/// Trials per batch (and per random stream).
pub const BATCH_TRIALS: u64 = 1 << 15;

/// Below this many failures an estimate is flagged as unreliable.
pub const MIN_FAILURES: u64 = 20;

const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateStatus {
    Ok,
    InsufficientFailures,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub trials: u64,
    pub failures: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// One-based user index (ordered position for NOMA).
    pub user: usize,
    pub rho_db: f64,
}

impl OutageEstimate {
    pub fn from_counts(failures: u64, trials: u64, user: usize, rho_db: f64) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, trials);
        Self {
            p_hat: failures as f64 / trials as f64,
            trials,
            failures,
            ci_low,
            ci_high,
            user,
            rho_db,
        }
    }

    pub fn status(&self) -> EstimateStatus {
        if self.failures < MIN_FAILURES {
            EstimateStatus::InsufficientFailures
        } else {
            EstimateStatus::Ok
        }
    }

    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }

    /// Whether the 95% interval meets `[lo, hi]`.
    pub fn ci_intersects(&self, lo: f64, hi: f64) -> bool {
        self.ci_low <= hi && self.ci_high >= lo
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0 && failures <= trials);
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).clamp(0.0, p), (centre + half).clamp(p, 1.0))
}

fn batch_sizes(trials: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let batches = trials.div_ceil(BATCH_TRIALS) as usize;
    (0..batches).into_par_iter().map(move |b| {
        let b = b as u64;
        let size = BATCH_TRIALS.min(trials - b * BATCH_TRIALS);
        (b, size)
    })
}

/// Sums per-batch count tables in batch order.
fn reduce_counts(parts: Vec<Vec<u64>>, len: usize) -> Vec<u64> {
    parts.into_iter().fold(vec![0u64; len], |mut acc, part| {
        for (a, p) in acc.iter_mut().zip(part) {
            *a += p;
        }
        acc
    })
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    Ok(())
}

/// Outage events of one NOMA trial: user `n` fails iff its ordered gain
/// squared is below `thresholds[n]`.
pub fn noma_outage_events(gains: &GainVector, thresholds: &[f64]) -> Vec<bool> {
    gains.gains.iter().zip(thresholds).map(|(g, t)| g * g < *t).collect()
}

/// Counts outages over `trials` draws.
///
/// `thresholds[p][n]` is the squared-gain threshold of user `n` at sweep
/// point `p`. With `ordered` the gains are sorted before comparison (NOMA);
/// otherwise user `n` is judged on its own unordered gain (OMA). Returns
/// failure counts indexed like `thresholds`.
pub fn count_outages(
    params: &ScenarioParams,
    ordered: bool,
    thresholds: &[Vec<f64>],
    trials: u64,
    seed: u64,
) -> Result<Vec<Vec<u64>>> {
    params.validate()?;
    check_trials(trials)?;
    let users = params.users;
    for row in thresholds {
        check_len(users, row.len())?;
    }
    let sampler = GainSampler::new(params);
    let points = thresholds.len();
    let parts: Vec<Vec<u64>> = batch_sizes(trials)
        .map(|(batch, size)| {
            let mut rng = RngStream::new(seed, batch);
            let mut counts = vec![0u64; points * users];
            let mut gains = vec![0.0; users];
            for _ in 0..size {
                sampler.unordered_gains(&mut rng, &mut gains);
                if ordered {
                    gains.sort_by(f64::total_cmp);
                }
                for (u, g) in gains.iter().enumerate() {
                    let g2 = g * g;
                    for (p, row) in thresholds.iter().enumerate() {
                        if g2 < row[u] {
                            counts[p * users + u] += 1;
                        }
                    }
                }
            }
            counts
        })
        .collect();
    let flat = reduce_counts(parts, points * users);
    Ok(flat.chunks(users).map(|c| c.to_vec()).collect())
}

/// Squared-gain thresholds of every user at linear SNR `rho`.
pub fn outage_thresholds(noma: &NomaConfig, scheme: Scheme, rho: f64) -> Result<Vec<f64>> {
    match scheme {
        Scheme::Noma => Ok(crate::analytic::thresholds_for(noma, rho)?.rho_tilde_max),
        Scheme::Oma => {
            noma.validate()?;
            if !(rho > 0.0) {
                return Err(Error::InvalidParameter(format!("transmit SNR must be > 0, got {rho}")));
            }
            let users = noma.users();
            Ok(noma.rates.iter().map(|&r| oma_target_sinr(users, r) / rho).collect())
        }
    }
}

/// Outage estimates at each SNR in `rhos_db`, one inner vector of per-user
/// estimates per point. All points share the same channel draws.
pub fn estimate_outage_sweep(
    params: &ScenarioParams,
    noma: &NomaConfig,
    scheme: Scheme,
    rhos_db: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<Vec<OutageEstimate>>> {
    check_len(params.users, noma.users())?;
    let thresholds = rhos_db
        .iter()
        .map(|&db| outage_thresholds(noma, scheme, db_to_linear(db)))
        .collect::<Result<Vec<_>>>()?;
    let counts = count_outages(params, scheme == Scheme::Noma, &thresholds, trials, seed)?;
    Ok(to_estimates(&counts, rhos_db, trials))
}

fn to_estimates(counts: &[Vec<u64>], rhos_db: &[f64], trials: u64) -> Vec<Vec<OutageEstimate>> {
    counts
        .iter()
        .zip(rhos_db)
        .map(|(row, &db)| {
            row.iter()
                .enumerate()
                .map(|(u, &f)| OutageEstimate::from_counts(f, trials, u + 1, db))
                .collect()
        })
        .collect()
}

/// Per-user outage estimates at linear transmit SNR `rho`.
pub fn estimate_outage(
    params: &ScenarioParams,
    noma: &NomaConfig,
    scheme: Scheme,
    rho: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<OutageEstimate>> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("transmit SNR must be > 0, got {rho}")));
    }
    let rho_db = 10.0 * rho.log10();
    let mut sweep = estimate_outage_sweep(params, noma, scheme, &[rho_db], trials, seed)?;
    Ok(sweep.remove(0))
}

/// Mean gain under each of `modes` divided by the mean continuous-phase
/// gain, on identical channel draws.
pub fn gain_ratios(params: &ScenarioParams, modes: &[PhaseMode], trials: u64, seed: u64) -> Result<Vec<f64>> {
    params.validate()?;
    check_trials(trials)?;
    if modes.len() > 3 {
        return Err(Error::InvalidParameter("at most three phase modes per call".into()));
    }
    let mut all = modes.to_vec();
    all.push(PhaseMode::Continuous);
    let sampler = GainSampler::new(params);
    let parts: Vec<Vec<f64>> = batch_sizes(trials)
        .map(|(batch, size)| {
            let mut rng = RngStream::new(seed, batch);
            let mut sums = vec![0.0; all.len()];
            for _ in 0..size {
                let g = sampler.user_gains_in(&mut rng, &all);
                for (s, v) in sums.iter_mut().zip(g) {
                    *s += v;
                }
            }
            sums
        })
        .collect();
    let totals = parts.into_iter().fold(vec![0.0; all.len()], |mut acc, part| {
        for (a, p) in acc.iter_mut().zip(part) {
            *a += p;
        }
        acc
    });
    let continuous = totals[modes.len()];
    Ok(totals[..modes.len()].iter().map(|t| t / continuous).collect())
}

/// Mean discrete-phase gain over mean continuous-phase gain for
/// `params.mode`.
pub fn gain_ratio(params: &ScenarioParams, trials: u64, seed: u64) -> Result<f64> {
    Ok(gain_ratios(params, &[params.mode], trials, seed)?[0])
}

/// Full-duplex decode-and-forward relay placed where each IRS would be.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdrParams {
    /// Fraction of the total power spent at the relay; the BS keeps the rest.
    pub power_split: f64,
    /// Residual self-interference channel after cancellation.
    pub self_interference: FadingParam,
    pub bs_relay: FadingParam,
    pub relay_user: FadingParam,
}

impl Default for FdrParams {
    fn default() -> Self {
        Self {
            power_split: 0.5,
            self_interference: FadingParam::new(1.0, 0.01).expect("valid"),
            bs_relay: FadingParam::unit(2.0).expect("valid"),
            relay_user: FadingParam::unit(1.0).expect("valid"),
        }
    }
}

impl FdrParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.power_split > 0.0 && self.power_split < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "relay power split must be in (0, 1), got {}",
                self.power_split
            )));
        }
        Ok(())
    }
}

/// FDR-NOMA outage estimates over an SNR sweep.
///
/// Users keep their index-ordered power coefficients. User `n` needs every
/// message `l <= n` to clear its target SINR both at its relay (which sees
/// residual self-interference scaled by its own transmit power) and at the
/// user on the relay hop.
pub fn estimate_outage_fdr_sweep(
    params: &ScenarioParams,
    noma: &NomaConfig,
    fdr: &FdrParams,
    rhos_db: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<Vec<OutageEstimate>>> {
    params.validate()?;
    fdr.validate()?;
    noma.validate()?;
    check_trials(trials)?;
    let users = params.users;
    check_len(users, noma.users())?;
    let gammas = noma.target_sinrs();
    // alpha_l - gamma_l * sum_{i > l} alpha_i
    let margins: Vec<f64> = (0..users)
        .map(|l| noma.alphas[l] - gammas[l] * noma.alphas[l + 1..].iter().sum::<f64>())
        .collect();
    if let Some((l, &m)) = margins.iter().enumerate().find(|(_, &m)| m <= 0.0) {
        return Err(Error::InfeasibleAllocation { user: l + 1, margin: m });
    }
    let powers: Vec<(f64, f64)> = rhos_db
        .iter()
        .map(|&db| {
            let rho = db_to_linear(db);
            ((1.0 - fdr.power_split) * rho, fdr.power_split * rho)
        })
        .collect();
    let br = fdr.bs_relay.sampler();
    let ru = fdr.relay_user.sampler();
    let si = fdr.self_interference.sampler();
    let points = powers.len();
    let parts: Vec<Vec<u64>> = batch_sizes(trials)
        .map(|(batch, size)| {
            let mut rng = RngStream::new(seed, batch);
            let mut counts = vec![0u64; points * users];
            for _ in 0..size {
                for n in 0..users {
                    let x = br.sample_power(&mut rng);
                    let y = ru.sample_power(&mut rng);
                    let s = si.sample_power(&mut rng);
                    for (p, &(p_bs, p_relay)) in powers.iter().enumerate() {
                        let fails = (0..=n).any(|l| {
                            let relay_ok = x * p_bs * margins[l] >= gammas[l] * (s * p_relay + 1.0);
                            let user_ok = y * p_relay * margins[l] >= gammas[l];
                            !(relay_ok && user_ok)
                        });
                        if fails {
                            counts[p * users + n] += 1;
                        }
                    }
                }
            }
            counts
        })
        .collect();
    let flat = reduce_counts(parts, points * users);
    let counts: Vec<Vec<u64>> = flat.chunks(users).map(|c| c.to_vec()).collect();
    Ok(to_estimates(&counts, rhos_db, trials))
}

pub fn estimate_outage_fdr(
    params: &ScenarioParams,
    noma: &NomaConfig,
    fdr: &FdrParams,
    rho: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<OutageEstimate>> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("transmit SNR must be > 0, got {rho}")));
    }
    let mut sweep = estimate_outage_fdr_sweep(params, noma, fdr, &[10.0 * rho.log10()], trials, seed)?;
    Ok(sweep.remove(0))
}
