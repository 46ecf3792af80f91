//! Flat `key = value` experiment configs.
//!
//! One assignment per line, `#` starts a comment, lists are comma
//! separated. Example:
//!
//! ```text
//! experiment = outage-sweep
//! scenario = 1
//! N = 2
//! K = 2
//! b = 3
//! beta = 0.9
//! m_G = 2
//! m_g = 1
//! alpha = 0.9, 0.1
//! rate = 1
//! rho_db = 0, 5, 10, 15, 20, 25, 30
//! trials = 1000000
//! seed = 1
//! output = outage.csv
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::analytic::NomaConfig;
use crate::channel::{Scenario, ScenarioParams};
use crate::error::{Error, Result};
use crate::fading::FadingParam;
use crate::montecarlo::FdrParams;
use crate::phase::PhaseMode;

use super::FitWindow;

/// Outage experiments must run at least this many trials.
pub const MIN_OUTAGE_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    GainRatio,
    OutageSweep,
    DiversityFit,
    BoundsTable,
}

impl ExperimentKind {
    pub fn label(&self) -> &'static str {
        match self {
            ExperimentKind::GainRatio => "gain-ratio",
            ExperimentKind::OutageSweep => "outage-sweep",
            ExperimentKind::DiversityFit => "diversity-fit",
            ExperimentKind::BoundsTable => "bounds-table",
        }
    }

    fn simulates_outage(&self) -> bool {
        matches!(self, ExperimentKind::OutageSweep | ExperimentKind::DiversityFit)
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gain-ratio" => Ok(ExperimentKind::GainRatio),
            "outage-sweep" => Ok(ExperimentKind::OutageSweep),
            "diversity-fit" => Ok(ExperimentKind::DiversityFit),
            "bounds-table" => Ok(ExperimentKind::BoundsTable),
            other => Err(Error::Config(format!("unknown experiment kind '{other}'"))),
        }
    }
}

/// Access schemes an outage sweep can simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Noma,
    Oma,
    FdrNoma,
}

impl SchemeKind {
    pub fn label(&self) -> &'static str {
        match self {
            SchemeKind::Noma => "noma",
            SchemeKind::Oma => "oma",
            SchemeKind::FdrNoma => "fdr-noma",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noma" => Ok(SchemeKind::Noma),
            "oma" => Ok(SchemeKind::Oma),
            "fdr-noma" | "fdr" => Ok(SchemeKind::FdrNoma),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Label used for a phase mode in configs and CSV files.
pub fn mode_label(mode: &PhaseMode) -> String {
    match mode.bits() {
        Some(b) => b.to_string(),
        None => "inf".to_string(),
    }
}

fn parse_mode(s: &str) -> Result<PhaseMode> {
    match s {
        "inf" | "continuous" => Ok(PhaseMode::Continuous),
        _ => {
            let bits: u32 = s.parse().map_err(|_| Error::Config(format!("bad resolution '{s}'")))?;
            PhaseMode::discrete(bits)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Base scenario; `elements` and `mode` are replaced by each sweep value.
    pub params: ScenarioParams,
    pub noma: NomaConfig,
    pub rho_db: Vec<f64>,
    pub resolutions: Vec<PhaseMode>,
    pub elements: Vec<usize>,
    pub schemes: Vec<SchemeKind>,
    pub fdr: FdrParams,
    pub trials: u64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub fit_window: FitWindow,
}

struct Entries(BTreeMap<String, String>);

impl Entries {
    fn take(&mut self, key: &str) -> Option<String> {
        self.0.remove(key)
    }

    fn take_parsed<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        self.take(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::Config(format!("bad value for '{key}': '{v}'")))
            })
            .transpose()
    }

    fn take_list<T: FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>> {
        self.take(key)
            .map(|v| {
                split_list(&v)
                    .map(|item| {
                        item.parse::<T>()
                            .map_err(|_| Error::Config(format!("bad list item for '{key}': '{item}'")))
                    })
                    .collect()
            })
            .transpose()
    }
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn strictly_increasing<T: PartialOrd>(xs: &[T], key: &str) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Config(format!("'{key}' must not be empty")));
    }
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config(format!("'{key}' must be strictly increasing")));
    }
    Ok(())
}

fn mode_rank(m: &PhaseMode) -> u64 {
    m.bits().map_or(u64::MAX, u64::from)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
            let k = k.trim().to_string();
            if map.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key '{k}'", lineno + 1)));
            }
        }
        let mut e = Entries(map);

        let kind: ExperimentKind = e
            .take("experiment")
            .ok_or_else(|| Error::Config("missing key 'experiment'".into()))?
            .parse()?;
        let scenario: Scenario = e.take("scenario").as_deref().unwrap_or("1").parse()?;
        let users: usize = e.take_parsed("N")?.unwrap_or(2);
        let elements: Vec<usize> = e.take_list("K")?.unwrap_or_else(|| vec![2]);
        let resolutions = match e.take("b") {
            Some(v) => split_list(&v).map(parse_mode).collect::<Result<Vec<_>>>()?,
            None => vec![PhaseMode::discrete(3)?],
        };
        let beta: f64 = e.take_parsed("beta")?.unwrap_or(0.9);
        let m_big_g: f64 = e.take_parsed("m_G")?.unwrap_or(2.0);
        let m_g: f64 = e.take_parsed("m_g")?.unwrap_or(1.0);
        let m_h: f64 = e.take_parsed("m_h")?.unwrap_or(1.0);
        let theta_tilde: f64 = e.take_parsed("theta_tilde")?.unwrap_or(0.0);

        let alphas: Option<Vec<f64>> = e.take_list("alpha")?;
        let rates: Vec<f64> = match e.take_list::<f64>("rate")? {
            Some(r) if r.len() == 1 => vec![r[0]; users],
            Some(r) => r,
            None => vec![1.0; users],
        };
        let noma = match alphas {
            Some(a) => NomaConfig::new(a, rates)?,
            None => {
                let d = NomaConfig::defaults(users)?;
                NomaConfig::new(d.alphas, rates)?
            }
        };

        let rho_db: Vec<f64> = e
            .take_list("rho_db")?
            .unwrap_or_else(|| (0..=6).map(|i| 5.0 * i as f64).collect());
        let schemes: Vec<SchemeKind> = e.take_list("schemes")?.unwrap_or_else(|| vec![SchemeKind::Noma]);

        let defaults = FdrParams::default();
        let fdr = FdrParams {
            power_split: e.take_parsed("fdr_split")?.unwrap_or(defaults.power_split),
            self_interference: FadingParam::new(
                e.take_parsed("m_SI")?.unwrap_or(defaults.self_interference.m()),
                e.take_parsed("omega_SI")?.unwrap_or(defaults.self_interference.omega()),
            )?,
            bs_relay: FadingParam::unit(e.take_parsed("m_BR")?.unwrap_or(defaults.bs_relay.m()))?,
            relay_user: FadingParam::unit(e.take_parsed("m_RU")?.unwrap_or(defaults.relay_user.m()))?,
        };

        let trials: u64 = e.take_parsed("trials")?.unwrap_or(10_000_000);
        let seed: u64 = e.take_parsed("seed")?.unwrap_or(1);
        let output = e.take("output").map(PathBuf::from);
        let snr = (
            e.take_parsed::<f64>("fit_low_db")?,
            e.take_parsed::<f64>("fit_high_db")?,
        );
        let prob = (e.take_parsed::<f64>("fit_p_low")?, e.take_parsed::<f64>("fit_p_high")?);
        let fit_window = match (snr, prob) {
            ((None, None), (None, None)) => FitWindow::Auto,
            ((Some(l), Some(h)), (None, None)) if l < h => FitWindow::Snr(l, h),
            ((None, None), (Some(l), Some(h))) if 0.0 < l && l < h && h <= 1.0 => FitWindow::Probability(l, h),
            _ => {
                return Err(Error::Config(
                    "fit window needs fit_low_db < fit_high_db or 0 < fit_p_low < fit_p_high <= 1, not both".into(),
                ))
            }
        };

        if let Some(k) = e.0.keys().next() {
            return Err(Error::Config(format!("unknown key '{k}'")));
        }

        let mut params = ScenarioParams::new(scenario, users, elements[0], resolutions[0], beta, m_big_g, m_g, m_h)?;
        params.theta_tilde = theta_tilde;

        let cfg = Self {
            kind,
            params,
            noma,
            rho_db,
            resolutions,
            elements,
            schemes,
            fdr,
            trials,
            seed,
            output,
            fit_window,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.noma.validate()?;
        if self.noma.users() != self.params.users {
            return Err(Error::Config(format!(
                "N = {} but {} power coefficients given",
                self.params.users,
                self.noma.users()
            )));
        }
        strictly_increasing(&self.rho_db, "rho_db")?;
        strictly_increasing(&self.elements, "K")?;
        let ranks: Vec<u64> = self.resolutions.iter().map(mode_rank).collect();
        strictly_increasing(&ranks, "b")?;
        if self.elements.len() > 1 && self.resolutions.len() > 1 && self.kind != ExperimentKind::GainRatio {
            return Err(Error::Config("sweep either K or b, not both".into()));
        }
        if self.elements.contains(&0) {
            return Err(Error::Config("K must be >= 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("'schemes' must not be empty".into()));
        }
        if self.kind.simulates_outage() && self.trials < MIN_OUTAGE_TRIALS {
            return Err(Error::Config(format!(
                "outage experiments need trials >= {MIN_OUTAGE_TRIALS}, got {}",
                self.trials
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        self.fdr.validate()
    }

    /// Scenario for one `(K, b)` sweep value.
    pub fn params_for(&self, elements: usize, mode: PhaseMode) -> ScenarioParams {
        ScenarioParams {
            elements,
            mode,
            ..self.params.clone()
        }
    }
}
