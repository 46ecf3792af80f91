//! Experiment runner: sweeps, CSV persistence and diversity fits.

mod config;
mod fit;

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use config::{mode_label, ExperimentConfig, ExperimentKind, SchemeKind, MIN_OUTAGE_TRIALS};
pub use fit::{fit_diversity, least_squares, FitWindow, SlopeFit, P_HIGH, P_LOW};

use crate::analytic::{
    db_to_linear, diversity_order, outage_bounds_noma, outage_bounds_oma, thresholds_for, BoundSet, Scheme,
};
use crate::channel::ScenarioParams;
use crate::error::{Error, Result};
use crate::montecarlo::{
    estimate_outage_fdr_sweep, estimate_outage_sweep, gain_ratios, EstimateStatus, OutageEstimate,
};
use crate::phase::PhaseMode;

/// Column order of every CSV file this crate writes.
pub const CSV_HEADER: &str = "experiment,scenario,scheme,user,rho_db,b,K,N,trials,failures,p_hat,ci_low,ci_high,analytic_upper,analytic_lower,diversity";

/// One CSV row. Inapplicable fields are `None` and written blank.
///
/// `gain-ratio` rows carry the discrete/continuous mean-gain ratio in
/// `p_hat`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub experiment: String,
    pub scenario: String,
    pub scheme: Option<String>,
    pub user: Option<usize>,
    pub rho_db: Option<f64>,
    pub b: Option<String>,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: Option<u64>,
    pub failures: Option<u64>,
    pub p_hat: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub analytic_upper: Option<f64>,
    pub analytic_lower: Option<f64>,
    pub diversity: Option<f64>,
}

impl Record {
    fn base(cfg: &ExperimentConfig, params: &ScenarioParams) -> Self {
        Self {
            experiment: cfg.kind.label().to_string(),
            scenario: params.scenario.label().to_string(),
            b: Some(mode_label(&params.mode)),
            k: params.elements,
            n: params.users,
            ..Self::default()
        }
    }

    fn with_estimate(mut self, e: &OutageEstimate) -> Self {
        self.user = Some(e.user);
        self.rho_db = Some(e.rho_db);
        self.trials = Some(e.trials);
        self.failures = Some(e.failures);
        self.p_hat = Some(e.p_hat);
        self.ci_low = Some(e.ci_low);
        self.ci_high = Some(e.ci_high);
        self
    }

    fn with_bounds(mut self, b: Option<&BoundSet>) -> Self {
        if let Some(b) = b {
            self.analytic_upper = Some(b.upper);
            self.analytic_lower = Some(b.lower);
        }
        self
    }
}

pub fn write_csv<W: Write>(writer: W, rows: &[Record]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<Record>> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::Config(format!("unexpected CSV header '{header}'")));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Slope fit for one `(sweep value, scheme, user)` curve.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub elements: usize,
    pub resolution: String,
    pub scheme: SchemeKind,
    pub user: usize,
    /// Analytic diversity order, when defined for the scheme.
    pub expected: Option<f64>,
    pub fit: std::result::Result<SlopeFit, String>,
}

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub rows: Vec<Record>,
    pub fits: Vec<FitReport>,
    /// Reason codes for anything skipped, e.g. unavailable analytic columns.
    pub notes: Vec<String>,
    /// Count of Monte Carlo rows with fewer than the minimum failures.
    pub insufficient_failures: usize,
}

/// Analytic bounds for NOMA user `n` (one-based) or OMA (`n` ignored).
fn bounds_for(scheme: Scheme, params: &ScenarioParams, cfg: &ExperimentConfig, rho: f64, n: usize) -> Result<BoundSet> {
    match scheme {
        Scheme::Noma => outage_bounds_noma(n, params, &thresholds_for(&cfg.noma, rho)?),
        Scheme::Oma => outage_bounds_oma(params, &cfg.noma.rates, rho),
    }
}

fn analytic_scheme(s: SchemeKind) -> Option<Scheme> {
    match s {
        SchemeKind::Noma => Some(Scheme::Noma),
        SchemeKind::Oma => Some(Scheme::Oma),
        SchemeKind::FdrNoma => None,
    }
}

fn sweep_values(cfg: &ExperimentConfig) -> Vec<(usize, PhaseMode)> {
    cfg.elements
        .iter()
        .flat_map(|&k| cfg.resolutions.iter().map(move |&m| (k, m)))
        .collect()
}

fn note_unavailable(summary: &mut RunSummary, params: &ScenarioParams, err: &Error) {
    let note = format!(
        "analytic-unavailable K={} b={}: {}: {}",
        params.elements,
        mode_label(&params.mode),
        err.code(),
        err
    );
    if !summary.notes.contains(&note) {
        summary.notes.push(note);
    }
}

fn run_outage(cfg: &ExperimentConfig, summary: &mut RunSummary) -> Result<()> {
    for (k, mode) in sweep_values(cfg) {
        let params = cfg.params_for(k, mode);
        for &scheme in &cfg.schemes {
            let estimates = match scheme {
                SchemeKind::Noma => {
                    estimate_outage_sweep(&params, &cfg.noma, Scheme::Noma, &cfg.rho_db, cfg.trials, cfg.seed)?
                }
                SchemeKind::Oma => {
                    estimate_outage_sweep(&params, &cfg.noma, Scheme::Oma, &cfg.rho_db, cfg.trials, cfg.seed)?
                }
                SchemeKind::FdrNoma => {
                    estimate_outage_fdr_sweep(&params, &cfg.noma, &cfg.fdr, &cfg.rho_db, cfg.trials, cfg.seed)?
                }
            };
            let first_row = summary.rows.len();
            for point in &estimates {
                for e in point {
                    if e.status() == EstimateStatus::InsufficientFailures {
                        summary.insufficient_failures += 1;
                    }
                    let mut row = Record::base(cfg, &params).with_estimate(e);
                    row.scheme = Some(scheme.label().to_string());
                    if let Some(s) = analytic_scheme(scheme) {
                        match bounds_for(s, &params, cfg, db_to_linear(e.rho_db), e.user) {
                            Ok(b) => row = row.with_bounds(Some(&b)),
                            Err(err @ Error::UnsupportedParameters(_)) => note_unavailable(summary, &params, &err),
                            Err(err) => return Err(err),
                        }
                        row.diversity = Some(diversity_order(s, params.scenario, e.user, &params));
                    }
                    summary.rows.push(row);
                }
            }
            if cfg.kind == ExperimentKind::DiversityFit {
                for user in 1..=params.users {
                    let rows: Vec<Record> = summary.rows[first_row..]
                        .iter()
                        .filter(|r| r.user == Some(user))
                        .cloned()
                        .collect();
                    summary.fits.push(FitReport {
                        elements: k,
                        resolution: mode_label(&mode),
                        scheme,
                        user,
                        expected: analytic_scheme(scheme).map(|s| diversity_order(s, params.scenario, user, &params)),
                        fit: fit_diversity(&rows, cfg.fit_window).map_err(|e| e.to_string()),
                    });
                }
            }
        }
    }
    Ok(())
}

fn run_gain_ratio(cfg: &ExperimentConfig, summary: &mut RunSummary) -> Result<()> {
    for &k in &cfg.elements {
        let params = cfg.params_for(k, cfg.resolutions[0]);
        // three modes per pass, every pass on the same draws
        for chunk in cfg.resolutions.chunks(3) {
            let ratios = gain_ratios(&params, chunk, cfg.trials, cfg.seed)?;
            for (mode, ratio) in chunk.iter().zip(ratios) {
                let mut row = Record::base(cfg, &params.with_mode(*mode));
                row.trials = Some(cfg.trials);
                row.p_hat = Some(ratio);
                summary.rows.push(row);
            }
        }
    }
    Ok(())
}

fn run_bounds_table(cfg: &ExperimentConfig, summary: &mut RunSummary) -> Result<()> {
    for (k, mode) in sweep_values(cfg) {
        let params = cfg.params_for(k, mode);
        for &scheme in &cfg.schemes {
            let Some(s) = analytic_scheme(scheme) else {
                summary
                    .notes
                    .push(format!("bounds-table skips scheme '{scheme}': no closed form"));
                continue;
            };
            for &rho_db in &cfg.rho_db {
                for user in 1..=params.users {
                    let mut row = Record::base(cfg, &params);
                    row.scheme = Some(scheme.label().to_string());
                    row.user = Some(user);
                    row.rho_db = Some(rho_db);
                    match bounds_for(s, &params, cfg, db_to_linear(rho_db), user) {
                        Ok(b) => row = row.with_bounds(Some(&b)),
                        Err(err @ Error::UnsupportedParameters(_)) => note_unavailable(summary, &params, &err),
                        Err(err) => return Err(err),
                    }
                    row.diversity = Some(diversity_order(s, params.scenario, user, &params));
                    summary.rows.push(row);
                }
            }
        }
    }
    Ok(())
}

/// Runs an experiment and returns its rows without touching the filesystem.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let mut summary = RunSummary::default();
    match cfg.kind {
        ExperimentKind::OutageSweep | ExperimentKind::DiversityFit => run_outage(cfg, &mut summary)?,
        ExperimentKind::GainRatio => run_gain_ratio(cfg, &mut summary)?,
        ExperimentKind::BoundsTable => run_bounds_table(cfg, &mut summary)?,
    }
    Ok(summary)
}

/// Runs an experiment and writes its CSV to `cfg.output` (if set).
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let summary = execute(cfg)?;
    if let Some(path) = &cfg.output {
        write_csv_file(path, &summary.rows)?;
    }
    Ok(summary)
}

pub fn write_csv_file(path: &Path, rows: &[Record]) -> Result<()> {
    let file = File::create(path)?;
    write_csv(std::io::BufWriter::new(file), rows)
}

pub fn read_csv_file(path: &Path) -> Result<Vec<Record>> {
    read_csv(File::open(path)?)
}
