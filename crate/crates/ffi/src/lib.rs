//! C ABI over the `irs-noma` simulator.
//!
//! Handles are opaque heap objects created by `*_new` and released by the
//! matching `*_free`. Every fallible call returns an [`IrsStatus`]; on
//! failure [`irs_last_error_message`] copies a description of the most
//! recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use irs_noma::analytic::{self, NomaConfig, Scheme};
use irs_noma::channel::{Scenario, ScenarioParams};
use irs_noma::experiments::{self, ExperimentConfig};
use irs_noma::montecarlo;
use irs_noma::phase::PhaseMode;
use irs_noma::special;
use irs_noma::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    LengthMismatch = 3,
    UnsupportedParameters = 4,
    InfeasibleAllocation = 5,
    InsufficientData = 6,
    ConfigError = 7,
    IoError = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Channel and IRS parameters of one scenario.
pub struct IrsScenario(ScenarioParams);

/// NOMA power allocation and target rates.
pub struct IrsNoma(NomaConfig);

/// Outage estimate of one user.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct IrsEstimate {
    pub user: usize,
    pub trials: u64,
    pub failures: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Analytic outage bounds and diversity order.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct IrsBounds {
    pub upper: f64,
    pub lower: f64,
    pub diversity: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> IrsStatus {
    match err {
        Error::InvalidParameter(_) => IrsStatus::InvalidParameter,
        Error::LengthMismatch { .. } => IrsStatus::LengthMismatch,
        Error::UnsupportedParameters(_) => IrsStatus::UnsupportedParameters,
        Error::InfeasibleAllocation { .. } => IrsStatus::InfeasibleAllocation,
        Error::InsufficientData(_) => IrsStatus::InsufficientData,
        Error::Config(_) => IrsStatus::ConfigError,
        Error::Io(_) | Error::Csv(_) => IrsStatus::IoError,
    }
}

struct Failure(IrsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), format!("{}: {e}", e.code()))
    }
}

fn null(what: &str) -> Failure {
    Failure(IrsStatus::NullPointer, format!("null pointer: {what}"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IrsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IrsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside irs-noma".into());
            IrsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn scheme_of(code: u32) -> Result<Scheme, Failure> {
    match code {
        0 => Ok(Scheme::Noma),
        1 => Ok(Scheme::Oma),
        other => Err(Failure(
            IrsStatus::InvalidParameter,
            format!("unknown scheme code {other}"),
        )),
    }
}

fn scenario_of(code: u32) -> Result<Scenario, Failure> {
    match code {
        1 => Ok(Scenario::NoDirectLink),
        2 => Ok(Scenario::WithDirectLink),
        other => Err(Failure(
            IrsStatus::InvalidParameter,
            format!("unknown scenario {other}"),
        )),
    }
}

/// Copies the last error message of this thread into `buf` as a
/// NUL-terminated string, truncating if needed. Returns the full message
/// length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn irs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn irs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Gamma function for `x > 0`.
///
/// # Safety
/// `result` must be null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irs_gamma(x: f64, result: *mut f64) -> IrsStatus {
    guard(|| {
        *out(result, "result")? = special::gamma_fn(x)?;
        Ok(())
    })
}

/// Creates a scenario. `scenario` is 1 (no direct link) or 2 (direct
/// link); `bits = 0` selects continuous phases.
///
/// # Safety
/// `handle` must be null or a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn irs_scenario_new(
    scenario: u32,
    users: usize,
    elements: usize,
    bits: u32,
    beta: f64,
    m_big_g: f64,
    m_g: f64,
    m_h: f64,
    handle: *mut *mut IrsScenario,
) -> IrsStatus {
    guard(|| {
        let handle = out(handle, "handle")?;
        let mode = if bits == 0 {
            PhaseMode::Continuous
        } else {
            PhaseMode::discrete(bits)?
        };
        let params = ScenarioParams::new(scenario_of(scenario)?, users, elements, mode, beta, m_big_g, m_g, m_h)?;
        *handle = Box::into_raw(Box::new(IrsScenario(params)));
        Ok(())
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `handle` must come from [`irs_scenario_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn irs_scenario_free(handle: *mut IrsScenario) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Creates a NOMA configuration from `users` power coefficients and rates.
///
/// # Safety
/// `alphas` and `rates` must be valid for `users` elements; `handle` must be
/// null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irs_noma_new(
    alphas: *const f64,
    rates: *const f64,
    users: usize,
    handle: *mut *mut IrsNoma,
) -> IrsStatus {
    guard(|| {
        let handle = out(handle, "handle")?;
        let cfg = NomaConfig::new(
            slice(alphas, users, "alphas")?.to_vec(),
            slice(rates, users, "rates")?.to_vec(),
        )?;
        *handle = Box::into_raw(Box::new(IrsNoma(cfg)));
        Ok(())
    })
}

/// Default allocation for 2, 3 or 4 users.
///
/// # Safety
/// `handle` must be null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irs_noma_default(users: usize, handle: *mut *mut IrsNoma) -> IrsStatus {
    guard(|| {
        let handle = out(handle, "handle")?;
        *handle = Box::into_raw(Box::new(IrsNoma(NomaConfig::defaults(users)?)));
        Ok(())
    })
}

/// Releases a NOMA configuration. Null is ignored.
///
/// # Safety
/// `handle` must come from [`irs_noma_new`] or [`irs_noma_default`] and not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn irs_noma_free(handle: *mut IrsNoma) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Analytic outage bounds of user `user` (1-based, strongest last) at
/// transmit SNR `rho_db`. `scheme` is 0 for NOMA, 1 for OMA.
///
/// # Safety
/// Pointers must be valid handles / writable.
#[no_mangle]
pub unsafe extern "C" fn irs_outage_bounds(
    scenario: *const IrsScenario,
    noma: *const IrsNoma,
    scheme: u32,
    user: usize,
    rho_db: f64,
    result: *mut IrsBounds,
) -> IrsStatus {
    guard(|| {
        let params = &deref(scenario, "scenario")?.0;
        let cfg = &deref(noma, "noma")?.0;
        let result = out(result, "result")?;
        let rho = analytic::db_to_linear(rho_db);
        let b = match scheme_of(scheme)? {
            Scheme::Noma => analytic::outage_bounds_noma(user, params, &analytic::thresholds_for(cfg, rho)?)?,
            Scheme::Oma => analytic::outage_bounds_oma(params, &cfg.rates, rho)?,
        };
        *result = IrsBounds {
            upper: b.upper,
            lower: b.lower,
            diversity: b.diversity,
        };
        Ok(())
    })
}

/// Monte Carlo outage estimate for every user at `rho_db`. `results` must
/// hold `capacity >= users` entries.
///
/// # Safety
/// Pointers must be valid handles; `results` valid for `capacity` entries.
#[no_mangle]
pub unsafe extern "C" fn irs_estimate_outage(
    scenario: *const IrsScenario,
    noma: *const IrsNoma,
    scheme: u32,
    rho_db: f64,
    trials: u64,
    seed: u64,
    results: *mut IrsEstimate,
    capacity: usize,
) -> IrsStatus {
    guard(|| {
        let params = &deref(scenario, "scenario")?.0;
        let cfg = &deref(noma, "noma")?.0;
        if results.is_null() {
            return Err(null("results"));
        }
        if capacity < params.users {
            return Err(Failure(
                IrsStatus::BufferTooSmall,
                format!("results holds {capacity} entries, need {}", params.users),
            ));
        }
        let rho = analytic::db_to_linear(rho_db);
        let estimates = montecarlo::estimate_outage(params, cfg, scheme_of(scheme)?, rho, trials, seed)?;
        let dst = std::slice::from_raw_parts_mut(results, capacity);
        for (d, e) in dst.iter_mut().zip(&estimates) {
            *d = IrsEstimate {
                user: e.user,
                trials: e.trials,
                failures: e.failures,
                p_hat: e.p_hat,
                ci_low: e.ci_low,
                ci_high: e.ci_high,
            };
        }
        Ok(())
    })
}

/// Mean discrete-phase gain over mean continuous-phase gain for the
/// scenario's resolution.
///
/// # Safety
/// `scenario` must be a valid handle; `result` writable.
#[no_mangle]
pub unsafe extern "C" fn irs_gain_ratio(
    scenario: *const IrsScenario,
    trials: u64,
    seed: u64,
    result: *mut f64,
) -> IrsStatus {
    guard(|| {
        let params = &deref(scenario, "scenario")?.0;
        *out(result, "result")? = montecarlo::gain_ratio(params, trials, seed)?;
        Ok(())
    })
}

/// Runs the experiment in config file `path` and writes its CSV to the
/// configured output. `rows`, if not null, receives the row count.
///
/// # Safety
/// `path` must be a NUL-terminated string; `rows` null or writable.
#[no_mangle]
pub unsafe extern "C" fn irs_run_config(path: *const c_char, rows: *mut usize) -> IrsStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Failure(IrsStatus::InvalidParameter, "path is not UTF-8".into()))?;
        let text = std::fs::read_to_string(PathBuf::from(path)).map_err(Error::from)?;
        let summary = experiments::run(&ExperimentConfig::parse(&text)?)?;
        if let Some(rows) = rows.as_mut() {
            *rows = summary.rows.len();
        }
        Ok(())
    })
}
