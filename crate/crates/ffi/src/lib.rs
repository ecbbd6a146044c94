//! C ABI over `dance-core`.
//!
//! Scenarios and trials are opaque handles created and freed through this
//! interface. Every fallible call returns a [`DanceStatus`]; on failure a
//! description is available from [`dance_last_error`] on the same thread.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`dance_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dance_core::control::tightened_bounds;
use dance_core::dynamics::stopping_distance;
use dance_core::report::summarize;
use dance_core::sim::{corridor_scenario, paper_scenario};
use dance_core::{run_trial, Error, ModelParams, ScenarioConfig, Strategy, StrategyKind, TrialLog};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DanceStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    Parse = 4,
    Validation = 5,
    Domain = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DanceStrategy {
    Tightening = 0,
    Conservative = 1,
    None = 2,
}

impl From<DanceStrategy> for StrategyKind {
    fn from(s: DanceStrategy) -> Self {
        match s {
            DanceStrategy::Tightening => StrategyKind::Tightening,
            DanceStrategy::Conservative => StrategyKind::Conservative,
            DanceStrategy::None => StrategyKind::None,
        }
    }
}

/// Opaque scenario handle.
pub struct DanceScenario(ScenarioConfig);

/// Opaque handle to a completed trial.
pub struct DanceTrial(TrialLog);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(DanceStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Config(_) => DanceStatus::Validation,
            Error::Domain(_) => DanceStatus::Domain,
            Error::UnknownAgent(_) => DanceStatus::InvalidArgument,
            Error::Parse(_) => DanceStatus::Parse,
            Error::Io(_) => DanceStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DanceStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DanceStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DanceStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DanceStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(DanceStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn owned_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure(DanceStatus::InvalidArgument, e.to_string()))
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dance_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dance_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Distance to brake from `v` to rest at `decel_mag`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dance_stopping_distance(v: f64, decel_mag: f64, out: *mut f64) -> DanceStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = stopping_distance(v, decel_mag).map_err(|e| Failure::from(Error::from(e)))?;
        Ok(())
    })
}

/// Tightened upper acceleration bound at speed `v` and free gap `gap`
/// (pass `INFINITY` for an open road).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dance_tightened_upper_bound(
    v: f64,
    gap: f64,
    beta: f64,
    epsilon: f64,
    a_max: f64,
    a_brake_peak: f64,
    out: *mut f64,
) -> DanceStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if !(v >= 0.0 && gap >= 0.0 && beta >= 0.0 && epsilon > 0.0 && a_brake_peak > 0.0) {
            return Err(Failure(DanceStatus::InvalidArgument, "parameters out of range".into()));
        }
        let model = ModelParams {
            a_max,
            a_brake_peak,
            brake_fraction: StrategyKind::Tightening.brake_fraction(),
        };
        *out = tightened_bounds(v, gap, &Strategy::tightening(beta, epsilon), &model).a_hi;
        Ok(())
    })
}

unsafe fn emit_scenario(cfg: ScenarioConfig, out: *mut *mut DanceScenario) -> Result<(), Failure> {
    *out_ref(out, "out")? = Box::into_raw(Box::new(DanceScenario(cfg)));
    Ok(())
}

/// The vehicle-and-cyclist scenario under `strategy`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dance_scenario_paper(
    strategy: DanceStrategy,
    out: *mut *mut DanceScenario,
) -> DanceStatus {
    guard(|| emit_scenario(paper_scenario(strategy.into()), out))
}

/// Two unmitigated vehicles head-on in a corridor.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dance_scenario_corridor(out: *mut *mut DanceScenario) -> DanceStatus {
    guard(|| emit_scenario(corridor_scenario(), out))
}

/// Parse and validate a JSON scenario document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dance_scenario_from_json(
    json: *const c_char,
    out: *mut *mut DanceScenario,
) -> DanceStatus {
    guard(|| {
        let cfg = ScenarioConfig::from_json(text(json, "json")?)?;
        cfg.validate().map_err(Error::from)?;
        emit_scenario(cfg, out)
    })
}

/// Serialize a scenario to JSON. Free the result with `dance_string_free`.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dance_scenario_to_json(
    scenario: *const DanceScenario,
    out: *mut *mut c_char,
) -> DanceStatus {
    guard(|| {
        let sc = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        *out_ref(out, "out")? = owned_string(sc.0.to_json())?;
        Ok(())
    })
}

/// Switch every moving agent to `strategy`.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dance_scenario_set_strategy(
    scenario: *mut DanceScenario,
    strategy: DanceStrategy,
) -> DanceStatus {
    guard(|| {
        let sc = scenario.as_mut().ok_or_else(|| null("scenario"))?;
        sc.0 = sc.0.clone().with_strategy(strategy.into());
        Ok(())
    })
}

/// Release a scenario. Null is ignored.
///
/// # Safety
/// `scenario` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dance_scenario_free(scenario: *mut DanceScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Run a scenario to completion or first collision.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dance_trial_run(
    scenario: *const DanceScenario,
    out: *mut *mut DanceTrial,
) -> DanceStatus {
    guard(|| {
        let sc = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let out = out_ref(out, "out")?;
        *out = Box::into_raw(Box::new(DanceTrial(run_trial(&sc.0)?)));
        Ok(())
    })
}

/// Number of ticks executed.
///
/// # Safety
/// `trial` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dance_trial_tick_count(trial: *const DanceTrial, out: *mut usize) -> DanceStatus {
    guard(|| {
        let tr = trial.as_ref().ok_or_else(|| null("trial"))?;
        *out_ref(out, "out")? = tr.0.ticks;
        Ok(())
    })
}

/// Whether the trial ended in a collision.
///
/// # Safety
/// `trial` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dance_trial_collided(trial: *const DanceTrial, out: *mut bool) -> DanceStatus {
    guard(|| {
        let tr = trial.as_ref().ok_or_else(|| null("trial"))?;
        *out_ref(out, "out")? = tr.0.terminated_by_collision;
        Ok(())
    })
}

/// Per-tick CSV telemetry. Free the result with `dance_string_free`.
///
/// # Safety
/// `trial` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dance_trial_csv(trial: *const DanceTrial, out: *mut *mut c_char) -> DanceStatus {
    guard(|| {
        let tr = trial.as_ref().ok_or_else(|| null("trial"))?;
        *out_ref(out, "out")? = owned_string(tr.0.to_csv())?;
        Ok(())
    })
}

/// Write the CSV telemetry to `path`.
///
/// # Safety
/// `trial` must be a live handle; `path` must be a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dance_trial_write_csv(trial: *const DanceTrial, path: *const c_char) -> DanceStatus {
    guard(|| {
        let tr = trial.as_ref().ok_or_else(|| null("trial"))?;
        let path = text(path, "path")?;
        std::fs::write(path, tr.0.to_csv()).map_err(|e| Failure::from(Error::from(e)))?;
        Ok(())
    })
}

/// JSON summary of the primary agent. Free the result with
/// `dance_string_free`.
///
/// # Safety
/// `trial` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dance_trial_summary_json(
    trial: *const DanceTrial,
    out: *mut *mut c_char,
) -> DanceStatus {
    guard(|| {
        let tr = trial.as_ref().ok_or_else(|| null("trial"))?;
        *out_ref(out, "out")? = owned_string(summarize(&tr.0).to_json())?;
        Ok(())
    })
}

/// Release a trial. Null is ignored.
///
/// # Safety
/// `trial` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dance_trial_free(trial: *mut DanceTrial) {
    if !trial.is_null() {
        drop(Box::from_raw(trial));
    }
}
