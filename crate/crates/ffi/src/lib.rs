//! C ABI over `cogbeam`.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free`. Every fallible call returns a [`CbStatus`];
//! on failure [`cb_last_error`] describes the problem. Panics never cross
//! the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cogbeam::channel::{export_mpcs, generate_synthetic_scenario, GenParams, Scenario};
use cogbeam::coexistence::{build_power_tables, select_sbs_beams, ConstraintSpec};
use cogbeam::evaluation::{run_monte_carlo, Method};
use cogbeam::experiment::{build_scenario, parse_config};
use cogbeam::sensing::{ml_detect, SignatureTable, DEFAULT_ENUMERATION_CAP};
use cogbeam::{BeamMask, Error, Owner};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Capacity = 3,
    Parse = 4,
    Calibration = 5,
    Io = 6,
    Panic = 7,
}

pub const CB_METHOD_PROPOSED: u32 = 0;
pub const CB_METHOD_MDBA: u32 = 1;
pub const CB_METHOD_BDBA: u32 = 2;

/// Opaque scenario handle.
pub struct CbScenario(Scenario);

/// Opaque signature-table handle.
pub struct CbSignatureTable(SignatureTable);

/// Monte-Carlo metrics. Undefined ratios are NaN with their flag cleared.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CbMetrics {
    pub pmo: f64,
    pub pci: f64,
    pub throughput: f64,
    pub detector_error: f64,
    pub stderr_pmo: f64,
    pub stderr_pci: f64,
    pub stderr_thru: f64,
    pub pmo_defined: bool,
    pub pci_defined: bool,
    pub intervals: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Config(_) => CbStatus::InvalidArgument,
            Error::Capacity { .. } => CbStatus::Capacity,
            Error::Parse { .. } => CbStatus::Parse,
            Error::Calibration(_) => CbStatus::Calibration,
            Error::Io { .. } => CbStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CbStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            CbStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(CbStatus::NullPointer, format!("`{name}` is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(CbStatus::InvalidArgument, msg.into())
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("`{name}` is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

fn method(code: u32) -> Result<Method, Failure> {
    match code {
        CB_METHOD_PROPOSED => Ok(Method::Proposed),
        CB_METHOD_MDBA => Ok(Method::Mdba),
        CB_METHOD_BDBA => Ok(Method::Bdba),
        other => Err(invalid(format!("unknown method code {other}"))),
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Synthetic scenario with default parameters.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cb_scenario_synthetic(seed: u64, out: *mut *mut CbScenario) -> CbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = generate_synthetic_scenario(&GenParams::default(), seed)?;
        write_out(out, Box::into_raw(Box::new(CbScenario(s))), "out")
    })
}

/// Scenario described by experiment-config TOML text.
///
/// # Safety
/// `config` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cb_scenario_from_config(config: *const c_char, out: *mut *mut CbScenario) -> CbStatus {
    guard(|| {
        let text = text(config, "config")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = build_scenario(&parse_config(text)?)?;
        write_out(out, Box::into_raw(Box::new(CbScenario(s))), "out")
    })
}

/// # Safety
/// `scenario` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cb_scenario_free(scenario: *mut CbScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Beam and UE counts of a scenario.
///
/// # Safety
/// `scenario` must be a live handle; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cb_scenario_dims(
    scenario: *const CbScenario,
    pbs_beams: *mut u32,
    sbs_beams: *mut u32,
    num_ues: *mut u32,
) -> CbStatus {
    guard(|| {
        let s = &deref(scenario, "scenario")?.0;
        write_out(pbs_beams, s.pbs.num_beams() as u32, "pbs_beams")?;
        write_out(sbs_beams, s.sbs.num_beams() as u32, "sbs_beams")?;
        write_out(num_ues, s.num_ues() as u32, "num_ues")
    })
}

/// Sets the SBS power to the PBS power scaled by `ratio_db`.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cb_scenario_set_power_ratio_db(scenario: *mut CbScenario, ratio_db: f64) -> CbStatus {
    guard(|| {
        let s = scenario.as_mut().ok_or_else(|| null("scenario"))?;
        if !ratio_db.is_finite() {
            return Err(invalid("power ratio must be finite"));
        }
        s.0.set_power_ratio_db(ratio_db);
        Ok(())
    })
}

/// MPC text export. Release the string with [`cb_string_free`].
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cb_scenario_export_mpcs(scenario: *const CbScenario, out: *mut *mut c_char) -> CbStatus {
    guard(|| {
        let s = &deref(scenario, "scenario")?.0;
        let c = CString::new(export_mpcs(s)).map_err(|_| invalid("export contains NUL"))?;
        write_out(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn spec(theta_db: f64, cap: f64) -> Result<ConstraintSpec, Failure> {
    Ok(ConstraintSpec::from_db(theta_db, cap)?)
}

/// Monte-Carlo run of one method with exact signatures.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cb_monte_carlo(
    scenario: *const CbScenario,
    theta_db: f64,
    cap: f64,
    samples: u32,
    intervals: u32,
    method_code: u32,
    seed: u64,
    out: *mut CbMetrics,
) -> CbStatus {
    guard(|| {
        let s = &deref(scenario, "scenario")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = run_monte_carlo(
            s,
            &spec(theta_db, cap)?,
            samples as usize,
            intervals as usize,
            method(method_code)?,
            seed,
        )?;
        let metrics = CbMetrics {
            pmo: r.pmo.unwrap_or(f64::NAN),
            pci: r.pci.unwrap_or(f64::NAN),
            throughput: r.throughput,
            detector_error: r.detector_error_rate,
            stderr_pmo: r.stderr_pmo.unwrap_or(f64::NAN),
            stderr_pci: r.stderr_pci.unwrap_or(f64::NAN),
            stderr_thru: r.stderr_thru,
            pmo_defined: r.pmo.is_some(),
            pci_defined: r.pci.is_some(),
            intervals: r.intervals as u64,
        };
        write_out(out, metrics, "out")
    })
}

/// Exact signatures of every PBS mask.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cb_signatures_exact(scenario: *const CbScenario, out: *mut *mut CbSignatureTable) -> CbStatus {
    guard(|| {
        let s = &deref(scenario, "scenario")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let t = SignatureTable::exact(s, DEFAULT_ENUMERATION_CAP)?;
        write_out(out, Box::into_raw(Box::new(CbSignatureTable(t))), "out")
    })
}

/// # Safety
/// `table` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cb_signatures_free(table: *mut CbSignatureTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Maximum-likelihood PBS mask for an energy vector of one entry per SBS
/// beam. Bit `k` of `mask` is PBS beam `k`.
///
/// # Safety
/// `energies` must point to `len` readable doubles; `mask` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cb_ml_detect(
    table: *const CbSignatureTable,
    energies: *const f64,
    len: usize,
    mask: *mut u32,
) -> CbStatus {
    guard(|| {
        let t = &deref(table, "table")?.0;
        if energies.is_null() {
            return Err(null("energies"));
        }
        if len != t.sbs_beams() {
            return Err(invalid(format!("expected {} energies, got {len}", t.sbs_beams())));
        }
        let x = std::slice::from_raw_parts(energies, len);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(invalid("energies must be finite"));
        }
        write_out(mask, ml_detect(x, t).bits(), "mask")
    })
}

/// Beam selection for a PBS mask. Bit `l` of `sbs_mask` is SBS beam `l`.
///
/// # Safety
/// `scenario` must be a live handle; `sbs_mask` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cb_select_sbs_beams(
    scenario: *const CbScenario,
    theta_db: f64,
    cap: f64,
    pbs_mask: u32,
    sbs_mask: *mut u32,
) -> CbStatus {
    guard(|| {
        let s = &deref(scenario, "scenario")?.0;
        let b = s.pbs.num_beams();
        if b < 32 && pbs_mask >> b != 0 {
            return Err(invalid(format!("PBS mask {pbs_mask:#x} has bits beyond {b} beams")));
        }
        let tables = build_power_tables(s);
        let pm = BeamMask::from_bits(Owner::Pbs, b, pbs_mask);
        let chosen = select_sbs_beams(&pm, &tables, &spec(theta_db, cap)?, s, DEFAULT_ENUMERATION_CAP)?;
        write_out(sbs_mask, chosen.bits(), "sbs_mask")
    })
}
