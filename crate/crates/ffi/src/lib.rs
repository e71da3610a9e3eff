//! C interface to `diagbbw`.
//!
//! Scenarios and analyses are opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call
//! returns a [`BbwStatus`]; on failure [`bbw_last_error`] describes it.
//! Strings returned by the library are freed with [`bbw_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use diagbbw::bbw::{analyze, Analysis, AnalyzeOptions, Verdict};
use diagbbw::rootdata::{Chamber, EpsWeight, Family, Level, LinearOrder, Straightened};
use diagbbw::scenario::Loaded;
use diagbbw::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Precondition = 5,
    Domain = 6,
    LevelOutOfRange = 7,
    Construction = 8,
    SearchLimit = 9,
    Internal = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbwVerdict {
    Acyclic = 0,
    Nonvanishing = 1,
    Undetermined = 2,
}

/// A loaded and validated scenario.
pub struct BbwScenario {
    inner: Loaded,
}

/// The result of `bbw_analyze`.
pub struct BbwAnalysis {
    inner: Analysis,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(BbwStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Validation(_) => BbwStatus::Validation,
            Error::Precondition(_) => BbwStatus::Precondition,
            Error::Domain(_) => BbwStatus::Domain,
            Error::LevelOutOfRange { .. } => BbwStatus::LevelOutOfRange,
            Error::Construction(_) => BbwStatus::Construction,
            Error::SearchLimit(_) => BbwStatus::SearchLimit,
            Error::Parse(_) => BbwStatus::Parse,
            Error::Internal(_) => BbwStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: Option<String>) {
    let c = msg.map(|m| CString::new(m.replace('\0', " ")).expect("no interior nul"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BbwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            BbwStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(_) => {
            set_error(Some("panic inside diagbbw".into()));
            BbwStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(BbwStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(BbwStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bbw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL after a
/// successful one. Valid until the next call into the library.
#[no_mangle]
pub extern "C" fn bbw_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Load a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bbw_scenario_load(path: *const c_char, out: *mut *mut BbwScenario) -> BbwStatus {
    guard(|| {
        let path = text(path, "path")?;
        let inner = Loaded::from_file(Path::new(path))?;
        write(out, Box::into_raw(Box::new(BbwScenario { inner })), "out")
    })
}

/// Parse a scenario from TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bbw_scenario_parse(toml: *const c_char, out: *mut *mut BbwScenario) -> BbwStatus {
    guard(|| {
        let toml = text(toml, "toml")?;
        let inner = Loaded::from_str_named(toml, "<memory>")?;
        write(out, Box::into_raw(Box::new(BbwScenario { inner })), "out")
    })
}

/// # Safety
/// `scenario` must come from `bbw_scenario_load` or `bbw_scenario_parse`
/// and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bbw_scenario_free(scenario: *mut BbwScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bbw_scenario_num_levels(scenario: *const BbwScenario, out: *mut usize) -> BbwStatus {
    guard(|| {
        let s = handle(scenario, "scenario")?;
        write(out, s.inner.system.num_levels(), "out")
    })
}

/// Rank of the group at `level` (1-based).
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bbw_scenario_rank(scenario: *const BbwScenario, level: usize, out: *mut usize) -> BbwStatus {
    guard(|| {
        let s = handle(scenario, "scenario")?;
        write(out, s.inner.system.level(level)?.rank(), "out")
    })
}

/// Analyze the scenario's weight. A zero `horizon` or `window` takes the
/// scenario's value, or the library default.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bbw_analyze(
    scenario: *const BbwScenario,
    horizon: usize,
    window: usize,
    out: *mut *mut BbwAnalysis,
) -> BbwStatus {
    guard(|| {
        let s = &handle(scenario, "scenario")?.inner;
        let mut options: AnalyzeOptions = s.scenario.options.analyze_options();
        if horizon > 0 {
            options.horizon = Some(horizon);
        }
        if window > 0 {
            options.window = window;
        }
        let inner = analyze(&s.system, &s.borel, s.weights()?, options)?;
        write(out, Box::into_raw(Box::new(BbwAnalysis { inner })), "out")
    })
}

/// # Safety
/// `analysis` must come from `bbw_analyze` and not have been freed.
/// NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bbw_analysis_free(analysis: *mut BbwAnalysis) {
    if !analysis.is_null() {
        drop(Box::from_raw(analysis));
    }
}

/// # Safety
/// `analysis` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bbw_analysis_verdict(analysis: *const BbwAnalysis, out: *mut BbwVerdict) -> BbwStatus {
    guard(|| {
        let v = match handle(analysis, "analysis")?.inner.verdict {
            Verdict::Acyclic { .. } => BbwVerdict::Acyclic,
            Verdict::Nonvanishing { .. } => BbwVerdict::Nonvanishing,
            Verdict::Undetermined { .. } => BbwVerdict::Undetermined,
        };
        write(out, v, "out")
    })
}

/// The cohomological degree; fails with `PRECONDITION` unless the verdict
/// is nonvanishing.
///
/// # Safety
/// `analysis` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bbw_analysis_degree(analysis: *const BbwAnalysis, out: *mut usize) -> BbwStatus {
    guard(|| match handle(analysis, "analysis")?.inner.verdict.degree() {
        Some(j) => write(out, j, "out"),
        None => Err(Failure(BbwStatus::Precondition, "the verdict is not nonvanishing".into())),
    })
}

/// The full analysis as JSON. Free the result with `bbw_string_free`.
///
/// # Safety
/// `analysis` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bbw_analysis_to_json(analysis: *const BbwAnalysis, out: *mut *mut c_char) -> BbwStatus {
    guard(|| {
        let a = handle(analysis, "analysis")?;
        let json = serde_json::to_string_pretty(&a.inner).map_err(|e| Failure(BbwStatus::Internal, e.to_string()))?;
        let c = CString::new(json).map_err(|e| Failure(BbwStatus::Internal, e.to_string()))?;
        write(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bbw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Straighten one weight. `family` is one of `'A'`..`'D'`; `order` holds
/// the 1-based signed order entries and `twice` the doubled ε-coordinates,
/// both of length `rank + 1` for A and `rank` otherwise. On a regular
/// weight `*regular` is set, `*degree` receives the length and
/// `dominant_twice` the doubled dominant weight; on a singular one only
/// `*regular` is written.
///
/// # Safety
/// The arrays must hold the stated number of elements and the output
/// pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bbw_straighten(
    family: c_char,
    rank: usize,
    order: *const i64,
    twice: *const i64,
    regular: *mut bool,
    degree: *mut usize,
    dominant_twice: *mut i64,
) -> BbwStatus {
    guard(|| {
        let family: Family = match family as u8 {
            b @ (b'A'..=b'D' | b'a'..=b'd') => (b as char).to_string().parse()?,
            other => return Err(Failure(BbwStatus::Validation, format!("unknown family code {other}"))),
        };
        let level = Level::new(family, rank)?;
        let dim = level.dim();
        if order.is_null() {
            return Err(null("order"));
        }
        if twice.is_null() {
            return Err(null("twice"));
        }
        let entries = std::slice::from_raw_parts(order, dim);
        let coords = std::slice::from_raw_parts(twice, dim);
        let chamber = Chamber::new(level, LinearOrder::from_signed(level, entries)?)?;
        match chamber.straighten(&EpsWeight::from_twice(coords.to_vec()))? {
            Straightened::Singular => write(regular, false, "regular"),
            Straightened::Regular { degree: d, dominant, .. } => {
                if dominant_twice.is_null() {
                    return Err(null("dominant_twice"));
                }
                write(degree, d, "degree")?;
                std::slice::from_raw_parts_mut(dominant_twice, dim).copy_from_slice(dominant.twice());
                write(regular, true, "regular")
            }
        }
    })
}
