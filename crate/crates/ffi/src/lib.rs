//! C interface to `ifb-core`.
//!
//! Objects cross the boundary as opaque handles created by `ifb_*_new` or
//! producer functions and released with the matching `ifb_*_free`. Every
//! fallible call returns an [`IfbStatus`]; on failure a description is
//! available from [`ifb_last_error`] on the same thread.
//!
//! Arrays are passed as pointer plus length. Output arrays are filled by
//! `*_copy` functions that take the capacity of the caller's buffer and
//! fail with `IFB_STATUS_BUFFER_TOO_SMALL` when it is short.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ifb_core::pipeline::{analyze, Analysis, Method, PipelineConfig};
use ifb_core::sim::{simulate, SimParams};
use ifb_core::{CorrKind, CorrMeasure, Error, Signal, TrimMode};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IfbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    TooShort = 4,
    BufferTooSmall = 5,
    NotImplemented = 6,
    Internal = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IfbMeasure {
    Pearson = 0,
    Kendall = 1,
    Quadrant = 2,
    Trimmed = 3,
    SpectralKurtosis = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IfbTrimMode {
    Zero = 0,
    Delete = 1,
}

/// Simulation parameters; start from [`ifb_sim_params_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IfbSimParams {
    pub sample_rate: f64,
    pub duration: f64,
    pub fault_freq: f64,
    pub soi_carrier: f64,
    pub nc_carrier: f64,
    pub aci: f64,
    pub anci_max: f64,
    pub nc_count: f64,
    pub bw_min: f64,
    pub bw_max: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

/// Pipeline settings; start from [`ifb_pipeline_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IfbPipelineConfig {
    pub measure: IfbMeasure,
    pub trim_c: f64,
    pub trim_mode: IfbTrimMode,
    pub segments: usize,
    pub median_filter: bool,
    pub fault_freq: f64,
    pub harmonics: usize,
    pub peak_tol: f64,
}

/// ENVSI of the raw and filtered signal.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct IfbEnvsi {
    pub raw: f64,
    pub filtered: f64,
    /// Relative improvement in percent; NaN when the raw ENVSI is zero.
    pub score_pct: f64,
    /// True when the selector was all zeros and nothing was filtered.
    pub degenerate: bool,
}

/// Opaque signal handle.
pub struct IfbSignal(Signal);

/// Opaque analysis result handle.
pub struct IfbAnalysis(Analysis);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> IfbStatus {
    match err {
        Error::InvalidParameter(_) | Error::Stage { .. } | Error::EmptyHarmonicWindow { .. } => {
            IfbStatus::InvalidArgument
        }
        Error::LengthMismatch { .. } => IfbStatus::LengthMismatch,
        Error::TooShort { .. } => IfbStatus::TooShort,
        Error::NotImplemented(_) => IfbStatus::NotImplemented,
        _ => IfbStatus::Internal,
    }
}

/// Runs `f`, recording errors and panics as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), IfbStatus>) -> IfbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IfbStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            IfbStatus::Panic
        }
    }
}

fn fail(err: Error) -> IfbStatus {
    set_error(err.to_string());
    status_of(&err)
}

fn null(what: &str) -> IfbStatus {
    set_error(format!("{what} is null"));
    IfbStatus::NullPointer
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], IfbStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn copy_out(src: &[f64], dst: *mut f64, capacity: usize, what: &str) -> Result<(), IfbStatus> {
    if src.len() > capacity {
        set_error(format!("{what} needs {} values, buffer holds {capacity}", src.len()));
        return Err(IfbStatus::BufferTooSmall);
    }
    if src.is_empty() {
        return Ok(());
    }
    if dst.is_null() {
        return Err(null(what));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

fn measure_of(kind: IfbMeasure, trim_c: f64, trim_mode: IfbTrimMode) -> Method {
    let kind = match kind {
        IfbMeasure::Pearson => CorrKind::Pearson,
        IfbMeasure::Kendall => CorrKind::Kendall,
        IfbMeasure::Quadrant => CorrKind::Quadrant,
        IfbMeasure::Trimmed => CorrKind::Trimmed,
        IfbMeasure::SpectralKurtosis => return Method::SpectralKurtosis,
    };
    let mut m = CorrMeasure::new(kind);
    if kind == CorrKind::Trimmed {
        m.trim_c = trim_c;
        m.trim_mode = match trim_mode {
            IfbTrimMode::Zero => TrimMode::Zero,
            IfbTrimMode::Delete => TrimMode::Delete,
        };
    }
    Method::Correlation(m)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ifb_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ifb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

// ---------------------------------------------------------------------------
// Signals

/// Copies `len` samples into a new signal.
#[no_mangle]
pub unsafe extern "C" fn ifb_signal_new(
    samples: *const f64,
    len: usize,
    sample_rate: f64,
    out: *mut *mut IfbSignal,
) -> IfbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let data = slice(samples, len, "samples")?.to_vec();
        let signal = Signal::new(data, sample_rate).map_err(fail)?;
        *out = Box::into_raw(Box::new(IfbSignal(signal)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ifb_signal_free(signal: *mut IfbSignal) {
    if !signal.is_null() {
        drop(Box::from_raw(signal));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ifb_signal_len(signal: *const IfbSignal) -> usize {
    signal.as_ref().map_or(0, |s| s.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn ifb_signal_sample_rate(signal: *const IfbSignal) -> f64 {
    signal.as_ref().map_or(0.0, |s| s.0.sample_rate())
}

#[no_mangle]
pub unsafe extern "C" fn ifb_signal_copy(signal: *const IfbSignal, out: *mut f64, capacity: usize) -> IfbStatus {
    guard(|| {
        let s = signal.as_ref().ok_or_else(|| null("signal"))?;
        copy_out(s.0.samples(), out, capacity, "samples")
    })
}

// ---------------------------------------------------------------------------
// Simulation

#[no_mangle]
pub extern "C" fn ifb_sim_params_default() -> IfbSimParams {
    let p = SimParams::default();
    IfbSimParams {
        sample_rate: p.sample_rate,
        duration: p.duration,
        fault_freq: p.fault_freq,
        soi_carrier: p.soi_carrier,
        nc_carrier: p.nc_carrier,
        aci: p.aci,
        anci_max: p.anci_max,
        nc_count: p.nc_count,
        bw_min: p.bw_range.0,
        bw_max: p.bw_range.1,
        noise_sigma: p.noise_sigma,
        seed: p.seed,
    }
}

/// Simulates the mixed signal `x` for `params`.
#[no_mangle]
pub unsafe extern "C" fn ifb_simulate(params: *const IfbSimParams, out: *mut *mut IfbSignal) -> IfbStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let sim = simulate(&SimParams {
            sample_rate: p.sample_rate,
            duration: p.duration,
            fault_freq: p.fault_freq,
            soi_carrier: p.soi_carrier,
            nc_carrier: p.nc_carrier,
            aci: p.aci,
            anci_max: p.anci_max,
            nc_count: p.nc_count,
            bw_range: (p.bw_min, p.bw_max),
            noise_sigma: p.noise_sigma,
            seed: p.seed,
        })
        .map_err(fail)?;
        *out = Box::into_raw(Box::new(IfbSignal(sim.x)));
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Correlation

/// One correlation coefficient between `x` and `y`. `trim_c` and
/// `trim_mode` are used by the trimmed measure only.
#[no_mangle]
pub unsafe extern "C" fn ifb_correlation(
    measure: IfbMeasure,
    x: *const f64,
    y: *const f64,
    len: usize,
    trim_c: f64,
    trim_mode: IfbTrimMode,
    out_value: *mut f64,
    out_degenerate: *mut bool,
) -> IfbStatus {
    guard(|| {
        let Method::Correlation(m) = measure_of(measure, trim_c, trim_mode) else {
            set_error("spectral kurtosis is not a correlation measure");
            return Err(IfbStatus::InvalidArgument);
        };
        let (x, y) = (slice(x, len, "x")?, slice(y, len, "y")?);
        if out_value.is_null() {
            return Err(null("out_value"));
        }
        let e = m.estimate(x, y).map_err(fail)?;
        *out_value = e.value;
        if !out_degenerate.is_null() {
            *out_degenerate = e.degenerate;
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Pipeline

#[no_mangle]
pub extern "C" fn ifb_pipeline_config_default() -> IfbPipelineConfig {
    let p = PipelineConfig::default();
    let (trim_c, trim_mode) = match p.method {
        Method::Correlation(m) => (m.trim_c, m.trim_mode),
        Method::SpectralKurtosis => (ifb_core::corr::DEFAULT_TRIM_C, TrimMode::Zero),
    };
    IfbPipelineConfig {
        measure: IfbMeasure::Trimmed,
        trim_c,
        trim_mode: match trim_mode {
            TrimMode::Zero => IfbTrimMode::Zero,
            TrimMode::Delete => IfbTrimMode::Delete,
        },
        segments: p.segments,
        median_filter: p.median_filter,
        fault_freq: p.fault_freq,
        harmonics: p.harmonics,
        peak_tol: p.peak_tol,
    }
}

/// Selects the band, filters and scores `signal`.
#[no_mangle]
pub unsafe extern "C" fn ifb_analyze(
    signal: *const IfbSignal,
    config: *const IfbPipelineConfig,
    out: *mut *mut IfbAnalysis,
) -> IfbStatus {
    guard(|| {
        let s = signal.as_ref().ok_or_else(|| null("signal"))?;
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = PipelineConfig {
            segments: c.segments,
            method: measure_of(c.measure, c.trim_c, c.trim_mode),
            median_filter: c.median_filter,
            fault_freq: c.fault_freq,
            harmonics: c.harmonics,
            peak_tol: c.peak_tol,
            ..PipelineConfig::default()
        };
        cfg.validate().map_err(fail)?;
        let a = analyze(&s.0, &cfg).map_err(fail)?;
        *out = Box::into_raw(Box::new(IfbAnalysis(a)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ifb_analysis_free(analysis: *mut IfbAnalysis) {
    if !analysis.is_null() {
        drop(Box::from_raw(analysis));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ifb_analysis_envsi(analysis: *const IfbAnalysis, out: *mut IfbEnvsi) -> IfbStatus {
    guard(|| {
        let a = analysis.as_ref().ok_or_else(|| null("analysis"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = &a.0.report;
        *out = IfbEnvsi {
            raw: r.envsi_raw,
            filtered: r.envsi_filtered,
            score_pct: r.score_pct.unwrap_or(f64::NAN),
            degenerate: r.degenerate,
        };
        Ok(())
    })
}

/// Number of frequency bins in the selector.
#[no_mangle]
pub unsafe extern "C" fn ifb_analysis_selector_len(analysis: *const IfbAnalysis) -> usize {
    analysis.as_ref().map_or(0, |a| a.0.selector.values.len())
}

/// Copies the selector values and, when `freqs` is non-null, the bin
/// frequencies in Hz.
#[no_mangle]
pub unsafe extern "C" fn ifb_analysis_selector_copy(
    analysis: *const IfbAnalysis,
    values: *mut f64,
    freqs: *mut f64,
    capacity: usize,
) -> IfbStatus {
    guard(|| {
        let a = analysis.as_ref().ok_or_else(|| null("analysis"))?;
        copy_out(&a.0.selector.values, values, capacity, "values")?;
        if !freqs.is_null() {
            copy_out(&a.0.selector.freqs, freqs, capacity, "freqs")?;
        }
        Ok(())
    })
}

/// Frequency of the selector maximum, Hz.
#[no_mangle]
pub unsafe extern "C" fn ifb_analysis_selector_argmax_hz(analysis: *const IfbAnalysis) -> f64 {
    analysis.as_ref().map_or(f64::NAN, |a| a.0.selector.argmax_freq())
}

/// Copies the filtered signal; its length equals the input signal's.
#[no_mangle]
pub unsafe extern "C" fn ifb_analysis_filtered_copy(
    analysis: *const IfbAnalysis,
    out: *mut f64,
    capacity: usize,
) -> IfbStatus {
    guard(|| {
        let a = analysis.as_ref().ok_or_else(|| null("analysis"))?;
        copy_out(a.0.filtered.samples(), out, capacity, "filtered")
    })
}
