//! C ABI over `capmimo-core`.
//!
//! Objects are opaque handles created by `*_new` and released by `*_free`.
//! Every fallible call returns a [`CapmimoStatus`]; on failure the message is
//! available from [`capmimo_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use capmimo_core::models::{dof_estimate, mi_continuous, mi_discrete_rx, mi_discrete_trx, DEFAULT_DOF_THRESHOLD};
use capmimo_core::physics::{default_inner_points, green_scalar, operator_trace};
use capmimo_core::{Channel, Error, SpectralResult, SystemConfig};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapmimoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    TooFewPoints = 3,
    NotHermitian = 4,
    NotPositiveSemidefinite = 5,
    NumericalFailure = 6,
    ZeroTrace = 7,
    BufferTooSmall = 8,
    Panic = 99,
}

/// Scenario plus quadrature settings.
pub struct CapmimoSystem {
    channel: Channel,
}

/// Eigenvalues of a continuous-operator reference grid, nonincreasing.
pub struct CapmimoSpectrum {
    spectrum: SpectralResult,
    weight: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> CapmimoStatus {
    match err {
        Error::InvalidConfig(_) | Error::InvalidArgument(_) | Error::EmptyGrid | Error::InsufficientFitPoints(_) => {
            CapmimoStatus::InvalidArgument
        }
        Error::TooFewPoints { .. } => CapmimoStatus::TooFewPoints,
        Error::NotHermitian { .. } => CapmimoStatus::NotHermitian,
        Error::NotPositiveSemidefinite { .. } => CapmimoStatus::NotPositiveSemidefinite,
        Error::EigenSolver => CapmimoStatus::NumericalFailure,
        Error::ZeroTrace => CapmimoStatus::ZeroTrace,
    }
}

fn guard(f: impl FnOnce() -> Result<(), CapmimoStatus>) -> CapmimoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CapmimoStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            CapmimoStatus::Panic
        }
    }
}

fn fail(err: Error) -> CapmimoStatus {
    set_error(&err.to_string());
    status_of(&err)
}

fn null(what: &str) -> CapmimoStatus {
    set_error(&format!("{what} is null"));
    CapmimoStatus::NullPointer
}

unsafe fn system_ref<'a>(system: *const CapmimoSystem) -> Result<&'a CapmimoSystem, CapmimoStatus> {
    system.as_ref().ok_or_else(|| null("system"))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), CapmimoStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

/// Creates a system. `inner_points = 0` selects the default source rule.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn capmimo_system_new(
    wavelength: f64,
    aperture: f64,
    distance: f64,
    power: f64,
    noise: f64,
    inner_points: usize,
    out: *mut *mut CapmimoSystem,
) -> CapmimoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let cfg = SystemConfig::new(wavelength, aperture, distance, power, noise).map_err(fail)?;
        let inner = if inner_points == 0 {
            default_inner_points(&cfg)
        } else {
            inner_points
        };
        let channel = Channel::new(cfg, inner).map_err(fail)?;
        out.write(Box::into_raw(Box::new(CapmimoSystem { channel })));
        Ok(())
    })
}

/// # Safety
/// `system` must be null or a handle from [`capmimo_system_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn capmimo_system_free(system: *mut CapmimoSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Source-side quadrature size in use.
///
/// # Safety
/// `system` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn capmimo_system_inner_points(system: *const CapmimoSystem, out: *mut usize) -> CapmimoStatus {
    guard(|| write_out(out, system_ref(system)?.channel.inner_points()))
}

/// `G(r, s)` split into real and imaginary parts.
///
/// # Safety
/// `system` must be a live handle; `out_re` and `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn capmimo_green_scalar(
    system: *const CapmimoSystem,
    r: f64,
    s: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> CapmimoStatus {
    guard(|| {
        let g = green_scalar(r, s, system_ref(system)?.channel.config());
        write_out(out_re, g.re)?;
        write_out(out_im, g.im)
    })
}

/// `∫ K_E(r, r) dr` on `outer_points` receiver samples.
///
/// # Safety
/// `system` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn capmimo_operator_trace(
    system: *const CapmimoSystem,
    outer_points: usize,
    out: *mut f64,
) -> CapmimoStatus {
    guard(|| {
        let ch = &system_ref(system)?.channel;
        let v = operator_trace(ch.config(), outer_points, ch.inner_points()).map_err(fail)?;
        write_out(out, v)
    })
}

/// Continuous-aperture mutual information in nats.
///
/// # Safety
/// `system` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn capmimo_mi_continuous(
    system: *const CapmimoSystem,
    ref_m: usize,
    out: *mut f64,
) -> CapmimoStatus {
    guard(|| {
        let r = mi_continuous(&system_ref(system)?.channel, ref_m).map_err(fail)?;
        write_out(out, r.result.value_nats)
    })
}

/// Discrete-receiver mutual information in nats; `out_noise` may be null.
///
/// # Safety
/// `system` must be a live handle; `out` writable; `out_noise` null or writable.
#[no_mangle]
pub unsafe extern "C" fn capmimo_mi_discrete_rx(
    system: *const CapmimoSystem,
    m: usize,
    out: *mut f64,
    out_noise: *mut f64,
) -> CapmimoStatus {
    guard(|| {
        let r = mi_discrete_rx(m, &system_ref(system)?.channel).map_err(fail)?;
        if !out_noise.is_null() {
            out_noise.write(r.noise_used);
        }
        write_out(out, r.value_nats)
    })
}

/// Discrete-transceiver mutual information in nats; `out_noise` may be null.
///
/// # Safety
/// `system` must be a live handle; `out` writable; `out_noise` null or writable.
#[no_mangle]
pub unsafe extern "C" fn capmimo_mi_discrete_trx(
    system: *const CapmimoSystem,
    m1: usize,
    m2: usize,
    out: *mut f64,
    out_noise: *mut f64,
) -> CapmimoStatus {
    guard(|| {
        let r = mi_discrete_trx(m1, m2, &system_ref(system)?.channel).map_err(fail)?;
        if !out_noise.is_null() {
            out_noise.write(r.noise_used);
        }
        write_out(out, r.value_nats)
    })
}

/// Eigenvalue count above `threshold_rel · λ_max` (`threshold_rel ≤ 0`
/// selects the default) and the analytic estimate.
///
/// # Safety
/// `system` must be a live handle; `out_count` and `out_analytic` writable.
#[no_mangle]
pub unsafe extern "C" fn capmimo_dof_estimate(
    system: *const CapmimoSystem,
    ref_m: usize,
    threshold_rel: f64,
    out_count: *mut usize,
    out_analytic: *mut f64,
) -> CapmimoStatus {
    guard(|| {
        let thr = if threshold_rel <= 0.0 {
            DEFAULT_DOF_THRESHOLD
        } else {
            threshold_rel
        };
        let est = dof_estimate(&system_ref(system)?.channel, ref_m, thr).map_err(fail)?;
        write_out(out_count, est.count)?;
        write_out(out_analytic, est.analytic)
    })
}

/// Computes the reference spectrum on `ref_m` points.
///
/// # Safety
/// `system` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn capmimo_spectrum_new(
    system: *const CapmimoSystem,
    ref_m: usize,
    out: *mut *mut CapmimoSpectrum,
) -> CapmimoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let r = mi_continuous(&system_ref(system)?.channel, ref_m).map_err(fail)?;
        let spec = CapmimoSpectrum {
            spectrum: r.spectrum,
            weight: r.weight,
        };
        out.write(Box::into_raw(Box::new(spec)));
        Ok(())
    })
}

/// # Safety
/// `spectrum` must be null or a handle from [`capmimo_spectrum_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn capmimo_spectrum_free(spectrum: *mut CapmimoSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Number of eigenvalues; 0 for a null handle.
///
/// # Safety
/// `spectrum` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn capmimo_spectrum_len(spectrum: *const CapmimoSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.spectrum.eigenvalues.len())
}

/// Number of eigenvalues raised to zero; 0 for a null handle.
///
/// # Safety
/// `spectrum` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn capmimo_spectrum_clamped_count(spectrum: *const CapmimoSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.spectrum.clamped_count)
}

/// Copies operator eigenvalues (matrix eigenvalues times the grid weight)
/// into `buf`, which must hold at least [`capmimo_spectrum_len`] values.
///
/// # Safety
/// `spectrum` must be a live handle; `buf` must be valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn capmimo_spectrum_copy(
    spectrum: *const CapmimoSpectrum,
    buf: *mut f64,
    capacity: usize,
) -> CapmimoStatus {
    guard(|| {
        let s = spectrum.as_ref().ok_or_else(|| null("spectrum"))?;
        let n = s.spectrum.eigenvalues.len();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if capacity < n {
            set_error(&format!("buffer holds {capacity} values, need {n}"));
            return Err(CapmimoStatus::BufferTooSmall);
        }
        let dst = std::slice::from_raw_parts_mut(buf, n);
        for (d, &v) in dst.iter_mut().zip(&s.spectrum.eigenvalues) {
            *d = v * s.weight;
        }
        Ok(())
    })
}

/// Message of the last failure on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn capmimo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn capmimo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
