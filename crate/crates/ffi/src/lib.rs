//! C interface to `lossprobe`.
//!
//! Every fallible function returns an [`LpStatus`]; on failure the message is
//! available from [`lp_last_error`] on the same thread. Covariance matrices are
//! opaque handles released with [`lp_covariance_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::DMatrix;

use lossprobe::channel::{evolve, LossChannel};
use lossprobe::chernoff::{qcb, SqueezedThermal};
use lossprobe::correlations::{correlation_report_with, MutualInfoConvention};
use lossprobe::error::Error;
use lossprobe::gaussian::{symplectic_eigenvalues, CovarianceMatrix, SqueezedThermalSingle, SqueezedThermalTwo};
use lossprobe::probe;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Dimension = 3,
    Unphysical = 4,
    Numerical = 5,
    Truncation = 6,
    NoThreshold = 7,
    BufferTooSmall = 8,
    Panic = 99,
}

/// Covariance matrix of a one- or two-mode Gaussian state.
pub struct LpCovariance(CovarianceMatrix);

/// A squeezed thermal state. `modes` is 1 or 2; `n_t2` is ignored for one mode.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LpSqueezedThermal {
    pub modes: u32,
    pub r: f64,
    pub n_t1: f64,
    pub n_t2: f64,
}

/// Chernoff bound and error-probability bounds. Unavailable bounds are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LpDiscrimination {
    pub q: f64,
    pub s_star: f64,
    pub fidelity: f64,
    pub copies: u32,
    pub pe_upper: f64,
    pub pe_lower: f64,
    pub pe_fidelity_upper: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LpCorrelations {
    pub negativity: f64,
    pub discord: f64,
    pub mutual_information: f64,
    pub d_tilde_minus: f64,
}

/// Convention for the mutual information prefactor.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpMutualInfo {
    Printed = 0,
    Standard = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LpStatus {
    match e {
        Error::Domain(_) => LpStatus::Domain,
        Error::Dimension(_) => LpStatus::Dimension,
        Error::Unphysical(_) | Error::Form(_) => LpStatus::Unphysical,
        Error::Truncation { .. } | Error::CapExceeded { .. } => LpStatus::Truncation,
        Error::NoThreshold(_) => LpStatus::NoThreshold,
        Error::Numerical(_) | Error::SingularSigma(_) | Error::Solver { .. } => LpStatus::Numerical,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
    Small(usize),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LpStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("null pointer passed as {name}"));
            LpStatus::NullPointer
        }
        Ok(Err(Fail::Small(need))) => {
            set_error(format!("output buffer needs {need} elements"));
            LpStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("internal panic".to_string());
            LpStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(name))
}

unsafe fn handle<'a>(p: *const LpCovariance) -> Result<&'a CovarianceMatrix, Fail> {
    p.as_ref().map(|h| &h.0).ok_or(Fail::Null("covariance"))
}

fn state(s: LpSqueezedThermal) -> Result<SqueezedThermal, Fail> {
    Ok(match s.modes {
        1 => SqueezedThermalSingle::new(s.r, s.n_t1)?.into(),
        2 => SqueezedThermalTwo::new(s.r, s.n_t1, s.n_t2)?.into(),
        m => return Err(Error::Dimension(format!("modes must be 1 or 2, got {m}")).into()),
    })
}

fn boxed(cm: CovarianceMatrix) -> *mut LpCovariance {
    Box::into_raw(Box::new(LpCovariance(cm)))
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn lp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a covariance matrix from `4 * modes^2` row-major entries.
///
/// # Safety
/// `entries` must point to that many doubles and `out_cm` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lp_covariance_new(modes: u32, entries: *const f64, out_cm: *mut *mut LpCovariance) -> LpStatus {
    guard(|| {
        let slot = out(out_cm, "out")?;
        if entries.is_null() {
            return Err(Fail::Null("entries"));
        }
        if !(1..=2).contains(&modes) {
            return Err(Error::Dimension(format!("modes must be 1 or 2, got {modes}")).into());
        }
        let d = 2 * modes as usize;
        let data = std::slice::from_raw_parts(entries, d * d);
        let m = DMatrix::from_row_slice(d, d, data);
        *slot = boxed(CovarianceMatrix::new(m)?);
        Ok(())
    })
}

/// Covariance matrix of a squeezed thermal state.
///
/// # Safety
/// `out_cm` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lp_covariance_squeezed_thermal(
    s: LpSqueezedThermal,
    out_cm: *mut *mut LpCovariance,
) -> LpStatus {
    guard(|| {
        let slot = out(out_cm, "out")?;
        *slot = boxed(state(s)?.covariance()?);
        Ok(())
    })
}

/// # Safety
/// `cm` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lp_covariance_free(cm: *mut LpCovariance) {
    if !cm.is_null() {
        drop(Box::from_raw(cm));
    }
}

/// Number of modes, or 0 for a null handle.
///
/// # Safety
/// `cm` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lp_covariance_modes(cm: *const LpCovariance) -> u32 {
    cm.as_ref().map_or(0, |h| h.0.modes() as u32)
}

/// Copies the row-major entries into `buf` of length `len`.
///
/// # Safety
/// `cm` must be a live handle and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lp_covariance_entries(cm: *const LpCovariance, buf: *mut f64, len: usize) -> LpStatus {
    guard(|| {
        let values = handle(cm)?.row_major();
        copy_out(&values, buf, len)
    })
}

unsafe fn copy_out(values: &[f64], buf: *mut f64, len: usize) -> Result<(), Fail> {
    if buf.is_null() {
        return Err(Fail::Null("buf"));
    }
    if len < values.len() {
        return Err(Fail::Small(values.len()));
    }
    std::slice::from_raw_parts_mut(buf, values.len()).copy_from_slice(values);
    Ok(())
}

/// Symplectic eigenvalues in descending order; `len` must be at least the mode count.
///
/// # Safety
/// `cm` must be a live handle and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lp_symplectic_eigenvalues(cm: *const LpCovariance, buf: *mut f64, len: usize) -> LpStatus {
    guard(|| {
        let nu = symplectic_eigenvalues(handle(cm)?)?;
        copy_out(&nu, buf, len)
    })
}

/// Sends the first mode through a loss channel of transmissivity `eta`.
///
/// # Safety
/// `cm` must be a live handle and `out_cm` writable.
#[no_mangle]
pub unsafe extern "C" fn lp_evolve(cm: *const LpCovariance, eta: f64, out_cm: *mut *mut LpCovariance) -> LpStatus {
    guard(|| {
        let slot = out(out_cm, "out")?;
        let ch = LossChannel::from_eta(eta)?;
        *slot = boxed(evolve(handle(cm)?, &ch)?);
        Ok(())
    })
}

/// Chernoff bound between two squeezed thermal states with the same mode count.
///
/// # Safety
/// `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lp_qcb(
    a: LpSqueezedThermal,
    b: LpSqueezedThermal,
    copies: u32,
    report: *mut LpDiscrimination,
) -> LpStatus {
    guard(|| {
        let slot = out(report, "report")?;
        let r = qcb(state(a)?, state(b)?, copies)?;
        *slot = LpDiscrimination {
            q: r.q,
            s_star: r.s_star,
            fidelity: r.fidelity.unwrap_or(f64::NAN),
            copies: r.copies,
            pe_upper: r.pe_upper,
            pe_lower: r.pe_lower.unwrap_or(f64::NAN),
            pe_fidelity_upper: r.pe_fidelity_upper.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Chernoff bound for loss detection with a single-mode probe of energy `n`.
///
/// # Safety
/// `q` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lp_q1(n: f64, beta: f64, eta: f64, q: *mut f64) -> LpStatus {
    guard(|| {
        let slot = out(q, "q")?;
        *slot = probe::q1(n, beta, &LossChannel::from_eta(eta)?)?;
        Ok(())
    })
}

/// Same for the two-mode probe with thermal split `gamma`.
///
/// # Safety
/// `q` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lp_q2(n: f64, beta: f64, gamma: f64, eta: f64, q: *mut f64) -> LpStatus {
    guard(|| {
        let slot = out(q, "q")?;
        *slot = probe::q2(n, beta, gamma, &LossChannel::from_eta(eta)?)?;
        Ok(())
    })
}

/// Closed form for the squeezed vacuum probe.
///
/// # Safety
/// `q` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lp_q1_analytic(n: f64, eta: f64, q: *mut f64) -> LpStatus {
    guard(|| {
        *out(q, "q")? = probe::q1_analytic(n, eta)?;
        Ok(())
    })
}

/// Closed form for the two-mode squeezed vacuum probe.
///
/// # Safety
/// `q` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lp_q2_analytic(n: f64, eta: f64, q: *mut f64) -> LpStatus {
    guard(|| {
        *out(q, "q")? = probe::q2_analytic(n, eta)?;
        Ok(())
    })
}

/// Energy above which the two-mode squeezed vacuum beats the single-mode one.
///
/// # Safety
/// `n_th` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lp_threshold_energy(eta: f64, n_th: *mut f64) -> LpStatus {
    guard(|| {
        *out(n_th, "n_th")? = probe::threshold_energy(eta)?;
        Ok(())
    })
}

/// Transmissivity below which the two-mode probe wins at every energy.
#[no_mangle]
pub extern "C" fn lp_critical_transmissivity() -> f64 {
    probe::critical_transmissivity()
}

/// Negativity, discord and mutual information of a two-mode state.
///
/// # Safety
/// `cm` must be a live handle and `report` writable.
#[no_mangle]
pub unsafe extern "C" fn lp_correlations(
    cm: *const LpCovariance,
    convention: LpMutualInfo,
    report: *mut LpCorrelations,
) -> LpStatus {
    guard(|| {
        let slot = out(report, "report")?;
        let convention = match convention {
            LpMutualInfo::Printed => MutualInfoConvention::AsPrinted,
            LpMutualInfo::Standard => MutualInfoConvention::Standard,
        };
        let r = correlation_report_with(handle(cm)?, convention)?;
        *slot = LpCorrelations { negativity: r.e, discord: r.d, mutual_information: r.i, d_tilde_minus: r.d_tilde_minus };
        Ok(())
    })
}
