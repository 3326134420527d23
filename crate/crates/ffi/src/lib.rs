//! C ABI over the `hslab` library.
//!
//! Parameter sets live behind an opaque handle. Every fallible call returns
//! an `HslabStatus`; on failure a message is available from
//! `hslab_last_error_message` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hslab::funcspace::{boundary_bump, BumpProfile, ExplicitRadial, IokuExtremal, RadialProfile};
use hslab::functionals::{bump_quotient, rayleigh_quotient, QuotientReport};
use hslab::limits::c_of_m;
use hslab::params::{derived_constants, validate, OuterRadius, ProblemParams, RawParams};
use hslab::quadrature::QuadratureSpec;
use hslab::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HslabStatus {
    Ok = 0,
    InvalidParams = 1,
    Domain = 2,
    NonConvergence = 3,
    NonFinite = 4,
    Divergent = 5,
    ZeroDenominator = 6,
    NullPointer = 7,
    Panic = 8,
    Other = 9,
}

impl From<&Error> for HslabStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParams(_) => HslabStatus::InvalidParams,
            Error::Domain(_) => HslabStatus::Domain,
            Error::NonConvergence { .. } => HslabStatus::NonConvergence,
            Error::NonFinite(_) | Error::NonDecay => HslabStatus::NonFinite,
            Error::Divergent(_) => HslabStatus::Divergent,
            Error::ZeroDenominator => HslabStatus::ZeroDenominator,
            _ => HslabStatus::Other,
        }
    }
}

/// Radial test functions accepted by `hslab_quotient`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HslabTestFunction {
    /// `1 - r/R`.
    Cone = 0,
    /// `(1 - (r/R)^2)^2`.
    Quartic = 1,
    /// The `a = 1` minimizer at scale `arg`.
    Extremal = 2,
    /// Cone bump of width `arg` touching the boundary region.
    BoundaryBump = 3,
}

/// Opaque validated parameter set.
pub struct HslabParams {
    inner: ProblemParams,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HslabConstants {
    pub beta: f64,
    pub p_star: f64,
    pub hardy_const: f64,
    pub rearrange_threshold: f64,
    pub best_constant: f64,
    pub best_constant_err: f64,
    /// NaN unless `0 < s < p`.
    pub a_threshold: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HslabQuotient {
    pub quotient: f64,
    pub quotient_err: f64,
    pub numerator: f64,
    pub denominator: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard<F: FnOnce() -> Result<(), HslabStatus>>(f: F) -> HslabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HslabStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside hslab");
            HslabStatus::Panic
        }
    }
}

fn fail(e: Error) -> HslabStatus {
    set_error(&e.to_string());
    HslabStatus::from(&e)
}

fn null() -> HslabStatus {
    set_error("null pointer argument");
    HslabStatus::NullPointer
}

/// Message of the last failure on this thread; valid until the next call.
#[no_mangle]
pub extern "C" fn hslab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Validates `(N, p, s, R, a, T)` and returns a new handle in `out`.
/// `outer <= 0` selects `T = R`; an infinite `outer` selects the whole space.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn hslab_params_new(
    n: u32,
    p: f64,
    s: f64,
    radius: f64,
    a: f64,
    outer: f64,
    out: *mut *mut HslabParams,
) -> HslabStatus {
    if out.is_null() {
        return null();
    }
    guard(|| {
        let outer = if outer.is_infinite() && outer > 0.0 {
            Some(OuterRadius::Infinite)
        } else if outer > 0.0 {
            Some(OuterRadius::Finite(outer))
        } else {
            None
        };
        let inner = validate(RawParams {
            n,
            p,
            s,
            radius,
            a,
            outer,
        })
        .map_err(fail)?;
        // SAFETY: checked non-null above; caller guarantees it is writable.
        unsafe { *out = Box::into_raw(Box::new(HslabParams { inner })) };
        Ok(())
    })
}

/// Frees a handle from `hslab_params_new`; null is ignored.
///
/// # Safety
/// `params` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hslab_params_free(params: *mut HslabParams) {
    if !params.is_null() {
        // SAFETY: the handle came from Box::into_raw in hslab_params_new.
        drop(unsafe { Box::from_raw(params) });
    }
}

/// Exponents, thresholds and the best constant.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hslab_constants(
    params: *const HslabParams,
    out: *mut HslabConstants,
) -> HslabStatus {
    if params.is_null() || out.is_null() {
        return null();
    }
    // SAFETY: non-null, and the caller guarantees a live handle.
    let p = unsafe { &(*params).inner };
    guard(|| {
        let c = derived_constants(p, &QuadratureSpec::default()).map_err(fail)?;
        let v = HslabConstants {
            beta: c.beta,
            p_star: c.p_star,
            hardy_const: c.hardy_const,
            rearrange_threshold: c.rearrange_threshold,
            best_constant: c.best_constant,
            best_constant_err: c.best_constant_err,
            a_threshold: c.a_threshold.unwrap_or(f64::NAN),
        };
        // SAFETY: checked non-null above.
        unsafe { *out = v };
        Ok(())
    })
}

/// Rayleigh quotient `Q_a` of a test function; `arg` is the scale for
/// `Extremal` and the width for `BoundaryBump`, and is ignored otherwise.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hslab_quotient(
    params: *const HslabParams,
    function: HslabTestFunction,
    arg: f64,
    out: *mut HslabQuotient,
) -> HslabStatus {
    if params.is_null() || out.is_null() {
        return null();
    }
    // SAFETY: non-null, and the caller guarantees a live handle.
    let p = unsafe { &(*params).inner };
    guard(|| {
        let spec = QuadratureSpec::default();
        let rep: QuotientReport = match function {
            HslabTestFunction::BoundaryBump => {
                let b = boundary_bump(arg, BumpProfile::Cone, p).map_err(fail)?;
                bump_quotient(&b, p, &spec).map_err(fail)?
            }
            _ => {
                let u: Box<dyn RadialProfile> = match function {
                    HslabTestFunction::Cone => Box::new(ExplicitRadial::linear_cone(p.radius)),
                    HslabTestFunction::Quartic => Box::new(ExplicitRadial::quartic(p.radius)),
                    _ => Box::new(IokuExtremal::new(p, arg).map_err(fail)?),
                };
                rayleigh_quotient(u.as_ref(), p, &spec).map_err(fail)?
            }
        };
        let v = HslabQuotient {
            quotient: rep.quotient,
            quotient_err: rep.quotient_err,
            numerator: rep.numerator,
            denominator: rep.denominator,
        };
        // SAFETY: checked non-null above.
        unsafe { *out = v };
        Ok(())
    })
}

/// The transported Sobolev constant `c(m)` for `m > N > p`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hslab_c_of_m(m: f64, n: u32, p: f64, out: *mut f64) -> HslabStatus {
    if out.is_null() {
        return null();
    }
    guard(|| {
        let v = c_of_m(m, n, p).map_err(fail)?;
        // SAFETY: checked non-null above.
        unsafe { *out = v };
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn hslab_status_name(status: HslabStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        HslabStatus::Ok => b"ok\0",
        HslabStatus::InvalidParams => b"invalid parameters\0",
        HslabStatus::Domain => b"argument out of domain\0",
        HslabStatus::NonConvergence => b"quadrature did not converge\0",
        HslabStatus::NonFinite => b"non-finite integrand\0",
        HslabStatus::Divergent => b"divergent integral\0",
        HslabStatus::ZeroDenominator => b"zero denominator\0",
        HslabStatus::NullPointer => b"null pointer\0",
        HslabStatus::Panic => b"internal panic\0",
        HslabStatus::Other => b"other error\0",
    };
    s.as_ptr().cast()
}
