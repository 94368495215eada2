//! C ABI over the `xjacobi` library.
//!
//! Every fallible call returns an [`XjStatus`]; on failure a message is kept
//! per thread and can be copied out with [`xj_last_error_message`]. Families
//! are opaque handles created by `xj_family_new*` and released with
//! [`xj_family_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use xjacobi::jacobi::gauss_jacobi_rule;
use xjacobi::polyalg::{format_rational, parse_rational, Rational, Scalar};
use xjacobi::spectral::{classify_endpoint, deficiency_index, Endpoint, EndpointClass};
use xjacobi::xjacobi::ExceptionalFamily;
use xjacobi::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XjStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidParams = 3,
    DegenerateFamily = 4,
    BelowGap = 5,
    DomainViolation = 6,
    NotInvariant = 7,
    NonConvergent = 8,
    Quadrature = 9,
    BufferTooSmall = 10,
    Internal = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XjEndpoint {
    Minus = 0,
    Plus = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XjEndpointClass {
    LimitPoint = 0,
    LimitCircle = 1,
}

/// Opaque family handle.
pub struct XjFamily {
    inner: ExceptionalFamily,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> XjStatus {
    match err {
        Error::Param(_) => XjStatus::InvalidParams,
        Error::DegenerateDenominator { .. } | Error::RootInInterval { .. } | Error::RepeatedRoot { .. } => {
            XjStatus::DegenerateFamily
        }
        Error::BelowGap { .. } => XjStatus::BelowGap,
        Error::DomainViolation { .. } | Error::SingularPoint { .. } | Error::DivisionByZero => {
            XjStatus::DomainViolation
        }
        Error::NotInvariant { .. } => XjStatus::NotInvariant,
        Error::NonConvergent { .. } => XjStatus::NonConvergent,
        Error::QuadratureParams { .. } | Error::QuadratureOrder => XjStatus::Quadrature,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), XjStatus>) -> XjStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => XjStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            XjStatus::Internal
        }
    }
}

fn lib<T>(r: Result<T, Error>) -> Result<T, XjStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn fail<T>(status: XjStatus, msg: &str) -> Result<T, XjStatus> {
    set_error(msg);
    Err(status)
}

unsafe fn handle<'a>(f: *const XjFamily) -> Result<&'a ExceptionalFamily, XjStatus> {
    match f.as_ref() {
        Some(f) => Ok(&f.inner),
        None => fail(XjStatus::NullPointer, "null family handle"),
    }
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, XjStatus> {
    match p.as_mut() {
        Some(p) => Ok(p),
        None => fail(XjStatus::NullPointer, "null output pointer"),
    }
}

fn make_family(alpha: Rational, beta: Rational, m: u32, out: &mut *mut XjFamily) -> Result<(), XjStatus> {
    let inner = lib(ExceptionalFamily::from_params(alpha, beta, m))?;
    *out = Box::into_raw(Box::new(XjFamily { inner }));
    Ok(())
}

/// Copies `s` plus a terminating NUL into `buf`. `needed` receives the full
/// length including the NUL.
unsafe fn write_str(s: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> Result<(), XjStatus> {
    let len = s.len() + 1;
    if let Some(n) = needed.as_mut() {
        *n = len;
    }
    if buf.is_null() || cap < len {
        return fail(XjStatus::BufferTooSmall, "buffer too small");
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn xj_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates a family from `alpha = alpha_num/alpha_den`, `beta = beta_num/beta_den`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn xj_family_new(
    alpha_num: i64,
    alpha_den: i64,
    beta_num: i64,
    beta_den: i64,
    m: u32,
    out: *mut *mut XjFamily,
) -> XjStatus {
    guard(|| {
        let out = out_ref(out)?;
        if alpha_den == 0 || beta_den == 0 {
            return fail(XjStatus::InvalidArgument, "zero denominator");
        }
        let a = Rational::new(alpha_num.into(), alpha_den.into());
        let b = Rational::new(beta_num.into(), beta_den.into());
        make_family(a, b, m, out)
    })
}

/// Creates a family from textual parameters such as `"7/2"` or `"-0.25"`.
///
/// # Safety
/// `alpha` and `beta` must be NUL-terminated strings; `out` must be valid for
/// a pointer write.
#[no_mangle]
pub unsafe extern "C" fn xj_family_new_str(
    alpha: *const c_char,
    beta: *const c_char,
    m: u32,
    out: *mut *mut XjFamily,
) -> XjStatus {
    guard(|| {
        let out = out_ref(out)?;
        if alpha.is_null() || beta.is_null() {
            return fail(XjStatus::NullPointer, "null parameter string");
        }
        let parse = |p: *const c_char| {
            CStr::from_ptr(p)
                .to_str()
                .ok()
                .and_then(parse_rational)
                .ok_or(())
        };
        match (parse(alpha), parse(beta)) {
            (Ok(a), Ok(b)) => make_family(a, b, m, out),
            _ => fail(XjStatus::InvalidArgument, "unparsable parameter"),
        }
    })
}

/// Releases a family. Null is ignored.
///
/// # Safety
/// `family` must be null or come from `xj_family_new*` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn xj_family_free(family: *mut XjFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Codimension of the family, 0 for a null handle.
///
/// # Safety
/// `family` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xj_family_m(family: *const XjFamily) -> u32 {
    family.as_ref().map_or(0, |f| f.inner.m())
}

/// Evaluates the degree-`n` member at `x`.
///
/// # Safety
/// `family` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn xj_eval(family: *const XjFamily, n: u32, x: f64, out: *mut f64) -> XjStatus {
    guard(|| {
        let f = handle(family)?;
        let out = out_ref(out)?;
        *out = lib(f.eval_real::<f64>(n, x))?;
        Ok(())
    })
}

/// Monomial coefficients (ascending) of the degree-`n` member as doubles.
/// `len` receives the coefficient count; fails with `BUFFER_TOO_SMALL` when
/// `cap` is less than that.
///
/// # Safety
/// `family` must be a live handle; `coeffs` valid for `cap` doubles; `len`
/// valid for a write.
#[no_mangle]
pub unsafe extern "C" fn xj_coeffs(
    family: *const XjFamily,
    n: u32,
    coeffs: *mut f64,
    cap: usize,
    len: *mut usize,
) -> XjStatus {
    guard(|| {
        let f = handle(family)?;
        let len = out_ref(len)?;
        let p = lib(f.exceptional_poly(n))?;
        *len = p.coeffs().len();
        if coeffs.is_null() || cap < *len {
            return fail(XjStatus::BufferTooSmall, "coefficient buffer too small");
        }
        for (i, c) in p.coeffs().iter().enumerate() {
            *coeffs.add(i) = Scalar::to_f64(c);
        }
        Ok(())
    })
}

/// Exact coefficients as space-separated `p/q` text. `needed` receives the
/// buffer size required including the NUL.
///
/// # Safety
/// `family` must be a live handle; `buf` valid for `cap` bytes; `needed` null
/// or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn xj_coeffs_exact(
    family: *const XjFamily,
    n: u32,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> XjStatus {
    guard(|| {
        let f = handle(family)?;
        let p = lib(f.exceptional_poly(n))?;
        let text: Vec<String> = p.coeffs().iter().map(format_rational).collect();
        write_str(&text.join(" "), buf, cap, needed)
    })
}

/// Eigenvalue of the degree-`n` member.
///
/// # Safety
/// `family` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn xj_eigenvalue(family: *const XjFamily, n: u32, out: *mut f64) -> XjStatus {
    guard(|| {
        let f = handle(family)?;
        let out = out_ref(out)?;
        *out = Scalar::to_f64(&lib(f.eigenvalue(n))?);
        Ok(())
    })
}

/// Orthogonality weight at `x` in the open interval `(-1, 1)`.
///
/// # Safety
/// `family` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn xj_weight(family: *const XjFamily, x: f64, out: *mut f64) -> XjStatus {
    guard(|| {
        let f = handle(family)?;
        let out = out_ref(out)?;
        *out = lib(f.weight(x))?;
        Ok(())
    })
}

/// Limit-point / limit-circle classification at an endpoint.
///
/// # Safety
/// `family` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn xj_classify(
    family: *const XjFamily,
    endpoint: XjEndpoint,
    out: *mut XjEndpointClass,
) -> XjStatus {
    guard(|| {
        let f = handle(family)?;
        let out = out_ref(out)?;
        let e = match endpoint {
            XjEndpoint::Minus => Endpoint::Minus,
            XjEndpoint::Plus => Endpoint::Plus,
        };
        *out = match classify_endpoint(f.params(), e) {
            EndpointClass::LimitPoint => XjEndpointClass::LimitPoint,
            EndpointClass::LimitCircle => XjEndpointClass::LimitCircle,
        };
        Ok(())
    })
}

/// Deficiency index `k`, meaning the pair `(k, k)`.
///
/// # Safety
/// `family` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn xj_deficiency(family: *const XjFamily, out: *mut u32) -> XjStatus {
    guard(|| {
        let f = handle(family)?;
        let out = out_ref(out)?;
        *out = deficiency_index(f.params()).n_plus;
        Ok(())
    })
}

/// `n`-point Gauss-Jacobi rule for `(1-x)^a (1+x)^b` on `(-1, 1)`.
///
/// # Safety
/// `nodes` and `weights` must each be valid for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn xj_gauss_jacobi(a: f64, b: f64, n: usize, nodes: *mut f64, weights: *mut f64) -> XjStatus {
    guard(|| {
        if nodes.is_null() || weights.is_null() {
            return fail(XjStatus::NullPointer, "null output buffer");
        }
        let rule = lib(gauss_jacobi_rule(a, b, n))?;
        ptr::copy_nonoverlapping(rule.nodes().as_ptr(), nodes, n);
        ptr::copy_nonoverlapping(rule.weights().as_ptr(), weights, n);
        Ok(())
    })
}
