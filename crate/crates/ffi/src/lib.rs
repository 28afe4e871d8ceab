//! C ABI over `idemsym`.
//!
//! Matrices cross the boundary as opaque [`IdsMatrix`] handles created by
//! `ids_matrix_new` or returned through out-pointers, and released with
//! `ids_matrix_free`. Entry data is row-major with real and imaginary parts
//! interleaved (`2 * rows * cols` doubles).
//!
//! Every fallible function returns an [`IdsStatus`]. On failure a description
//! is available from `ids_last_error_message` until the next call on the same
//! thread. Tolerance pointers may be null to select the defaults.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use idemsym::decompose::delta_decompose;
use idemsym::families::{canonical_delta, canonical_gamma};
use idemsym::halmos::{halmos_symmetry, min_positive_symmetry, HalmosRoute};
use idemsym::idempotent::{kernel_dims, random_idempotent, Idempotent};
use idemsym::linalg::{c64, ComplexMatrix, ToleranceConfig};
use idemsym::symmetry::membership;
use idemsym::Error;

/// Opaque dense complex matrix.
pub struct IdsMatrix {
    inner: ComplexMatrix,
}

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotSquare = 3,
    NonFinite = 4,
    NotIdempotent = 5,
    NotSymmetry = 6,
    NotUnitary = 7,
    ShapeMismatch = 8,
    NotExists = 9,
    NotMember = 10,
    Numerical = 11,
    Panic = 12,
}

/// Thresholds for approximate checks; see `ids_tolerance_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IdsTolerance {
    pub rank_rtol: f64,
    pub residual_atol: f64,
    pub psd_tol: f64,
}

/// Relations of a symmetry `J` against an idempotent `P`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct IdsMembership {
    pub is_symmetry: bool,
    pub in_gamma: bool,
    pub in_delta: bool,
    pub positive: bool,
    pub symmetry_residual: f64,
    pub gamma_residual: f64,
    pub delta_residual: f64,
    pub min_eigenvalue: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> IdsStatus {
    match e {
        Error::NotSquare { .. } => IdsStatus::NotSquare,
        Error::NonFinite { .. } => IdsStatus::NonFinite,
        Error::NotIdempotent { .. } => IdsStatus::NotIdempotent,
        Error::NotSymmetry { .. } => IdsStatus::NotSymmetry,
        Error::NotUnitary { .. } => IdsStatus::NotUnitary,
        Error::ShapeMismatch(_) => IdsStatus::ShapeMismatch,
        Error::NotExists { .. } => IdsStatus::NotExists,
        Error::NotMember(_) => IdsStatus::NotMember,
        Error::BadParam(_) | Error::NotApplicable(_) | Error::Schema { .. } | Error::Io { .. } => {
            IdsStatus::InvalidArgument
        }
        _ => IdsStatus::Numerical,
    }
}

struct Fail(IdsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(IdsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording its error message and converting panics.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> IdsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IdsStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".to_owned());
            IdsStatus::Panic
        }
    }
}

unsafe fn matrix_ref<'a>(m: *const IdsMatrix, what: &str) -> Result<&'a ComplexMatrix, Fail> {
    m.as_ref().map(|m| &m.inner).ok_or_else(|| null(what))
}

unsafe fn tolerance(tol: *const IdsTolerance) -> Result<ToleranceConfig, Fail> {
    match tol.as_ref() {
        None => Ok(ToleranceConfig::default()),
        Some(t) => Ok(ToleranceConfig::new(t.rank_rtol, t.residual_atol, t.psd_tol)?),
    }
}

unsafe fn idempotent(p: *const IdsMatrix, tol: *const IdsTolerance) -> Result<Idempotent, Fail> {
    let m = matrix_ref(p, "p")?;
    Ok(Idempotent::new(m.clone(), &tolerance(tol)?)?)
}

unsafe fn store(out: *mut *mut IdsMatrix, m: ComplexMatrix) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(IdsMatrix { inner: m }));
    Ok(())
}

/// Default thresholds.
#[no_mangle]
pub extern "C" fn ids_tolerance_default() -> IdsTolerance {
    let t = ToleranceConfig::default();
    IdsTolerance {
        rank_rtol: t.rank_rtol,
        residual_atol: t.residual_atol,
        psd_tol: t.psd_tol,
    }
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ids_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a `rows x cols` matrix from interleaved row-major data, or zeros
/// when `data` is null. Returns null on non-finite data.
///
/// # Safety
/// `data` must be null or point to `2 * rows * cols` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn ids_matrix_new(rows: usize, cols: usize, data: *const f64) -> *mut IdsMatrix {
    clear_error();
    let Some(len) = rows.checked_mul(cols).and_then(|n| n.checked_mul(2)) else {
        set_error("matrix size overflows".to_owned());
        return ptr::null_mut();
    };
    let mut m = ComplexMatrix::zeros(rows, cols);
    if !data.is_null() {
        let values = std::slice::from_raw_parts(data, len);
        for i in 0..rows {
            for j in 0..cols {
                let k = 2 * (i * cols + j);
                m[(i, j)] = c64::new(values[k], values[k + 1]);
            }
        }
        if let Err(e) = idemsym::linalg::ensure_finite(&m) {
            set_error(e.to_string());
            return ptr::null_mut();
        }
    }
    Box::into_raw(Box::new(IdsMatrix { inner: m }))
}

/// Releases a matrix. Null is ignored.
///
/// # Safety
/// `m` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ids_matrix_free(m: *mut IdsMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Row count, or 0 for null.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ids_matrix_rows(m: *const IdsMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.nrows())
}

/// Column count, or 0 for null.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ids_matrix_cols(m: *const IdsMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.ncols())
}

/// Copies the entries into `out` (interleaved, row-major). `len` is the
/// capacity of `out` in doubles and must be at least `2 * rows * cols`.
///
/// # Safety
/// `m` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ids_matrix_copy_data(m: *const IdsMatrix, out: *mut f64, len: usize) -> IdsStatus {
    guard(|| {
        let m = matrix_ref(m, "m")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let need = 2 * m.nrows() * m.ncols();
        if len < need {
            return Err(Fail(
                IdsStatus::InvalidArgument,
                format!("buffer holds {len} doubles, {need} needed"),
            ));
        }
        let buf = std::slice::from_raw_parts_mut(out, need);
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let k = 2 * (i * m.ncols() + j);
                buf[k] = m[(i, j)].re;
                buf[k + 1] = m[(i, j)].im;
            }
        }
        Ok(())
    })
}

/// Random idempotent of rank `r` on `C^n` with corner norm at most `norm_cap`.
///
/// # Safety
/// `out` must point to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ids_random_idempotent(
    n: usize,
    r: usize,
    norm_cap: f64,
    seed: u64,
    out: *mut *mut IdsMatrix,
) -> IdsStatus {
    guard(|| store(out, random_idempotent(n, r, norm_cap, seed)?.into_matrix()))
}

/// `IDS_STATUS_OK` when `p` is idempotent under `tol`.
///
/// # Safety
/// `p` must be a live handle; `tol` null or valid.
#[no_mangle]
pub unsafe extern "C" fn ids_validate_idempotent(p: *const IdsMatrix, tol: *const IdsTolerance) -> IdsStatus {
    guard(|| idempotent(p, tol).map(drop))
}

/// `dim N(P+P*)` and `dim N(2I-P-P*)`.
///
/// # Safety
/// `p` must be a live handle; `tol` null or valid; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn ids_kernel_dims(
    p: *const IdsMatrix,
    tol: *const IdsTolerance,
    d_plus: *mut usize,
    d_minus: *mut usize,
) -> IdsStatus {
    guard(|| {
        if d_plus.is_null() || d_minus.is_null() {
            return Err(null("output"));
        }
        let d = kernel_dims(&idempotent(p, tol)?)?;
        *d_plus = d.d_plus;
        *d_minus = d.d_minus;
        Ok(())
    })
}

/// Whether symmetries with `JPJ = I - P` exist.
///
/// # Safety
/// `p` must be a live handle; `tol` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ids_gamma_exists(p: *const IdsMatrix, tol: *const IdsTolerance, out: *mut bool) -> IdsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = idemsym::idempotent::gamma_exists(&idempotent(p, tol)?);
        Ok(())
    })
}

/// Canonical `J` with `JPJ = I - P`; `IDS_STATUS_NOT_EXISTS` when none exists.
///
/// # Safety
/// `p` must be a live handle; `tol` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ids_canonical_gamma(
    p: *const IdsMatrix,
    tol: *const IdsTolerance,
    out: *mut *mut IdsMatrix,
) -> IdsStatus {
    guard(|| store(out, canonical_gamma(&idempotent(p, tol)?)?.into_matrix()))
}

/// Canonical `J` with `JPJ = I - P*`.
///
/// # Safety
/// `p` must be a live handle; `tol` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ids_canonical_delta(
    p: *const IdsMatrix,
    tol: *const IdsTolerance,
    out: *mut *mut IdsMatrix,
) -> IdsStatus {
    guard(|| store(out, canonical_delta(&idempotent(p, tol)?)?.into_matrix()))
}

/// `(2P - I)|2P - I|^-1`.
///
/// # Safety
/// `p` must be a live handle; `tol` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ids_halmos_symmetry(
    p: *const IdsMatrix,
    tol: *const IdsTolerance,
    out: *mut *mut IdsMatrix,
) -> IdsStatus {
    guard(|| store(out, halmos_symmetry(&idempotent(p, tol)?, HalmosRoute::Block)?.into_matrix()))
}

/// Smallest symmetry `J` with `JP >= 0`.
///
/// # Safety
/// `p` must be a live handle; `tol` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ids_min_positive_symmetry(
    p: *const IdsMatrix,
    tol: *const IdsTolerance,
    out: *mut *mut IdsMatrix,
) -> IdsStatus {
    guard(|| store(out, min_positive_symmetry(&idempotent(p, tol)?)?.into_matrix()))
}

/// Relations of `j` against `p`.
///
/// # Safety
/// `p` and `j` must be live handles; `tol` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ids_membership(
    p: *const IdsMatrix,
    j: *const IdsMatrix,
    tol: *const IdsTolerance,
    out: *mut IdsMembership,
) -> IdsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = idempotent(p, tol)?;
        let m = membership(&p, matrix_ref(j, "j")?);
        *out = IdsMembership {
            is_symmetry: m.is_symmetry,
            in_gamma: m.in_gamma,
            in_delta: m.in_delta,
            positive: m.positive,
            symmetry_residual: m.symmetry_residual,
            gamma_residual: m.gamma_residual,
            delta_residual: m.delta_residual,
            min_eigenvalue: m.positivity.min_eigenvalue,
        };
        Ok(())
    })
}

/// Factors `J` with `JPJ = I - P*` as `J = -i J1 J2`. `residual` may be null.
///
/// # Safety
/// `p` and `j` must be live handles; `tol` null or valid; `j1`, `j2` writable.
#[no_mangle]
pub unsafe extern "C" fn ids_delta_decompose(
    p: *const IdsMatrix,
    j: *const IdsMatrix,
    tol: *const IdsTolerance,
    j1: *mut *mut IdsMatrix,
    j2: *mut *mut IdsMatrix,
    residual: *mut f64,
) -> IdsStatus {
    guard(|| {
        if j1.is_null() || j2.is_null() {
            return Err(null("output"));
        }
        let p = idempotent(p, tol)?;
        let d = delta_decompose(&p, matrix_ref(j, "j")?)?;
        if !residual.is_null() {
            *residual = d.residual;
        }
        store(j1, d.j1.into_matrix())?;
        store(j2, d.j2.into_matrix())
    })
}
