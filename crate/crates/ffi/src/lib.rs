//! C ABI over `ffrmf-core`.
//!
//! Every fallible function returns an [`FfrmfStatus`]; on failure a
//! message is available from [`ffrmf_last_error`] on the same thread.
//! Handles are opaque and must be released with their `_free` function.
//! Strings returned through out-parameters are owned by the caller and
//! released with [`ffrmf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ffrmf::asymptotics;
use ffrmf::counting::{self, CountTable};
use ffrmf::montecarlo::Support;
use ffrmf::numeric::ln_biguint;
use ffrmf::Error;
use num_bigint::BigUint;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfrmfStatus {
    Ok = 0,
    InvalidArgument = 1,
    UnsupportedField = 2,
    BudgetExceeded = 3,
    EmptySupport = 4,
    NullPointer = 5,
    Internal = 6,
}

/// Exact counts `|P_k(n)|` for one field order.
pub struct FfrmfCountTable {
    inner: CountTable,
}

/// `P_k(n)` enumerated once, ready for repeated sampling.
pub struct FfrmfSampler {
    inner: Support,
}

/// Moments and KS distance of one Monte Carlo run.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FfrmfSampleStats {
    pub trials: u64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// NaN when fewer than 100 trials were run.
    pub ks_distance: f64,
}

/// Exact count against the Sathe-Selberg main term.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FfrmfAsymptotic {
    pub exact_log: f64,
    pub predicted_log: f64,
    pub relative_deviation: f64,
    pub g_value: f64,
    pub g_tail_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FfrmfStatus {
    match e {
        Error::NotPrime(_) | Error::NotPrimePower(_) | Error::FieldUnsupported { .. } => FfrmfStatus::UnsupportedField,
        Error::Budget { .. } => FfrmfStatus::BudgetExceeded,
        Error::EmptySupport { .. } => FfrmfStatus::EmptySupport,
        Error::Io(_) | Error::CacheFormat(_) => FfrmfStatus::Internal,
        _ => FfrmfStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (FfrmfStatus, String)>) -> FfrmfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FfrmfStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FfrmfStatus::Internal
        }
    }
}

fn core<T>(r: ffrmf::Result<T>) -> Result<T, (FfrmfStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (FfrmfStatus, String) {
    (FfrmfStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (FfrmfStatus, String) {
    (FfrmfStatus::InvalidArgument, msg.into())
}

/// Message for the most recent failure on this thread; empty after a
/// success. Valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn ffrmf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ffrmf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ffrmf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds exact counts for `k <= k_max`, `n <= n_max` over `F_q`.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn ffrmf_count_table_new(
    q: u64,
    k_max: usize,
    n_max: usize,
    out: *mut *mut FfrmfCountTable,
) -> FfrmfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        core(ffrmf::polyfield::FieldSpec::with_order(q))?;
        let inner = CountTable::new(q, k_max, n_max);
        *out = Box::into_raw(Box::new(FfrmfCountTable { inner }));
        Ok(())
    })
}

/// # Safety
/// `table` must come from [`ffrmf_count_table_new`] and not have been
/// freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ffrmf_count_table_free(table: *mut FfrmfCountTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

unsafe fn lookup(table: *const FfrmfCountTable, k: usize, n: usize) -> Result<BigUint, (FfrmfStatus, String)> {
    let t = table.as_ref().ok_or_else(|| null("table"))?;
    t.inner
        .get(k, n)
        .cloned()
        .ok_or_else(|| invalid(format!("(k={k}, n={n}) is outside the table")))
}

/// `|P_k(n)|` as a decimal string; free it with [`ffrmf_string_free`].
///
/// # Safety
/// `table` must be a live handle and `out` valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn ffrmf_count_table_count(
    table: *const FfrmfCountTable,
    k: usize,
    n: usize,
    out: *mut *mut c_char,
) -> FfrmfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let c = lookup(table, k, n)?;
        *out = CString::new(c.to_string()).expect("digits").into_raw();
        Ok(())
    })
}

/// `ln |P_k(n)|`, or negative infinity when the count is zero.
///
/// # Safety
/// `table` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ffrmf_count_table_log_count(
    table: *const FfrmfCountTable,
    k: usize,
    n: usize,
    out: *mut f64,
) -> FfrmfStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let c = lookup(table, k, n)?;
        *out = if c.bits() == 0 { f64::NEG_INFINITY } else { ln_biguint(&c) };
        Ok(())
    })
}

/// Natural log of the Hardy-Ramanujan bound
/// `(q^n / n) (log n + 2 - log 2)^{k-1} / (k-1)!`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ffrmf_hr_bound_log(q: u64, k: usize, n: usize, out: *mut f64) -> FfrmfStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if q < 2 || k < 1 || n < 1 {
            return Err(invalid("need q >= 2 and k, n >= 1"));
        }
        *out = counting::hr_bound(q, k, n).ln;
        Ok(())
    })
}

/// Enumerates `P_k(n)` over `F_q` for sampling.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn ffrmf_sampler_new(q: u64, k: usize, n: usize, out: *mut *mut FfrmfSampler) -> FfrmfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let inner = core(Support::new(q, k, n))?;
        *out = Box::into_raw(Box::new(FfrmfSampler { inner }));
        Ok(())
    })
}

/// # Safety
/// `sampler` must come from [`ffrmf_sampler_new`] and not have been freed.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ffrmf_sampler_free(sampler: *mut FfrmfSampler) {
    if !sampler.is_null() {
        drop(Box::from_raw(sampler));
    }
}

/// `|P_k(n)|`, the number of terms in each sample.
///
/// # Safety
/// `sampler` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ffrmf_sampler_support_size(sampler: *const FfrmfSampler, out: *mut usize) -> FfrmfStatus {
    guard(|| {
        let s = sampler.as_ref().ok_or_else(|| null("sampler"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = s.inner.len();
        Ok(())
    })
}

/// Runs `trials` trials with signs derived from `seed`. The result does
/// not depend on the number of worker threads.
///
/// # Safety
/// `sampler` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ffrmf_sampler_run(
    sampler: *const FfrmfSampler,
    trials: u64,
    seed: u64,
    out: *mut FfrmfSampleStats,
) -> FfrmfStatus {
    guard(|| {
        let s = sampler.as_ref().ok_or_else(|| null("sampler"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        let st = core(s.inner.run(trials, seed))?.stats;
        *out = FfrmfSampleStats {
            trials: st.trials,
            mean: st.mean,
            variance: st.variance,
            skewness: st.skewness,
            excess_kurtosis: st.excess_kurtosis,
            ks_distance: st.ks_distance,
        };
        Ok(())
    })
}

/// Compares `|P_k(n)|` with the Sathe-Selberg main term, using an Euler
/// product truncated at degree `truncation`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ffrmf_sathe_selberg(
    q: u64,
    k: usize,
    n: usize,
    truncation: usize,
    out: *mut FfrmfAsymptotic,
) -> FfrmfStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        core(ffrmf::polyfield::FieldSpec::with_order(q))?;
        let c = core(asymptotics::sathe_selberg_estimate(q, k, n, truncation))?;
        *out = FfrmfAsymptotic {
            exact_log: c.exact_log,
            predicted_log: c.predicted_log,
            relative_deviation: c.relative_deviation,
            g_value: c.g.value,
            g_tail_bound: c.g.tail_bound,
        };
        Ok(())
    })
}

/// `(sum_d |P_{k,d}|^2 + I-chain + J-chain) / |P_k(n)|^2`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ffrmf_three_sums_ratio(q: u64, k: usize, n: usize, out: *mut f64) -> FfrmfStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        core(ffrmf::polyfield::FieldSpec::with_order(q))?;
        *out = core(ffrmf::bounds::three_sums_report(q, k, n))?.ratio;
        Ok(())
    })
}

/// `Γ(z)` for `z > 0`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ffrmf_gamma(z: f64, out: *mut f64) -> FfrmfStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = core(asymptotics::gamma_real(z))?;
        Ok(())
    })
}

/// Copies the last error into a Rust string; for tests and Rust callers.
pub fn last_error_string() -> String {
    unsafe { CStr::from_ptr(ffrmf_last_error()) }.to_string_lossy().into_owned()
}
