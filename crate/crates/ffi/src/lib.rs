//! C ABI over `ctmc-boltz`.
//!
//! Chains are opaque `CbzRateMatrix` handles created by one of the
//! constructors and released with [`cbz_rate_matrix_free`]. Every fallible
//! call returns a [`CbzStatus`]; codes 1-3 match the CLI exit codes. The
//! message for the most recent failure on the calling thread is available
//! from [`cbz_last_error_message`].
//!
//! States are zero-based here, unlike the CLI.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;
use std::slice;

use ctmc_boltz::cycles::{cycle_force, Cycle};
use ctmc_boltz::generators::{
    example_chain, lifted_cyclic_chain, random_heavy_tail_chain, random_iid_chain, Example,
    ExitRates,
};
use ctmc_boltz::io::{parse_chain_file, Chain, ParseError};
use ctmc_boltz::simulate::{aggregate, simulate_replicas};
use ctmc_boltz::{
    correlation_stats, predicted_rho, stationary_ctmc, stationary_dtmc, Error, RateMatrix,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbzStatus {
    Ok = 0,
    InvalidInput = 1,
    Degenerate = 2,
    NotIrreducible = 3,
    NullPointer = 4,
    BufferTooSmall = 5,
    SolveFailure = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbzExample {
    Q1 = 1,
    Q2 = 2,
}

/// Summary statistics of an analysis, without the per-state table.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CbzReport {
    pub n: usize,
    pub rho: f64,
    pub rho_tilde: f64,
    pub r2: f64,
    pub m_star: f64,
    pub b_star: f64,
    pub error_e: f64,
    pub var_log_q: f64,
    pub var_log_pi: f64,
    pub var_log_psi: f64,
    pub k_bound: f64,
    pub k_observed: f64,
    pub pairwise_ratio: f64,
    pub pairwise_bound: f64,
    pub k_bound_ok: bool,
    pub pairwise_bound_ok: bool,
}

/// Opaque handle to a validated rate matrix.
pub struct CbzRateMatrix(RateMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: CbzStatus, msg: impl Into<String>) -> CbzStatus {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
    status
}

fn status_of(e: &Error) -> CbzStatus {
    match e {
        Error::DegenerateExitRates | Error::DegeneratePi => CbzStatus::Degenerate,
        Error::NotIrreducible { .. } => CbzStatus::NotIrreducible,
        Error::SolveFailure(_) => CbzStatus::SolveFailure,
        _ => CbzStatus::InvalidInput,
    }
}

fn fail_with(e: Error) -> CbzStatus {
    fail(status_of(&e), e.to_string())
}

unsafe fn emit(m: RateMatrix, out: *mut *mut CbzRateMatrix) -> CbzStatus {
    *out = Box::into_raw(Box::new(CbzRateMatrix(m)));
    CbzStatus::Ok
}

unsafe fn handle<'a>(m: *const CbzRateMatrix) -> Option<&'a RateMatrix> {
    m.as_ref().map(|h| &h.0)
}

unsafe fn copy_out(d: &[f64], out: *mut f64, len: usize) -> CbzStatus {
    if out.is_null() {
        return fail(CbzStatus::NullPointer, "output buffer is null");
    }
    if len < d.len() {
        return fail(
            CbzStatus::BufferTooSmall,
            format!("buffer holds {len} values, need {}", d.len()),
        );
    }
    ptr::copy_nonoverlapping(d.as_ptr(), out, d.len());
    CbzStatus::Ok
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cbz_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a chain from an `n * n` row-major array of rates. The diagonal
/// is ignored.
///
/// # Safety
/// `rates` must point to `n * n` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbz_rate_matrix_new(
    rates: *const f64,
    n: usize,
    out: *mut *mut CbzRateMatrix,
) -> CbzStatus {
    if rates.is_null() || out.is_null() {
        return fail(CbzStatus::NullPointer, "null argument");
    }
    let Some(len) = n.checked_mul(n) else {
        return fail(CbzStatus::InvalidInput, "n * n overflows");
    };
    let data = slice::from_raw_parts(rates, len);
    let rows: Vec<&[f64]> = if n == 0 { Vec::new() } else { data.chunks(n).collect() };
    match RateMatrix::from_rows(&rows) {
        Ok(m) => emit(m, out),
        Err(e) => fail_with(e),
    }
}

/// Parses a `ctmc` chain file.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbz_rate_matrix_parse(
    text: *const c_char,
    out: *mut *mut CbzRateMatrix,
) -> CbzStatus {
    if text.is_null() || out.is_null() {
        return fail(CbzStatus::NullPointer, "null argument");
    }
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        return fail(CbzStatus::InvalidInput, "chain file is not UTF-8");
    };
    match parse_chain_file(text) {
        Ok(Chain::Ctmc(m)) => emit(m, out),
        Ok(Chain::Dtmc(_)) => fail(CbzStatus::InvalidInput, "expected a ctmc file"),
        Err(ParseError::Invalid(e)) => fail_with(e),
        Err(e @ ParseError::NotIrreducible { .. }) => fail(CbzStatus::NotIrreducible, e.to_string()),
        Err(e) => fail(CbzStatus::InvalidInput, e.to_string()),
    }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbz_example_chain(which: CbzExample, out: *mut *mut CbzRateMatrix) -> CbzStatus {
    if out.is_null() {
        return fail(CbzStatus::NullPointer, "null argument");
    }
    let ex = match which {
        CbzExample::Q1 => Example::Q1,
        CbzExample::Q2 => Example::Q2,
    };
    emit(example_chain(ex), out)
}

/// Lifted cyclic doubly stochastic chain with the given `n` exit rates.
///
/// # Safety
/// `exit_rates` must point to `n` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbz_lifted_cyclic_chain(
    n: usize,
    exit_rates: *const f64,
    out: *mut *mut CbzRateMatrix,
) -> CbzStatus {
    if exit_rates.is_null() || out.is_null() {
        return fail(CbzStatus::NullPointer, "null argument");
    }
    let q = slice::from_raw_parts(exit_rates, n).to_vec();
    match lifted_cyclic_chain(n, &ExitRates::List(q), false) {
        Ok(m) => emit(m, out),
        Err(e) => fail_with(e),
    }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbz_random_iid_chain(
    n: usize,
    low: f64,
    high: f64,
    seed: u64,
    out: *mut *mut CbzRateMatrix,
) -> CbzStatus {
    if out.is_null() {
        return fail(CbzStatus::NullPointer, "null argument");
    }
    match random_iid_chain(n, low, high, seed) {
        Ok(m) => emit(m, out),
        Err(e) => fail_with(e),
    }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbz_random_heavy_tail_chain(
    n: usize,
    width: f64,
    seed: u64,
    out: *mut *mut CbzRateMatrix,
) -> CbzStatus {
    if out.is_null() {
        return fail(CbzStatus::NullPointer, "null argument");
    }
    match random_heavy_tail_chain(n, width, seed) {
        Ok(m) => emit(m, out),
        Err(e) => fail_with(e),
    }
}

/// # Safety
/// `m` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn cbz_rate_matrix_free(m: *mut CbzRateMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// State count, or 0 for a NULL handle.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbz_rate_matrix_n(m: *const CbzRateMatrix) -> usize {
    handle(m).map_or(0, RateMatrix::n)
}

/// # Safety
/// `m` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cbz_exit_rates(m: *const CbzRateMatrix, out: *mut f64, len: usize) -> CbzStatus {
    let Some(m) = handle(m) else {
        return fail(CbzStatus::NullPointer, "null handle");
    };
    copy_out(m.exit_rates(), out, len)
}

/// Stationary distribution of the chain.
///
/// # Safety
/// `m` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cbz_stationary(m: *const CbzRateMatrix, out: *mut f64, len: usize) -> CbzStatus {
    let Some(m) = handle(m) else {
        return fail(CbzStatus::NullPointer, "null handle");
    };
    match stationary_ctmc(m) {
        Ok(pi) => copy_out(pi.probs(), out, len),
        Err(e) => fail_with(e),
    }
}

/// Stationary distribution of the embedded jump chain.
///
/// # Safety
/// `m` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cbz_jump_stationary(m: *const CbzRateMatrix, out: *mut f64, len: usize) -> CbzStatus {
    let Some(m) = handle(m) else {
        return fail(CbzStatus::NullPointer, "null handle");
    };
    match stationary_dtmc(&m.jump_chain()) {
        Ok(psi) => copy_out(psi.probs(), out, len),
        Err(e) => fail_with(e),
    }
}

/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbz_analyze(m: *const CbzRateMatrix, out: *mut CbzReport) -> CbzStatus {
    let Some(m) = handle(m) else {
        return fail(CbzStatus::NullPointer, "null handle");
    };
    if out.is_null() {
        return fail(CbzStatus::NullPointer, "null report");
    }
    match correlation_stats(m) {
        Ok(r) => {
            *out = CbzReport {
                n: r.n,
                rho: r.rho,
                rho_tilde: r.rho_tilde,
                r2: r.r2,
                m_star: r.m_star,
                b_star: r.b_star,
                error_e: r.error_e,
                var_log_q: r.var_log_q,
                var_log_pi: r.var_log_pi,
                var_log_psi: r.var_log_psi,
                k_bound: r.certificate.k_bound,
                k_observed: r.certificate.k_observed,
                pairwise_ratio: r.certificate.pairwise_ratio,
                pairwise_bound: r.certificate.pairwise_bound,
                k_bound_ok: r.certificate.k_bound_ok,
                pairwise_bound_ok: r.certificate.pairwise_bound_ok,
            };
            CbzStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Force around the cycle `states[0] -> ... -> states[len-1] -> states[0]`.
///
/// # Safety
/// `m` must be a live handle, `states` must hold `len` values and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbz_cycle_force(
    m: *const CbzRateMatrix,
    states: *const usize,
    len: usize,
    out: *mut f64,
) -> CbzStatus {
    let Some(m) = handle(m) else {
        return fail(CbzStatus::NullPointer, "null handle");
    };
    if states.is_null() || out.is_null() {
        return fail(CbzStatus::NullPointer, "null argument");
    }
    let states = slice::from_raw_parts(states, len).to_vec();
    match Cycle::new(states, m.n()).and_then(|c| cycle_force(m, &c)) {
        Ok(f) => {
            *out = f;
            CbzStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Averaged occupation fractions and jump frequencies over `replicas`
/// seeded replicas of `jumps` segments each.
///
/// # Safety
/// `m` must be a live handle; `occupation` and `jump_frequencies` must each
/// hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cbz_simulate(
    m: *const CbzRateMatrix,
    start: usize,
    jumps: usize,
    seed: u64,
    replicas: usize,
    occupation: *mut f64,
    jump_frequencies: *mut f64,
    len: usize,
) -> CbzStatus {
    let Some(m) = handle(m) else {
        return fail(CbzStatus::NullPointer, "null handle");
    };
    if replicas == 0 {
        return fail(CbzStatus::InvalidInput, "replicas must be at least 1");
    }
    let est = match simulate_replicas(m, start, jumps, seed, replicas)
        .and_then(|runs| aggregate(&runs, m.n(), 0))
    {
        Ok(e) => e,
        Err(e) => return fail_with(e),
    };
    let st = copy_out(est.occupation.probs(), occupation, len);
    if st != CbzStatus::Ok {
        return st;
    }
    copy_out(est.jump_frequencies.probs(), jump_frequencies, len)
}

/// `(1 + rho_tilde r) / sqrt(1 + 2 rho_tilde r + r^2)` with `r = sqrt(r2)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbz_predicted_rho(rho_tilde: f64, r2: f64, out: *mut f64) -> CbzStatus {
    if out.is_null() {
        return fail(CbzStatus::NullPointer, "null argument");
    }
    if r2.is_nan() || r2 < 0.0 {
        return fail(CbzStatus::InvalidInput, "r2 must be nonnegative");
    }
    match predicted_rho(rho_tilde, r2.sqrt()) {
        Ok(v) => {
            *out = v;
            CbzStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}
