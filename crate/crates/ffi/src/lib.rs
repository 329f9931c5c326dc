//! C ABI over the lobsim book, simulator and estimators.
//!
//! Every fallible call returns a [`LobsimStatus`]. On failure the message is
//! kept per thread and can be read with [`lobsim_last_error`]. Handles are
//! opaque and must be released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use lobsim::analysis::{ccdf_tail_fit, dfa, mfdfa, ScaleSpec};
use lobsim::cli::config::apply_sim;
use lobsim::lob::{EventKind, LimitOrderBook, Side};
use lobsim::simulator::{run_round, SeriesSet, SimConfig};
use lobsim::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LobsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Estimation = 3,
    NotFound = 4,
    Io = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LobsimSide {
    Buy = 0,
    Sell = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LobsimEventKind {
    Rested = 0,
    Executed = 1,
    Canceled = 2,
}

/// Best quotes in log units. `has_bid`/`has_ask` are 0 when a side is empty,
/// in which case the matching price and the spread are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LobsimQuote {
    pub has_bid: u8,
    pub has_ask: u8,
    pub best_bid_log: f64,
    pub best_ask_log: f64,
    pub spread_log: f64,
    pub mid_log: f64,
}

/// Outcome of one submission. `trade_price_log` is NaN unless executed.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LobsimSubmitResult {
    pub kind: LobsimEventKind,
    pub order_id: u64,
    pub log_price: f64,
    pub trade_price_log: f64,
}

pub struct LobsimBook(LimitOrderBook);
pub struct LobsimConfig(SimConfig);
pub struct LobsimSeries(SeriesSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LobsimStatus {
    match e {
        Error::Parameter(_) | Error::Parse { .. } => LobsimStatus::InvalidArgument,
        Error::Estimation { .. } => LobsimStatus::Estimation,
        Error::NotFound(_) => LobsimStatus::NotFound,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => LobsimStatus::Io,
    }
}

struct Fail(LobsimStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(LobsimStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(LobsimStatus::InvalidArgument, msg.into())
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> LobsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LobsimStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LobsimStatus::Panic
        }
    }
}

unsafe fn input<'a>(data: *const f64, len: usize) -> Result<&'a [f64], Fail> {
    if data.is_null() {
        return Err(null("data"));
    }
    Ok(slice::from_raw_parts(data, len))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

fn spec(fit_min: usize, fit_max: usize) -> ScaleSpec {
    if fit_min == 0 && fit_max == 0 {
        ScaleSpec::default()
    } else {
        ScaleSpec::fitted(fit_min, fit_max)
    }
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lobsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Empty book whose mid is `initial_mid` until both sides quote.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lobsim_book_new(initial_mid: f64, out: *mut *mut LobsimBook) -> LobsimStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if !initial_mid.is_finite() {
            return Err(invalid("initial_mid must be finite"));
        }
        *out = Box::into_raw(Box::new(LobsimBook(LimitOrderBook::new(initial_mid))));
        Ok(())
    })
}

/// # Safety
/// `book` must come from [`lobsim_book_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lobsim_book_free(book: *mut LobsimBook) {
    if !book.is_null() {
        drop(Box::from_raw(book));
    }
}

/// Places a resting order at `log_price` without matching.
///
/// # Safety
/// `book` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lobsim_book_seed(book: *mut LobsimBook, side: LobsimSide, log_price: f64) -> LobsimStatus {
    guard(|| {
        let book = out_ref(book, "book")?;
        if !log_price.is_finite() {
            return Err(invalid("log_price must be finite"));
        }
        book.0.seed_order(side_of(side), log_price);
        Ok(())
    })
}

/// Submits a unit order `x` log units from the same-side best.
///
/// # Safety
/// `book` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lobsim_book_submit(
    book: *mut LobsimBook,
    side: LobsimSide,
    x: f64,
    step: u64,
    out: *mut LobsimSubmitResult,
) -> LobsimStatus {
    guard(|| {
        let book = out_ref(book, "book")?;
        let out = out_ref(out, "out")?;
        let ev = book.0.submit(side_of(side), x, step)?;
        *out = LobsimSubmitResult {
            kind: match ev.kind {
                EventKind::Rested => LobsimEventKind::Rested,
                EventKind::Executed => LobsimEventKind::Executed,
                EventKind::Canceled => LobsimEventKind::Canceled,
            },
            order_id: ev.order_id,
            log_price: ev.log_price,
            trade_price_log: ev.trade_price_log.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// # Safety
/// `book` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lobsim_book_cancel(book: *mut LobsimBook, order_id: u64, step: u64) -> LobsimStatus {
    guard(|| {
        out_ref(book, "book")?.0.cancel(order_id, step)?;
        Ok(())
    })
}

/// # Safety
/// `book` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lobsim_book_quote(book: *const LobsimBook, out: *mut LobsimQuote) -> LobsimStatus {
    guard(|| {
        let book = book.as_ref().ok_or_else(|| null("book"))?;
        let out = out_ref(out, "out")?;
        let q = book.0.quote();
        *out = LobsimQuote {
            has_bid: q.best_bid_log.is_some() as u8,
            has_ask: q.best_ask_log.is_some() as u8,
            best_bid_log: q.best_bid_log.unwrap_or(f64::NAN),
            best_ask_log: q.best_ask_log.unwrap_or(f64::NAN),
            spread_log: q.spread_log.unwrap_or(f64::NAN),
            mid_log: q.mid_log,
        };
        Ok(())
    })
}

/// Number of resting orders, or 0 for a null handle.
///
/// # Safety
/// `book` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lobsim_book_len(book: *const LobsimBook) -> usize {
    book.as_ref().map_or(0, |b| b.0.len())
}

/// Default configuration: iid relative prices. With `long_memory` nonzero the
/// relative prices carry long memory instead.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lobsim_config_new(long_memory: u8, out: *mut *mut LobsimConfig) -> LobsimStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = if long_memory != 0 {
            SimConfig::modified()
        } else {
            SimConfig::default()
        };
        *out = Box::into_raw(Box::new(LobsimConfig(c)));
        Ok(())
    })
}

/// # Safety
/// `config` must come from [`lobsim_config_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lobsim_config_free(config: *mut LobsimConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Sets a field by name, e.g. `("h_x", "0.7")` or `("cancel_mode", "poisson")`.
/// Unknown keys and unparsable values fail with `InvalidArgument`.
///
/// # Safety
/// `config` must be a live handle; `key` and `value` nul-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn lobsim_config_set(
    config: *mut LobsimConfig,
    key: *const c_char,
    value: *const c_char,
) -> LobsimStatus {
    guard(|| {
        let config = out_ref(config, "config")?;
        if key.is_null() || value.is_null() {
            return Err(null("key or value"));
        }
        let key = CStr::from_ptr(key).to_str().map_err(|_| invalid("key is not UTF-8"))?;
        let value = CStr::from_ptr(value).to_str().map_err(|_| invalid("value is not UTF-8"))?;
        apply_sim(&mut config.0, key, value).map_err(|e| invalid(e.to_string()))
    })
}

/// Runs one round and hands back its series.
///
/// # Safety
/// `config` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lobsim_run_round(config: *const LobsimConfig, out: *mut *mut LobsimSeries) -> LobsimStatus {
    guard(|| {
        let config = config.as_ref().ok_or_else(|| null("config"))?;
        let out = out_ref(out, "out")?;
        let s = run_round(&config.0)?;
        *out = Box::into_raw(Box::new(LobsimSeries(s)));
        Ok(())
    })
}

/// # Safety
/// `series` must come from [`lobsim_run_round`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lobsim_series_free(series: *mut LobsimSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of recorded returns, or 0 for a null handle.
///
/// # Safety
/// `series` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lobsim_series_len(series: *const LobsimSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.returns.len())
}

/// Borrowed pointer to the returns; valid while the handle lives.
///
/// # Safety
/// `series` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lobsim_series_returns(series: *const LobsimSeries) -> *const f64 {
    series.as_ref().map_or(ptr::null(), |s| s.0.returns.as_ptr())
}

/// Borrowed pointer to the volatility `|r|`; valid while the handle lives.
///
/// # Safety
/// `series` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lobsim_series_volatility(series: *const LobsimSeries) -> *const f64 {
    series.as_ref().map_or(ptr::null(), |s| s.0.volatility.as_ptr())
}

/// DFA exponent of `data`. Scales are 30 log-spaced sizes from 8 to `len / 4`;
/// the fit uses `fit_min <= l < fit_max`, or every scale when both are 0.
///
/// # Safety
/// `data` must point to `len` doubles; `hurst` and `stderr_out` to writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lobsim_dfa(
    data: *const f64,
    len: usize,
    detrend_order: usize,
    fit_min: usize,
    fit_max: usize,
    hurst: *mut f64,
    stderr_out: *mut f64,
) -> LobsimStatus {
    guard(|| {
        let data = input(data, len)?;
        let hurst = out_ref(hurst, "hurst")?;
        let stderr_out = out_ref(stderr_out, "stderr_out")?;
        let r = dfa(data, detrend_order, &spec(fit_min, fit_max))?;
        *hurst = r.hurst;
        *stderr_out = r.hurst_stderr;
        Ok(())
    })
}

/// Multifractal DFA-1 on `data`; writes `H(q)` and `tau(q)` for each of the
/// `n_q` orders. Scale and fit conventions follow [`lobsim_dfa`].
///
/// # Safety
/// `data` must hold `len` doubles; `q`, `hq` and `tau` must hold `n_q` doubles each.
#[no_mangle]
pub unsafe extern "C" fn lobsim_mfdfa(
    data: *const f64,
    len: usize,
    q: *const f64,
    n_q: usize,
    fit_min: usize,
    fit_max: usize,
    hq: *mut f64,
    tau: *mut f64,
) -> LobsimStatus {
    guard(|| {
        let data = input(data, len)?;
        let q = input(q, n_q)?;
        if hq.is_null() || tau.is_null() {
            return Err(null("hq or tau"));
        }
        let r = mfdfa(data, q, &spec(fit_min, fit_max))?;
        slice::from_raw_parts_mut(hq, n_q).copy_from_slice(&r.hq);
        slice::from_raw_parts_mut(tau, n_q).copy_from_slice(&r.tau);
        Ok(())
    })
}

/// Power-law index of the upper tail of `data` from a least-squares fit to the
/// top `fit_fraction` of its complementary distribution.
///
/// # Safety
/// `data` must point to `len` doubles; `beta` to a writable double.
#[no_mangle]
pub unsafe extern "C" fn lobsim_tail_fit(data: *const f64, len: usize, fit_fraction: f64, beta: *mut f64) -> LobsimStatus {
    guard(|| {
        let data = input(data, len)?;
        let beta = out_ref(beta, "beta")?;
        *beta = ccdf_tail_fit(data, fit_fraction)?.beta;
        Ok(())
    })
}

fn side_of(side: LobsimSide) -> Side {
    match side {
        LobsimSide::Buy => Side::Buy,
        LobsimSide::Sell => Side::Sell,
    }
}
