use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use lobsim_ffi::*;

fn last_error() -> String {
    let p = lobsim_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn book_round_trip() {
    unsafe {
        let mut book = ptr::null_mut();
        assert_eq!(lobsim_book_new(0.0, &mut book), LobsimStatus::Ok);
        assert_eq!(lobsim_book_seed(book, LobsimSide::Buy, 100f64.ln()), LobsimStatus::Ok);
        assert_eq!(lobsim_book_seed(book, LobsimSide::Sell, 101f64.ln()), LobsimStatus::Ok);
        let mut q = std::mem::zeroed::<LobsimQuote>();
        assert_eq!(lobsim_book_quote(book, &mut q), LobsimStatus::Ok);
        assert_eq!((q.has_bid, q.has_ask), (1, 1));
        assert!((q.spread_log - (101f64 / 100.0).ln()).abs() < 1e-15);

        let mut ev = std::mem::zeroed::<LobsimSubmitResult>();
        assert_eq!(lobsim_book_submit(book, LobsimSide::Buy, 0.0, 1, &mut ev), LobsimStatus::Ok);
        assert_eq!(ev.kind, LobsimEventKind::Rested);
        assert!(ev.trade_price_log.is_nan());
        assert_eq!(lobsim_book_len(book), 3);

        assert_eq!(lobsim_book_submit(book, LobsimSide::Buy, 1.0, 2, &mut ev), LobsimStatus::Ok);
        assert_eq!(ev.kind, LobsimEventKind::Executed);
        assert_eq!(ev.trade_price_log, 101f64.ln());
        assert_eq!(lobsim_book_quote(book, &mut q), LobsimStatus::Ok);
        assert_eq!(q.has_ask, 0);
        assert!(q.best_ask_log.is_nan());

        assert_eq!(lobsim_book_cancel(book, 999, 3), LobsimStatus::NotFound);
        assert!(last_error().contains("999"));
        assert_eq!(lobsim_book_submit(book, LobsimSide::Sell, f64::NAN, 3, &mut ev), LobsimStatus::InvalidArgument);
        lobsim_book_free(book);
    }
}

#[test]
fn null_handles_are_reported() {
    unsafe {
        assert_eq!(lobsim_book_new(0.0, ptr::null_mut()), LobsimStatus::NullPointer);
        let mut ev = std::mem::zeroed::<LobsimSubmitResult>();
        assert_eq!(lobsim_book_submit(ptr::null_mut(), LobsimSide::Buy, 0.0, 1, &mut ev), LobsimStatus::NullPointer);
        assert_eq!(lobsim_book_len(ptr::null()), 0);
        let mut h = 0.0;
        let mut se = 0.0;
        assert_eq!(lobsim_dfa(ptr::null(), 10, 1, 0, 0, &mut h, &mut se), LobsimStatus::NullPointer);
        lobsim_book_free(ptr::null_mut());
        lobsim_series_free(ptr::null_mut());
        lobsim_config_free(ptr::null_mut());
    }
}

#[test]
fn config_rejects_unknown_key() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(lobsim_config_new(1, &mut cfg), LobsimStatus::Ok);
        let k = CString::new("h_xx").unwrap();
        let v = CString::new("0.7").unwrap();
        assert_eq!(lobsim_config_set(cfg, k.as_ptr(), v.as_ptr()), LobsimStatus::InvalidArgument);
        assert!(last_error().contains("h_xx"));
        let k = CString::new("h_x").unwrap();
        let bad = CString::new("abc").unwrap();
        assert_eq!(lobsim_config_set(cfg, k.as_ptr(), bad.as_ptr()), LobsimStatus::InvalidArgument);
        lobsim_config_free(cfg);
    }
}

#[test]
fn short_round_and_estimators() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(lobsim_config_new(1, &mut cfg), LobsimStatus::Ok);
        for (k, v) in [("total_steps", "30000"), ("n_record", "20000"), ("seed", "3")] {
            let (k, v) = (CString::new(k).unwrap(), CString::new(v).unwrap());
            assert_eq!(lobsim_config_set(cfg, k.as_ptr(), v.as_ptr()), LobsimStatus::Ok);
        }
        let mut series = ptr::null_mut();
        assert_eq!(lobsim_run_round(cfg, &mut series), LobsimStatus::Ok);
        let n = lobsim_series_len(series);
        assert_eq!(n, 20000);
        let r = std::slice::from_raw_parts(lobsim_series_returns(series), n);
        let v = std::slice::from_raw_parts(lobsim_series_volatility(series), n);
        assert!(r.iter().zip(v).all(|(r, v)| r.abs() == *v));

        let (mut h, mut se) = (0.0, 0.0);
        assert_eq!(lobsim_dfa(v.as_ptr(), n, 1, 8, 2000, &mut h, &mut se), LobsimStatus::Ok);
        assert!(h > 0.3 && h < 1.2, "{h}");
        let mut beta = 0.0;
        assert_eq!(lobsim_tail_fit(v.as_ptr(), n, 0.01, &mut beta), LobsimStatus::Ok);
        assert!(beta > 0.0);
        let q = [0.0, 2.0];
        let (mut hq, mut tau) = ([0.0; 2], [0.0; 2]);
        assert_eq!(
            lobsim_mfdfa(v.as_ptr(), n, q.as_ptr(), 2, 8, 2000, hq.as_mut_ptr(), tau.as_mut_ptr()),
            LobsimStatus::Ok
        );
        assert_eq!(tau[0], -1.0);
        assert!((hq[1] - h).abs() < 1e-9);

        assert_eq!(lobsim_dfa(v.as_ptr(), 20, 1, 0, 0, &mut h, &mut se), LobsimStatus::InvalidArgument);
        lobsim_series_free(series);
        lobsim_config_free(cfg);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/lobsim.h")).unwrap();
    for name in [
        "lobsim_last_error",
        "lobsim_book_new",
        "lobsim_book_free",
        "lobsim_book_seed",
        "lobsim_book_submit",
        "lobsim_book_cancel",
        "lobsim_book_quote",
        "lobsim_book_len",
        "lobsim_config_new",
        "lobsim_config_free",
        "lobsim_config_set",
        "lobsim_run_round",
        "lobsim_series_free",
        "lobsim_series_len",
        "lobsim_series_returns",
        "lobsim_series_volatility",
        "lobsim_dfa",
        "lobsim_mfdfa",
        "lobsim_tail_fit",
        "typedef struct LobsimBook LobsimBook;",
        "LOBSIM_STATUS_NOT_FOUND = 4",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compiles a small C program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let target = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let profile_dir = target.parent().unwrap().join(if cfg!(debug_assertions) { "debug" } else { "release" });
    let lib = profile_dir.join("liblobsim_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let src = target.join("capi_smoke.c");
    let exe = target.join("capi_smoke");
    std::fs::write(
        &src,
        r#"#include <math.h>
#include <stdio.h>
#include "lobsim.h"

int main(void) {
    LobsimBook *book = NULL;
    if (lobsim_book_new(0.0, &book) != LOBSIM_STATUS_OK) return 1;
    lobsim_book_seed(book, LOBSIM_SIDE_BUY, log(100.0));
    lobsim_book_seed(book, LOBSIM_SIDE_SELL, log(101.0));
    LobsimSubmitResult ev;
    if (lobsim_book_submit(book, LOBSIM_SIDE_SELL, 1.0, 1, &ev) != LOBSIM_STATUS_OK) return 2;
    if (ev.kind != LOBSIM_EVENT_KIND_EXECUTED) return 3;
    if (lobsim_book_cancel(book, 42, 2) != LOBSIM_STATUS_NOT_FOUND) return 4;
    printf("%s\n", lobsim_last_error());
    printf("%zu\n", lobsim_book_len(book));
    lobsim_book_free(book);
    return 0;
}
"#,
    )
    .unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("order 42"), "{text}");
    assert!(text.ends_with("1\n"), "{text}");
}
