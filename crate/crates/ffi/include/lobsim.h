#ifndef LOBSIM_H
#define LOBSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum LobsimEventKind {
  LOBSIM_EVENT_KIND_RESTED = 0,
  LOBSIM_EVENT_KIND_EXECUTED = 1,
  LOBSIM_EVENT_KIND_CANCELED = 2,
} LobsimEventKind;

typedef enum LobsimSide {
  LOBSIM_SIDE_BUY = 0,
  LOBSIM_SIDE_SELL = 1,
} LobsimSide;

typedef enum LobsimStatus {
  LOBSIM_STATUS_OK = 0,
  LOBSIM_STATUS_NULL_POINTER = 1,
  LOBSIM_STATUS_INVALID_ARGUMENT = 2,
  LOBSIM_STATUS_ESTIMATION = 3,
  LOBSIM_STATUS_NOT_FOUND = 4,
  LOBSIM_STATUS_IO = 5,
  LOBSIM_STATUS_PANIC = 6,
} LobsimStatus;

typedef struct LobsimBook LobsimBook;

typedef struct LobsimConfig LobsimConfig;

typedef struct LobsimSeries LobsimSeries;

// Outcome of one submission. `trade_price_log` is NaN unless executed.
typedef struct LobsimSubmitResult {
  enum LobsimEventKind kind;
  uint64_t order_id;
  double log_price;
  double trade_price_log;
} LobsimSubmitResult;

// Best quotes in log units. `has_bid`/`has_ask` are 0 when a side is empty,
// in which case the matching price and the spread are NaN.
typedef struct LobsimQuote {
  uint8_t has_bid;
  uint8_t has_ask;
  double best_bid_log;
  double best_ask_log;
  double spread_log;
  double mid_log;
} LobsimQuote;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *lobsim_last_error(void);

// Empty book whose mid is `initial_mid` until both sides quote.
//
// # Safety
// `out` must be a valid pointer.
enum LobsimStatus lobsim_book_new(double initial_mid, struct LobsimBook **out);

// # Safety
// `book` must come from [`lobsim_book_new`] and not be used afterwards.
void lobsim_book_free(struct LobsimBook *book);

// Places a resting order at `log_price` without matching.
//
// # Safety
// `book` must be a live handle.
enum LobsimStatus lobsim_book_seed(struct LobsimBook *book, enum LobsimSide side, double log_price);

// Submits a unit order `x` log units from the same-side best.
//
// # Safety
// `book` and `out` must be valid pointers.
enum LobsimStatus lobsim_book_submit(struct LobsimBook *book,
                                     enum LobsimSide side,
                                     double x,
                                     uint64_t step,
                                     struct LobsimSubmitResult *out);

// # Safety
// `book` must be a live handle.
enum LobsimStatus lobsim_book_cancel(struct LobsimBook *book, uint64_t order_id, uint64_t step);

// # Safety
// `book` and `out` must be valid pointers.
enum LobsimStatus lobsim_book_quote(const struct LobsimBook *book, struct LobsimQuote *out);

// Number of resting orders, or 0 for a null handle.
//
// # Safety
// `book` must be a live handle or null.
uintptr_t lobsim_book_len(const struct LobsimBook *book);

// Default configuration: iid relative prices. With `long_memory` nonzero the
// relative prices carry long memory instead.
//
// # Safety
// `out` must be a valid pointer.
enum LobsimStatus lobsim_config_new(uint8_t long_memory, struct LobsimConfig **out);

// # Safety
// `config` must come from [`lobsim_config_new`] and not be used afterwards.
void lobsim_config_free(struct LobsimConfig *config);

// Sets a field by name, e.g. `("h_x", "0.7")` or `("cancel_mode", "poisson")`.
// Unknown keys and unparsable values fail with `InvalidArgument`.
//
// # Safety
// `config` must be a live handle; `key` and `value` nul-terminated strings.
enum LobsimStatus lobsim_config_set(struct LobsimConfig *config,
                                    const char *key,
                                    const char *value);

// Runs one round and hands back its series.
//
// # Safety
// `config` and `out` must be valid pointers.
enum LobsimStatus lobsim_run_round(const struct LobsimConfig *config, struct LobsimSeries **out);

// # Safety
// `series` must come from [`lobsim_run_round`] and not be used afterwards.
void lobsim_series_free(struct LobsimSeries *series);

// Number of recorded returns, or 0 for a null handle.
//
// # Safety
// `series` must be a live handle or null.
uintptr_t lobsim_series_len(const struct LobsimSeries *series);

// Borrowed pointer to the returns; valid while the handle lives.
//
// # Safety
// `series` must be a live handle or null.
const double *lobsim_series_returns(const struct LobsimSeries *series);

// Borrowed pointer to the volatility `|r|`; valid while the handle lives.
//
// # Safety
// `series` must be a live handle or null.
const double *lobsim_series_volatility(const struct LobsimSeries *series);

// DFA exponent of `data`. Scales are 30 log-spaced sizes from 8 to `len / 4`;
// the fit uses `fit_min <= l < fit_max`, or every scale when both are 0.
//
// # Safety
// `data` must point to `len` doubles; `hurst` and `stderr_out` to writable doubles.
enum LobsimStatus lobsim_dfa(const double *data,
                             uintptr_t len,
                             uintptr_t detrend_order,
                             uintptr_t fit_min,
                             uintptr_t fit_max,
                             double *hurst,
                             double *stderr_out);

// Multifractal DFA-1 on `data`; writes `H(q)` and `tau(q)` for each of the
// `n_q` orders. Scale and fit conventions follow [`lobsim_dfa`].
//
// # Safety
// `data` must hold `len` doubles; `q`, `hq` and `tau` must hold `n_q` doubles each.
enum LobsimStatus lobsim_mfdfa(const double *data,
                               uintptr_t len,
                               const double *q,
                               uintptr_t n_q,
                               uintptr_t fit_min,
                               uintptr_t fit_max,
                               double *hq,
                               double *tau);

// Power-law index of the upper tail of `data` from a least-squares fit to the
// top `fit_fraction` of its complementary distribution.
//
// # Safety
// `data` must point to `len` doubles; `beta` to a writable double.
enum LobsimStatus lobsim_tail_fit(const double *data,
                                  uintptr_t len,
                                  double fit_fraction,
                                  double *beta);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOBSIM_H */
