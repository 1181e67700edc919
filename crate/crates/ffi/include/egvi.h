/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#ifndef EGVI_H
#define EGVI_H

#pragma once

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call. Codes 2 to 16 mirror the library's
// error kinds.
typedef enum EgviStatus {
  EGVI_STATUS_OK = 0,
  // Null pointer, unknown enum value, short buffer or bad UTF-8.
  EGVI_STATUS_INVALID_ARGUMENT = 1,
  EGVI_STATUS_DIMENSION_MISMATCH = 2,
  EGVI_STATUS_NONFINITE_OUTPUT = 3,
  EGVI_STATUS_NONFINITE_INPUT = 4,
  EGVI_STATUS_NONPOSITIVE_STEPSIZE = 5,
  EGVI_STATUS_INVALID_CARDINALITY = 6,
  EGVI_STATUS_DIMENSION_TOO_LARGE = 7,
  EGVI_STATUS_INVALID_SET = 8,
  EGVI_STATUS_STATIONARY = 9,
  EGVI_STATUS_BACKTRACK_LIMIT = 10,
  EGVI_STATUS_EMPTY_TRACE = 11,
  EGVI_STATUS_INFEASIBLE_INPUT = 12,
  EGVI_STATUS_OVERFLOW = 13,
  EGVI_STATUS_SINGULAR_MATRIX = 14,
  EGVI_STATUS_INVALID_CONFIG = 15,
  EGVI_STATUS_INVALID_PROBLEM = 16,
  // A Rust panic was caught at the boundary.
  EGVI_STATUS_PANIC = 17,
} EgviStatus;

typedef enum EgviStopReason {
  EGVI_STOP_REASON_TOL_REACHED = 0,
  EGVI_STOP_REASON_MAX_ITER = 1,
  EGVI_STOP_REASON_STATIONARY_POINT = 2,
} EgviStopReason;

typedef enum EgviAlgorithm {
  EGVI_ALGORITHM_EG_FIXED = 0,
  EGVI_ALGORITHM_PF_NE_EG = 1,
  EGVI_ALGORITHM_PF_NE_EG_BT = 2,
  EGVI_ALGORITHM_PF_NE_EG_ADABT = 3,
} EgviAlgorithm;

typedef enum EgviLambdaSchedule {
  EGVI_LAMBDA_SCHEDULE_CONSTANT_ONE = 0,
  EGVI_LAMBDA_SCHEDULE_LOG_DECAY = 1,
} EgviLambdaSchedule;

typedef enum EgviStopMetric {
  EGVI_STOP_METRIC_EG_RESIDUAL = 0,
  EGVI_STOP_METRIC_NATURAL_RESIDUAL = 1,
  EGVI_STOP_METRIC_GAP = 2,
} EgviStopMetric;

// Opaque problem handle.
typedef struct EgviProblem EgviProblem;

// Opaque result handle.
typedef struct EgviResult EgviResult;

// Solver settings. Obtain defaults from [`egvi_config_default`].
typedef struct EgviSolverConfig {
  // An `EgviAlgorithm` value.
  int32_t algorithm;
  double eta0;
  double theta;
  double rho;
  // An `EgviLambdaSchedule` value.
  int32_t lambda_schedule;
  uint64_t max_iter;
  double residual_tol;
  double stationarity_tol;
  bool bt_increase_trick;
  // An `EgviStopMetric` value.
  int32_t stop_metric;
  bool record_nat;
  bool record_tan;
  bool record_gap;
  bool record_dist;
  // Stepsize of the recorded natural residual.
  double nat_eta;
  uint64_t seed;
} EgviSolverConfig;

// One trace row. Metrics that were not recorded are NaN.
typedef struct EgviRecord {
  uint64_t t;
  double eta;
  double l_t;
  double hat_l_t;
  double eg_residual;
  double nat_residual;
  double tan_residual;
  double gap;
  double dist_to_solution;
  uint32_t backtrack_failures;
  double elapsed_seconds;
} EgviRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Fills `out` with the library defaults for `algorithm` (an `EgviAlgorithm`).
//
// # Safety
// `out` must point to writable memory for one `EgviSolverConfig`.
enum EgviStatus egvi_config_default(int32_t algorithm, struct EgviSolverConfig *out);

// Random `d x d` matrix game with entry density `kappa`.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum EgviStatus egvi_problem_matrix_game(uintptr_t d,
                                         double kappa,
                                         uint64_t seed,
                                         struct EgviProblem **out);

// Random LASSO saddle problem.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum EgviStatus egvi_problem_lasso(uintptr_t m,
                                   uintptr_t n,
                                   double sparsity_frac,
                                   double sigma,
                                   double lambda,
                                   uint64_t seed,
                                   struct EgviProblem **out);

// Minimax group fairness problem with `m` groups of `n` samples in `d`
// dimensions. `flipped` selects the alternative operator sign.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum EgviStatus egvi_problem_fairness(uintptr_t m,
                                      uintptr_t n,
                                      uintptr_t d,
                                      uint64_t seed,
                                      bool flipped,
                                      struct EgviProblem **out);

// Synthetic MESP relaxation of order `d` and cardinality `s`.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum EgviStatus egvi_problem_mesp(uintptr_t d,
                                  uintptr_t s,
                                  uint64_t seed,
                                  struct EgviProblem **out);

// Matrix game read from a whitespace-separated text file (header `d`).
//
// # Safety
// `path` must be a NUL-terminated string; `out` a valid handle slot.
enum EgviStatus egvi_problem_load_matrix_game(const char *path, struct EgviProblem **out);

// MESP instance read from a text file (header `d s`).
//
// # Safety
// `path` must be a NUL-terminated string; `out` a valid handle slot.
enum EgviStatus egvi_problem_load_mesp(const char *path, struct EgviProblem **out);

// Dimension of the problem, or 0 for a null handle.
//
// # Safety
// `problem` must be null or a live handle.
uintptr_t egvi_problem_dim(const struct EgviProblem *problem);

// Copies the default starting point into `out[0..len]`.
//
// # Safety
// `problem` must be a live handle and `out` must hold `len` doubles.
enum EgviStatus egvi_problem_initial_point(const struct EgviProblem *problem,
                                           double *out,
                                           uintptr_t len);

// Evaluates the operator: `out = F(z)`.
//
// # Safety
// `z` must hold `z_len` doubles and `out` must hold `out_len` doubles.
enum EgviStatus egvi_problem_evaluate(const struct EgviProblem *problem,
                                      const double *z,
                                      uintptr_t z_len,
                                      double *out,
                                      uintptr_t out_len);

// # Safety
// `problem` must be null or a handle not yet freed.
void egvi_problem_free(struct EgviProblem *problem);

// Runs the configured solver from `z0` (or the problem's starting point
// when `z0` is null).
//
// When the run fails part-way, `*out` still receives the iterations
// completed before the failure and the failure's status is returned. On
// argument errors `*out` is set to null.
//
// # Safety
// `problem` and `config` must be live; `z0` must be null or hold `z0_len`
// doubles; `out` must be a valid handle slot.
enum EgviStatus egvi_solve(const struct EgviProblem *problem,
                           const struct EgviSolverConfig *config,
                           const double *z0,
                           uintptr_t z0_len,
                           struct EgviResult **out);

// Number of completed iterations (trace rows), or 0 for a null handle.
//
// # Safety
// `result` must be null or a live handle.
uintptr_t egvi_result_iterations(const struct EgviResult *result);

// Operator evaluations spent by the run.
//
// # Safety
// `result` must be null or a live handle.
uint64_t egvi_result_operator_evals(const struct EgviResult *result);

// # Safety
// `result` must be a live handle; `out` must be writable.
enum EgviStatus egvi_result_stop_reason(const struct EgviResult *result, enum EgviStopReason *out);

// Copies the last iterate into `out[0..len]`.
//
// # Safety
// `result` must be a live handle and `out` must hold `len` doubles.
enum EgviStatus egvi_result_final_point(const struct EgviResult *result,
                                        double *out,
                                        uintptr_t len);

// Reads trace row `index` (0-based).
//
// # Safety
// `result` must be a live handle; `out` must be writable.
enum EgviStatus egvi_result_record(const struct EgviResult *result,
                                   uintptr_t index,
                                   struct EgviRecord *out);

// # Safety
// `result` must be null or a handle not yet freed.
void egvi_result_free(struct EgviResult *result);

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len - 1` bytes) and returns the full message length
// excluding the terminator; 0 when no error has occurred.
//
// # Safety
// `buf` must be null or hold `len` bytes.
uintptr_t egvi_last_error_message(char *buf, uintptr_t len);

// Static, NUL-terminated name of a status code (e.g. `"OVERFLOW"`);
// `"UNKNOWN"` for values outside `EgviStatus`.
const char *egvi_status_name(int32_t status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EGVI_H */
