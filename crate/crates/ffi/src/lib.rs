//! C interface to the `egvi` solvers.
//!
//! Problems and results are opaque handles owned by the caller and released
//! with [`egvi_problem_free`] / [`egvi_result_free`]; a call that fails
//! leaves its output handle null. Every fallible call
//! returns an [`EgviStatus`]; the message of the most recent failure on the
//! calling thread is available from [`egvi_last_error_message`].
//!
//! Enumerated fields of [`EgviSolverConfig`] are plain integers so that any
//! value coming from C is checked rather than trusted; see the
//! `EgviAlgorithm`, `EgviLambdaSchedule` and `EgviStopMetric` enums for the
//! accepted values.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use egvi::problems::{self, FairnessSign};
use egvi::solver::solve_partial;
use egvi::{Algorithm, Error, LambdaSchedule, MetricSet, SolveResult, SolverConfig, StopMetric, StopReason, VIProblem};

/// Result code of every fallible call. Codes 2 to 16 mirror the library's
/// error kinds.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EgviStatus {
    Ok = 0,
    /// Null pointer, unknown enum value, short buffer or bad UTF-8.
    InvalidArgument = 1,
    DimensionMismatch = 2,
    NonfiniteOutput = 3,
    NonfiniteInput = 4,
    NonpositiveStepsize = 5,
    InvalidCardinality = 6,
    DimensionTooLarge = 7,
    InvalidSet = 8,
    Stationary = 9,
    BacktrackLimit = 10,
    EmptyTrace = 11,
    InfeasibleInput = 12,
    Overflow = 13,
    SingularMatrix = 14,
    InvalidConfig = 15,
    InvalidProblem = 16,
    /// A Rust panic was caught at the boundary.
    Panic = 17,
}

impl EgviStatus {
    fn from_error(e: &Error) -> Self {
        use EgviStatus::*;
        match e.code() {
            2 => DimensionMismatch,
            3 => NonfiniteOutput,
            4 => NonfiniteInput,
            5 => NonpositiveStepsize,
            6 => InvalidCardinality,
            7 => DimensionTooLarge,
            8 => InvalidSet,
            9 => Stationary,
            10 => BacktrackLimit,
            11 => EmptyTrace,
            12 => InfeasibleInput,
            13 => Overflow,
            14 => SingularMatrix,
            15 => InvalidConfig,
            16 => InvalidProblem,
            _ => InvalidArgument,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EgviAlgorithm {
    EgFixed = 0,
    PfNeEg = 1,
    PfNeEgBt = 2,
    PfNeEgAdabt = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EgviLambdaSchedule {
    ConstantOne = 0,
    LogDecay = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EgviStopMetric {
    EgResidual = 0,
    NaturalResidual = 1,
    Gap = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EgviStopReason {
    TolReached = 0,
    MaxIter = 1,
    StationaryPoint = 2,
}

/// Solver settings. Obtain defaults from [`egvi_config_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct EgviSolverConfig {
    /// An `EgviAlgorithm` value.
    pub algorithm: i32,
    pub eta0: f64,
    pub theta: f64,
    pub rho: f64,
    /// An `EgviLambdaSchedule` value.
    pub lambda_schedule: i32,
    pub max_iter: u64,
    pub residual_tol: f64,
    pub stationarity_tol: f64,
    pub bt_increase_trick: bool,
    /// An `EgviStopMetric` value.
    pub stop_metric: i32,
    pub record_nat: bool,
    pub record_tan: bool,
    pub record_gap: bool,
    pub record_dist: bool,
    /// Stepsize of the recorded natural residual.
    pub nat_eta: f64,
    pub seed: u64,
}

/// One trace row. Metrics that were not recorded are NaN.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct EgviRecord {
    pub t: u64,
    pub eta: f64,
    pub l_t: f64,
    pub hat_l_t: f64,
    pub eg_residual: f64,
    pub nat_residual: f64,
    pub tan_residual: f64,
    pub gap: f64,
    pub dist_to_solution: f64,
    pub backtrack_failures: u32,
    pub elapsed_seconds: f64,
}

/// Opaque problem handle.
pub struct EgviProblem(VIProblem);

/// Opaque result handle.
pub struct EgviResult(SolveResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(EgviStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(EgviStatus::from_error(&e), e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(EgviStatus::InvalidArgument, msg.into())
}

/// Runs `body`, converting failures and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> EgviStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => EgviStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("panic: {msg}"));
            EgviStatus::Panic
        }
    }
}

unsafe fn slice<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(invalid(format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn copy_out(src: &[f64], out: *mut f64, len: usize) -> Result<(), Failure> {
    if len < src.len() {
        return Err(invalid(format!("output buffer holds {len} values, need {}", src.len())));
    }
    if src.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(invalid("output buffer is null"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

unsafe fn path_arg(path: *const c_char) -> Result<String, Failure> {
    if path.is_null() {
        return Err(invalid("path is null"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| invalid("path is not valid UTF-8"))
}

unsafe fn store_problem(out: *mut *mut EgviProblem, problem: VIProblem) -> Result<(), Failure> {
    *out = Box::into_raw(Box::new(EgviProblem(problem)));
    Ok(())
}

/// Rejects a null slot and clears it so failures leave a null handle.
unsafe fn check_out<T>(out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(invalid("output handle pointer is null"));
    }
    *out = ptr::null_mut();
    Ok(())
}

fn algorithm(v: i32) -> Result<Algorithm, Failure> {
    Ok(match v {
        0 => Algorithm::EgFixed,
        1 => Algorithm::PfNeEg,
        2 => Algorithm::PfNeEgBt,
        3 => Algorithm::PfNeEgAdabt,
        _ => return Err(invalid(format!("unknown algorithm {v}"))),
    })
}

fn to_solver_config(c: &EgviSolverConfig) -> Result<SolverConfig, Failure> {
    let lambda_schedule = match c.lambda_schedule {
        0 => LambdaSchedule::ConstantOne,
        1 => LambdaSchedule::LogDecay,
        v => return Err(invalid(format!("unknown lambda schedule {v}"))),
    };
    let stop_metric = match c.stop_metric {
        0 => StopMetric::EgResidual,
        1 => StopMetric::NaturalResidual,
        2 => StopMetric::Gap,
        v => return Err(invalid(format!("unknown stop metric {v}"))),
    };
    let max_iter = usize::try_from(c.max_iter).map_err(|_| invalid("max_iter does not fit in usize"))?;
    Ok(SolverConfig {
        algorithm: algorithm(c.algorithm)?,
        eta0: c.eta0,
        theta: c.theta,
        rho: c.rho,
        lambda_schedule,
        max_iter,
        residual_tol: c.residual_tol,
        stationarity_tol: c.stationarity_tol,
        bt_increase_trick: c.bt_increase_trick,
        seed: c.seed,
        stop_metric,
        record: MetricSet {
            nat: c.record_nat,
            tan: c.record_tan,
            gap: c.record_gap,
            dist: c.record_dist,
            nat_eta: c.nat_eta,
        },
        ergodic: None,
    })
}

/// Fills `out` with the library defaults for `algorithm` (an `EgviAlgorithm`).
///
/// # Safety
/// `out` must point to writable memory for one `EgviSolverConfig`.
#[no_mangle]
pub unsafe extern "C" fn egvi_config_default(algorithm: i32, out: *mut EgviSolverConfig) -> EgviStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("config pointer is null"));
        }
        let d = SolverConfig {
            algorithm: self::algorithm(algorithm)?,
            ..SolverConfig::default()
        };
        *out = EgviSolverConfig {
            algorithm,
            eta0: d.eta0,
            theta: d.theta,
            rho: d.rho,
            lambda_schedule: match d.lambda_schedule {
                LambdaSchedule::ConstantOne => 0,
                LambdaSchedule::LogDecay => 1,
            },
            max_iter: d.max_iter as u64,
            residual_tol: d.residual_tol,
            stationarity_tol: d.stationarity_tol,
            bt_increase_trick: d.bt_increase_trick,
            stop_metric: EgviStopMetric::EgResidual as i32,
            record_nat: d.record.nat,
            record_tan: d.record.tan,
            record_gap: d.record.gap,
            record_dist: d.record.dist,
            nat_eta: d.record.nat_eta,
            seed: d.seed,
        };
        Ok(())
    })
}

/// Random `d x d` matrix game with entry density `kappa`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn egvi_problem_matrix_game(
    d: usize,
    kappa: f64,
    seed: u64,
    out: *mut *mut EgviProblem,
) -> EgviStatus {
    guard(|| {
        check_out(out)?;
        store_problem(out, problems::make_matrix_game(d, kappa, seed)?)
    })
}

/// Random LASSO saddle problem.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn egvi_problem_lasso(
    m: usize,
    n: usize,
    sparsity_frac: f64,
    sigma: f64,
    lambda: f64,
    seed: u64,
    out: *mut *mut EgviProblem,
) -> EgviStatus {
    guard(|| {
        check_out(out)?;
        store_problem(out, problems::make_lasso(m, n, sparsity_frac, sigma, lambda, seed)?)
    })
}

/// Minimax group fairness problem with `m` groups of `n` samples in `d`
/// dimensions. `flipped` selects the alternative operator sign.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn egvi_problem_fairness(
    m: usize,
    n: usize,
    d: usize,
    seed: u64,
    flipped: bool,
    out: *mut *mut EgviProblem,
) -> EgviStatus {
    guard(|| {
        check_out(out)?;
        let sign = if flipped {
            FairnessSign::Flipped
        } else {
            FairnessSign::Standard
        };
        let instance = problems::generate_fairness(m, n, d, seed)?;
        store_problem(out, problems::fairness_operator(&instance, sign)?)
    })
}

/// Synthetic MESP relaxation of order `d` and cardinality `s`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn egvi_problem_mesp(d: usize, s: usize, seed: u64, out: *mut *mut EgviProblem) -> EgviStatus {
    guard(|| {
        check_out(out)?;
        store_problem(out, problems::make_mesp(d, s, seed)?)
    })
}

/// Matrix game read from a whitespace-separated text file (header `d`).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn egvi_problem_load_matrix_game(path: *const c_char, out: *mut *mut EgviProblem) -> EgviStatus {
    guard(|| {
        check_out(out)?;
        let path = path_arg(path)?;
        store_problem(out, problems::load_matrix_game(path)?)
    })
}

/// MESP instance read from a text file (header `d s`).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn egvi_problem_load_mesp(path: *const c_char, out: *mut *mut EgviProblem) -> EgviStatus {
    guard(|| {
        check_out(out)?;
        let path = path_arg(path)?;
        store_problem(out, problems::load_mesp(path)?)
    })
}

/// Dimension of the problem, or 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn egvi_problem_dim(problem: *const EgviProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.0.dim())
}

/// Copies the default starting point into `out[0..len]`.
///
/// # Safety
/// `problem` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn egvi_problem_initial_point(
    problem: *const EgviProblem,
    out: *mut f64,
    len: usize,
) -> EgviStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| invalid("problem is null"))?;
        copy_out(&p.0.initial_point, out, len)
    })
}

/// Evaluates the operator: `out = F(z)`.
///
/// # Safety
/// `z` must hold `z_len` doubles and `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn egvi_problem_evaluate(
    problem: *const EgviProblem,
    z: *const f64,
    z_len: usize,
    out: *mut f64,
    out_len: usize,
) -> EgviStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| invalid("problem is null"))?;
        let z = slice(z, z_len, "z")?;
        let f = p.0.evaluate(z)?;
        copy_out(&f, out, out_len)
    })
}

/// # Safety
/// `problem` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn egvi_problem_free(problem: *mut EgviProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Runs the configured solver from `z0` (or the problem's starting point
/// when `z0` is null).
///
/// When the run fails part-way, `*out` still receives the iterations
/// completed before the failure and the failure's status is returned. On
/// argument errors `*out` is set to null.
///
/// # Safety
/// `problem` and `config` must be live; `z0` must be null or hold `z0_len`
/// doubles; `out` must be a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn egvi_solve(
    problem: *const EgviProblem,
    config: *const EgviSolverConfig,
    z0: *const f64,
    z0_len: usize,
    out: *mut *mut EgviResult,
) -> EgviStatus {
    guard(|| {
        check_out(out)?;
        let p = problem.as_ref().ok_or_else(|| invalid("problem is null"))?;
        let c = config.as_ref().ok_or_else(|| invalid("config is null"))?;
        let cfg = to_solver_config(c)?;
        let start = if z0.is_null() {
            &p.0.initial_point[..]
        } else {
            slice(z0, z0_len, "z0")?
        };
        let partial = solve_partial(&p.0, &cfg, start)?;
        *out = Box::into_raw(Box::new(EgviResult(partial.result)));
        match partial.error {
            Some(e) => Err(e.into()),
            None => Ok(()),
        }
    })
}

/// Number of completed iterations (trace rows), or 0 for a null handle.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn egvi_result_iterations(result: *const EgviResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.iterations())
}

/// Operator evaluations spent by the run.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn egvi_result_operator_evals(result: *const EgviResult) -> u64 {
    result.as_ref().map_or(0, |r| r.0.operator_evals)
}

/// # Safety
/// `result` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn egvi_result_stop_reason(result: *const EgviResult, out: *mut EgviStopReason) -> EgviStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| invalid("result is null"))?;
        if out.is_null() {
            return Err(invalid("output pointer is null"));
        }
        *out = match r.0.stop_reason {
            StopReason::TolReached => EgviStopReason::TolReached,
            StopReason::MaxIter => EgviStopReason::MaxIter,
            StopReason::StationaryPoint => EgviStopReason::StationaryPoint,
        };
        Ok(())
    })
}

/// Copies the last iterate into `out[0..len]`.
///
/// # Safety
/// `result` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn egvi_result_final_point(result: *const EgviResult, out: *mut f64, len: usize) -> EgviStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| invalid("result is null"))?;
        copy_out(&r.0.final_point, out, len)
    })
}

/// Reads trace row `index` (0-based).
///
/// # Safety
/// `result` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn egvi_result_record(
    result: *const EgviResult,
    index: usize,
    out: *mut EgviRecord,
) -> EgviStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| invalid("result is null"))?;
        if out.is_null() {
            return Err(invalid("output pointer is null"));
        }
        let rec =
            r.0.trace
                .get(index)
                .ok_or_else(|| invalid(format!("record {index} out of range ({} rows)", r.0.trace.len())))?;
        let nan = |v: Option<f64>| v.unwrap_or(f64::NAN);
        *out = EgviRecord {
            t: rec.t as u64,
            eta: rec.eta,
            l_t: rec.l_t,
            hat_l_t: rec.hat_l_t,
            eg_residual: rec.eg_residual,
            nat_residual: nan(rec.nat_residual),
            tan_residual: nan(rec.tan_residual),
            gap: nan(rec.gap),
            dist_to_solution: nan(rec.dist_to_solution),
            backtrack_failures: rec.backtrack_failures,
            elapsed_seconds: rec.elapsed_seconds,
        };
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn egvi_result_free(result: *mut EgviResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length
/// excluding the terminator; 0 when no error has occurred.
///
/// # Safety
/// `buf` must be null or hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn egvi_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Static, NUL-terminated name of a status code (e.g. `"OVERFLOW"`);
/// `"UNKNOWN"` for values outside `EgviStatus`.
#[no_mangle]
pub extern "C" fn egvi_status_name(status: i32) -> *const c_char {
    use EgviStatus::*;
    let all = [
        Ok,
        InvalidArgument,
        DimensionMismatch,
        NonfiniteOutput,
        NonfiniteInput,
        NonpositiveStepsize,
        InvalidCardinality,
        DimensionTooLarge,
        InvalidSet,
        Stationary,
        BacktrackLimit,
        EmptyTrace,
        InfeasibleInput,
        Overflow,
        SingularMatrix,
        InvalidConfig,
        InvalidProblem,
        Panic,
    ];
    let Some(&status) = all.iter().find(|s| **s as i32 == status) else {
        return c"UNKNOWN".as_ptr();
    };
    let name: &'static CStr = match status {
        EgviStatus::Ok => c"OK",
        EgviStatus::InvalidArgument => c"INVALID_ARGUMENT",
        EgviStatus::DimensionMismatch => c"DIMENSION_MISMATCH",
        EgviStatus::NonfiniteOutput => c"NONFINITE_OUTPUT",
        EgviStatus::NonfiniteInput => c"NONFINITE_INPUT",
        EgviStatus::NonpositiveStepsize => c"NONPOSITIVE_STEPSIZE",
        EgviStatus::InvalidCardinality => c"INVALID_CARDINALITY",
        EgviStatus::DimensionTooLarge => c"DIMENSION_TOO_LARGE",
        EgviStatus::InvalidSet => c"INVALID_SET",
        EgviStatus::Stationary => c"STATIONARY",
        EgviStatus::BacktrackLimit => c"BACKTRACK_LIMIT",
        EgviStatus::EmptyTrace => c"EMPTY_TRACE",
        EgviStatus::InfeasibleInput => c"INFEASIBLE_INPUT",
        EgviStatus::Overflow => c"OVERFLOW",
        EgviStatus::SingularMatrix => c"SINGULAR_MATRIX",
        EgviStatus::InvalidConfig => c"INVALID_CONFIG",
        EgviStatus::InvalidProblem => c"INVALID_PROBLEM",
        EgviStatus::Panic => c"PANIC",
    };
    name.as_ptr()
}
