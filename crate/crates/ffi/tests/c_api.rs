use std::ffi::CString;
use std::ptr;

use egvi_ffi::*;

fn config(algorithm: EgviAlgorithm) -> EgviSolverConfig {
    let mut c = std::mem::MaybeUninit::uninit();
    assert_eq!(
        unsafe { egvi_config_default(algorithm as i32, c.as_mut_ptr()) },
        EgviStatus::Ok
    );
    unsafe { c.assume_init() }
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    let n = unsafe { egvi_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(511)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn solves_lasso_through_handles() {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { egvi_problem_lasso(20, 40, 0.3, 0.01, 0.5, 3, &mut p) },
        EgviStatus::Ok
    );
    let dim = unsafe { egvi_problem_dim(p) };
    assert_eq!(dim, 80);

    let mut cfg = config(EgviAlgorithm::PfNeEg);
    cfg.max_iter = 20_000;
    cfg.residual_tol = 1e-8;
    cfg.stop_metric = EgviStopMetric::NaturalResidual as i32;
    cfg.record_nat = true;
    cfg.record_tan = true;

    let mut r = ptr::null_mut();
    assert_eq!(unsafe { egvi_solve(p, &cfg, ptr::null(), 0, &mut r) }, EgviStatus::Ok);
    let mut why = EgviStopReason::MaxIter;
    assert_eq!(unsafe { egvi_result_stop_reason(r, &mut why) }, EgviStatus::Ok);
    assert_eq!(why, EgviStopReason::TolReached);

    let n = unsafe { egvi_result_iterations(r) };
    let mut rec = std::mem::MaybeUninit::<EgviRecord>::uninit();
    assert_eq!(
        unsafe { egvi_result_record(r, n - 1, rec.as_mut_ptr()) },
        EgviStatus::Ok
    );
    let rec = unsafe { rec.assume_init() };
    assert_eq!(rec.t as usize, n);
    assert!(rec.nat_residual <= 1e-8);
    assert!(rec.eg_residual >= rec.tan_residual - 1e-9);
    assert!(rec.gap.is_nan());
    assert_eq!(unsafe { egvi_result_operator_evals(r) }, 1 + 2 * n as u64);

    // Same run from an explicit start reproduces the final point.
    let mut z0 = vec![0.0; dim];
    assert_eq!(
        unsafe { egvi_problem_initial_point(p, z0.as_mut_ptr(), dim) },
        EgviStatus::Ok
    );
    let mut r2 = ptr::null_mut();
    assert_eq!(
        unsafe { egvi_solve(p, &cfg, z0.as_ptr(), dim, &mut r2) },
        EgviStatus::Ok
    );
    let (mut a, mut b) = (vec![0.0; dim], vec![0.0; dim]);
    unsafe {
        egvi_result_final_point(r, a.as_mut_ptr(), dim);
        egvi_result_final_point(r2, b.as_mut_ptr(), dim);
    }
    assert_eq!(a, b);

    unsafe {
        egvi_result_free(r);
        egvi_result_free(r2);
        egvi_problem_free(p);
    }
}

#[test]
fn evaluates_operator() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { egvi_problem_matrix_game(3, 1.0, 1, &mut p) }, EgviStatus::Ok);
    let z = [0.2, 0.3, 0.5, 1.0, 0.0, 0.0];
    let mut f = [0.0; 6];
    assert_eq!(
        unsafe { egvi_problem_evaluate(p, z.as_ptr(), 6, f.as_mut_ptr(), 6) },
        EgviStatus::Ok
    );
    // F = (A y, -A^T x) is skew: <F(z), z> = 0.
    let ip: f64 = z.iter().zip(&f).map(|(a, b)| a * b).sum();
    assert!(ip.abs() < 1e-15);
    assert_eq!(
        unsafe { egvi_problem_evaluate(p, z.as_ptr(), 5, f.as_mut_ptr(), 6) },
        EgviStatus::DimensionMismatch
    );
    unsafe { egvi_problem_free(p) };
}

#[test]
fn loads_problems_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    std::fs::write(&path, "2 1\n2.0 0.5\n0.5 1.0\n").unwrap();
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { egvi_problem_load_mesp(cpath.as_ptr(), &mut p) },
        EgviStatus::Ok
    );
    assert_eq!(unsafe { egvi_problem_dim(p) }, 6);
    unsafe { egvi_problem_free(p) };

    std::fs::write(&path, "2\n1 x\n0 1\n").unwrap();
    let mut q = ptr::null_mut();
    assert_eq!(
        unsafe { egvi_problem_load_matrix_game(cpath.as_ptr(), &mut q) },
        EgviStatus::InvalidProblem
    );
    assert!(q.is_null());
    assert!(last_error().contains("line 2"), "{}", last_error());
}

#[test]
fn rejects_bad_arguments() {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { egvi_problem_matrix_game(4, 1.0, 0, ptr::null_mut()) },
        EgviStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { egvi_problem_matrix_game(4, 1.5, 0, &mut p) },
        EgviStatus::InvalidProblem
    );
    assert!(p.is_null());
    assert_eq!(unsafe { egvi_problem_matrix_game(4, 1.0, 0, &mut p) }, EgviStatus::Ok);

    let mut r = ptr::null_mut();
    let mut cfg = config(EgviAlgorithm::PfNeEgBt);
    cfg.theta = 1.0;
    assert_eq!(
        unsafe { egvi_solve(p, &cfg, ptr::null(), 0, &mut r) },
        EgviStatus::InvalidConfig
    );
    assert!(last_error().contains("theta"));
    cfg = config(EgviAlgorithm::PfNeEgBt);
    cfg.stop_metric = 7;
    assert_eq!(
        unsafe { egvi_solve(p, &cfg, ptr::null(), 0, &mut r) },
        EgviStatus::InvalidArgument
    );
    let outside = [2.0; 8];
    cfg = config(EgviAlgorithm::PfNeEgBt);
    assert_eq!(
        unsafe { egvi_solve(p, &cfg, outside.as_ptr(), 8, &mut r) },
        EgviStatus::InfeasibleInput
    );
    assert!(r.is_null());
    assert_eq!(
        unsafe { egvi_solve(ptr::null(), &cfg, ptr::null(), 0, &mut r) },
        EgviStatus::InvalidArgument
    );

    assert_eq!(unsafe { egvi_problem_dim(ptr::null()) }, 0);
    assert_eq!(unsafe { egvi_result_iterations(ptr::null()) }, 0);
    unsafe {
        egvi_problem_free(ptr::null_mut());
        egvi_result_free(ptr::null_mut());
        egvi_problem_free(p);
    }
}

#[test]
fn partial_result_survives_overflow() {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { egvi_problem_fairness(3, 20, 5, 0, false, &mut p) },
        EgviStatus::Ok
    );
    let mut cfg = config(EgviAlgorithm::EgFixed);
    cfg.eta0 = 1000.0;
    cfg.max_iter = 100;
    let mut r = ptr::null_mut();
    assert_eq!(
        unsafe { egvi_solve(p, &cfg, ptr::null(), 0, &mut r) },
        EgviStatus::Overflow
    );
    assert!(!r.is_null());
    assert!(unsafe { egvi_result_iterations(r) } < 100);
    assert!(last_error().contains("overflow"));
    unsafe {
        egvi_result_free(r);
        egvi_problem_free(p);
    }
}
