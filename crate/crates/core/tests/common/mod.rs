//! Shared helpers for the integration tests: reference solutions and the
//! per-trace invariant checks.
#![allow(dead_code)]

use egvi::metrics::natural_residual;
use egvi::point::dist;
use egvi::problems::{LassoInstance, MatrixGameInstance};
use egvi::solver::solve;
use egvi::{Algorithm, MetricSet, Point, SolveResult, SolverConfig, StopMetric, VIProblem};
use nalgebra::{DMatrix, DVector};

pub fn run(
    problem: &VIProblem,
    algorithm: Algorithm,
    eta0: f64,
    max_iter: usize,
    tol: f64,
    stop: StopMetric,
) -> SolveResult {
    let cfg = SolverConfig {
        algorithm,
        eta0,
        max_iter,
        residual_tol: tol,
        stop_metric: stop,
        record: MetricSet {
            nat: stop == StopMetric::NaturalResidual,
            tan: problem.set.is_box_structured(),
            gap: problem.gap_oracle.is_some(),
            dist: problem.known_solution.is_some(),
            nat_eta: 0.01,
        },
        ..SolverConfig::default()
    };
    solve(problem, &cfg).expect("solver run")
}

/// Runs until the round-off floor and returns the last iterate.
pub fn long_run_solution(problem: &VIProblem, eta0: f64) -> Point {
    let r = run(
        problem,
        Algorithm::PfNeEgAdabt,
        eta0,
        200_000,
        0.0,
        StopMetric::EgResidual,
    );
    r.final_point
}

fn equalizer(m: &DMatrix<f64>) -> Option<(DVector<f64>, f64)> {
    // Solve m v = c 1, 1^T v = 1 for (v, c).
    let k = m.nrows();
    let mut sys = DMatrix::zeros(k + 1, k + 1);
    sys.view_mut((0, 0), (k, k)).copy_from(m);
    for i in 0..k {
        sys[(i, k)] = -1.0;
        sys[(k, i)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = sys.lu().solve(&rhs)?;
    Some((sol.rows(0, k).into_owned(), sol[k]))
}

/// Exact equilibrium of `min_x max_y x^T A y` by support identification from
/// a converged run followed by an equalizer solve.
pub fn matrix_game_equilibrium(instance: &MatrixGameInstance) -> Point {
    let a = &instance.a;
    let (m, n) = a.shape();
    let problem = egvi::problems::matrix_game_problem(instance).unwrap();
    let approx = run(&problem, Algorithm::PfNeEg, 0.5, 1_000_000, 1e-9, StopMetric::Gap).final_point;
    for tau in [1e-6, 1e-7, 1e-5, 1e-8, 1e-4] {
        let sx: Vec<usize> = (0..m).filter(|&i| approx[i] > tau).collect();
        let sy: Vec<usize> = (0..n).filter(|&j| approx[m + j] > tau).collect();
        if sx.len() != sy.len() {
            continue;
        }
        let sub = DMatrix::from_fn(sx.len(), sy.len(), |i, j| a[(sx[i], sy[j])]);
        let (Some((ys, _)), Some((xs, _))) = (equalizer(&sub), equalizer(&sub.transpose())) else {
            continue;
        };
        let mut z = Point::zeros(m + n);
        for (k, &i) in sx.iter().enumerate() {
            z[i] = xs[k];
        }
        for (k, &j) in sy.iter().enumerate() {
            z[m + j] = ys[k];
        }
        if z.iter().any(|v| *v < 0.0) {
            continue;
        }
        let gap = problem.gap_oracle.as_ref().unwrap().gap(&z).unwrap();
        if gap.abs() <= 1e-13 {
            return z;
        }
    }
    panic!("support identification failed");
}

/// LASSO solution from the sign pattern of a converged run:
/// `x_S = (A_S^T A_S)^{-1} (A_S^T b - lambda s_S)`, `y = -A^T (A x - b)`.
pub fn lasso_solution(instance: &LassoInstance) -> Point {
    let problem = egvi::problems::lasso_problem(instance).unwrap();
    let n = instance.a.ncols();
    let approx = run(
        &problem,
        Algorithm::PfNeEg,
        0.1,
        200_000,
        1e-12,
        StopMetric::NaturalResidual,
    )
    .final_point;
    let support: Vec<usize> = (0..n).filter(|&i| approx[i].abs() > 1e-8).collect();
    let a_s = instance.a.select_columns(&support);
    let signs = DVector::from_iterator(support.len(), support.iter().map(|&i| approx[i].signum()));
    let rhs = a_s.tr_mul(&instance.b) - signs.clone() * instance.lambda;
    let xs = (a_s.tr_mul(&a_s)).cholesky().expect("full column rank").solve(&rhs);
    let mut x = DVector::zeros(n);
    for (k, &i) in support.iter().enumerate() {
        assert_eq!(xs[k].signum(), signs[k], "sign pattern changed");
        x[i] = xs[k];
    }
    let y = -(instance.a.tr_mul(&(&instance.a * &x - &instance.b)));
    let lam = instance.lambda;
    assert!(y.iter().all(|v| v.abs() <= lam * (1.0 + 1e-9)));
    let y = y.map(|v| v.clamp(-lam, lam));
    let z = Point::concat(&[x.as_slice(), y.as_slice()]);
    assert!(natural_residual(&problem, &z, 0.01).unwrap() < 1e-9);
    z
}

/// Largest violation of each invariant along a trace.
#[derive(Debug, Default, Clone, Copy)]
pub struct LemmaCheck {
    /// max_t dist(z_{t+1}) - dist(z_t)
    pub fejer: f64,
    /// max_t eg(t+1) - eg(t)
    pub eg_increase: f64,
    /// max_t tan(t) - eg(t)
    pub tan_excess: f64,
    pub energy: f64,
    pub energy_bound: f64,
}

pub fn lemma_check(problem: &VIProblem, result: &SolveResult, theta: f64) -> LemmaCheck {
    let mut c = LemmaCheck {
        fejer: f64::NEG_INFINITY,
        eg_increase: f64::NEG_INFINITY,
        tan_excess: f64::NEG_INFINITY,
        ..Default::default()
    };
    if let Some(star) = &problem.known_solution {
        let d0 = dist(&problem.initial_point, star);
        let mut prev = d0;
        for r in &result.trace {
            let d = r.dist_to_solution.expect("distance recorded");
            c.fejer = c.fejer.max(d - prev);
            prev = d;
        }
        c.energy_bound = (6.0 + (theta + 1.0).powi(2)) / (1.0 - theta) * d0 * d0;
    }
    for w in result.trace.windows(2) {
        c.eg_increase = c.eg_increase.max(w[1].eg_residual - w[0].eg_residual);
    }
    for r in &result.trace {
        if let Some(t) = r.tan_residual {
            c.tan_excess = c.tan_excess.max(t - r.eg_residual);
        }
        c.energy += r.eta * r.eta * r.eg_residual * r.eg_residual;
    }
    c
}
