//! Acceptance suite. Every criterion runs at its stated tolerance and prints
//! one `PASS`/`FAIL` line; the process exits non-zero if any fails.

mod common;

use std::fs;
use std::thread;
use std::time::Instant;

use common::{lasso_solution, lemma_check, long_run_solution, matrix_game_equilibrium, run};
use egvi::bench::{parse_config_str, run_experiment};
use egvi::problems::{self, FairnessSign};
use egvi::projection::{brute_force_projection_oracle, project};
use egvi::solver::solve;
use egvi::{Algorithm, FeasibleSet, MetricSet, SolverConfig, StopMetric, VIProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ADAPTIVE: [Algorithm; 3] = [Algorithm::PfNeEg, Algorithm::PfNeEgBt, Algorithm::PfNeEgAdabt];
const LINE_SEARCH: [Algorithm; 2] = [Algorithm::PfNeEgBt, Algorithm::PfNeEgAdabt];
const SEED: u64 = 0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn matrix_game(eta0: f64) -> Outcome {
    let game = problems::make_matrix_game(100, 1.0, SEED).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for alg in ADAPTIVE {
        let r = run(&game, alg, eta0, 200_000, 1e-5, StopMetric::Gap);
        let reached = r.iters_to_tol(StopMetric::Gap, 1e-5);
        let max_eta = r.trace.iter().map(|x| x.eta).fold(0.0, f64::max);
        ok &= reached.is_some();
        if eta0 < 0.5 {
            ok &= max_eta > eta0;
            parts.push(format!("{alg}: {reached:?} iters, max eta {max_eta:.3}"));
        } else {
            parts.push(format!("{alg}: {reached:?} iters"));
        }
    }
    ensure(ok, parts.join("; "))
}

fn lasso_ordering() -> Outcome {
    let lasso = problems::make_lasso(250, 1000, 0.5, 0.01, 1.0, SEED).unwrap();
    let pf = run(
        &lasso,
        Algorithm::PfNeEg,
        0.1,
        50_000,
        1e-6,
        StopMetric::NaturalResidual,
    )
    .iters_to_tol(StopMetric::NaturalResidual, 1e-6);
    let eg = run(
        &lasso,
        Algorithm::EgFixed,
        0.05,
        200_000,
        1e-6,
        StopMetric::NaturalResidual,
    )
    .iters_to_tol(StopMetric::NaturalResidual, 1e-6);
    let ok = matches!(pf, Some(p) if eg.is_none_or(|e| e > p));
    ensure(ok, format!("PF_NE_EG {pf:?} iters, EG_FIXED(0.05) {eg:?} iters"))
}

struct Case {
    problem: VIProblem,
    eta0: f64,
    stop: StopMetric,
    tol: f64,
}

fn lemma_cases() -> Vec<Case> {
    let game = problems::generate_matrix_game(100, 1.0, SEED).unwrap();
    let lasso = problems::generate_lasso(250, 1000, 0.5, 0.01, 1.0, SEED).unwrap();
    let fair = problems::fairness_operator(
        &problems::generate_fairness(10, 200, 100, SEED).unwrap(),
        FairnessSign::Standard,
    )
    .unwrap();
    let mesp = problems::make_mesp(20, 10, SEED).unwrap();
    let fair_star = long_run_solution(&fair, 0.01);
    let mesp_star = long_run_solution(&mesp, 0.1);
    vec![
        Case {
            problem: problems::matrix_game_problem(&game)
                .unwrap()
                .with_known_solution(matrix_game_equilibrium(&game))
                .unwrap(),
            eta0: 0.5,
            stop: StopMetric::Gap,
            tol: 1e-5,
        },
        Case {
            problem: problems::lasso_problem(&lasso)
                .unwrap()
                .with_known_solution(lasso_solution(&lasso))
                .unwrap(),
            eta0: 0.1,
            stop: StopMetric::NaturalResidual,
            tol: 1e-6,
        },
        Case {
            problem: fair.with_known_solution(fair_star).unwrap(),
            eta0: 0.01,
            stop: StopMetric::NaturalResidual,
            tol: 1e-6,
        },
        Case {
            problem: mesp.with_known_solution(mesp_star).unwrap(),
            eta0: 0.1,
            stop: StopMetric::NaturalResidual,
            tol: 1e-6,
        },
    ]
}

fn lemma_suite() -> Outcome {
    let theta = SolverConfig::default().theta;
    let mut ok = true;
    let mut parts = Vec::new();
    for case in lemma_cases() {
        let p = &case.problem;
        for alg in Algorithm::ALL {
            let eta0 = if alg == Algorithm::EgFixed {
                0.5 * case.eta0
            } else {
                case.eta0
            };
            let r = run(p, alg, eta0, 200_000, case.tol, case.stop);
            let c = lemma_check(p, &r, theta);
            if LINE_SEARCH.contains(&alg) {
                let pass = c.fejer <= 1e-10 && c.eg_increase <= 1e-10 && c.energy <= c.energy_bound + 1e-6;
                ok &= pass;
                parts.push(format!(
                    "{}/{alg}: fejer {:+.1e} eg-rise {:+.1e} energy {:.2e}<={:.2e}",
                    p.name, c.fejer, c.eg_increase, c.energy, c.energy_bound
                ));
            }
            if p.set.is_box_structured() {
                ok &= c.tan_excess <= 1e-9;
                parts.push(format!("{}/{alg}: tan-eg {:+.1e}", p.name, c.tan_excess));
            }
        }
    }
    ensure(ok, parts.join("; "))
}

fn fairness_backtracking() -> Outcome {
    let inst = problems::generate_fairness(10, 200, 100, SEED).unwrap();
    let p = problems::fairness_operator(&inst, FairnessSign::Standard).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for alg in LINE_SEARCH {
        let r = run(&p, alg, 0.01, 10_000, 0.0, StopMetric::NaturalResidual);
        // The final half of the budget, or of the run if it certified
        // stationarity earlier.
        let n = r.trace.len();
        let window = &r.trace[n - (n / 2).min(5_000)..];
        let total: u32 = window.iter().map(|x| x.backtrack_failures).sum();
        let max = window.iter().map(|x| x.backtrack_failures).max().unwrap_or(0);
        let pass = match alg {
            Algorithm::PfNeEgAdabt => total == 0,
            _ => max <= 1,
        };
        ok &= pass;
        parts.push(format!(
            "{alg}: {n} iters ({:?}), window {} iters, failures {total} (max {max}/iter)",
            r.stop_reason,
            window.len()
        ));
    }
    ensure(ok, parts.join("; "))
}

fn random_set(rng: &mut ChaCha8Rng, kind: usize, d: usize) -> FeasibleSet {
    match kind {
        0 => FeasibleSet::full_space(d),
        1 => {
            let lo: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..1.0)).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + rng.random_range(0.0..2.0)).collect();
            FeasibleSet::boxed(lo, hi).unwrap()
        }
        2 => FeasibleSet::simplex(d).unwrap(),
        3 => FeasibleSet::capped_simplex(d, rng.random_range(1..=d)).unwrap(),
        _ => {
            let split = rng.random_range(1..d);
            let (k1, k2) = (rng.random_range(0..4), rng.random_range(0..4));
            let first = random_set(rng, k1, split);
            let second = random_set(rng, k2, d - split);
            FeasibleSet::product(vec![first, second]).unwrap()
        }
    }
}

fn projection_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let names = ["full_space", "box", "simplex", "capped_simplex", "product"];
    let mut ok = true;
    let mut parts = Vec::new();
    for (kind, name) in names.iter().enumerate() {
        let mut worst = 0.0f64;
        for _ in 0..500 {
            let d = if kind == 4 {
                rng.random_range(2..=6)
            } else {
                rng.random_range(1..=6)
            };
            let set = random_set(&mut rng, kind, d);
            let z: Vec<f64> = (0..set.dim()).map(|_| rng.random_range(-3.0..3.0)).collect();
            let fast = project(&set, &z).unwrap();
            let slow = brute_force_projection_oracle(&set, &z).unwrap();
            worst = worst.max(egvi::point::dist(&fast, &slow));
        }
        ok &= worst <= 1e-8;
        parts.push(format!("{name} max diff {worst:.1e}"));
    }
    ensure(ok, parts.join("; "))
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    egvi::point::dist(a, b) / egvi::point::norm(b).max(f64::MIN_POSITIVE)
}

fn gradients() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (m, d) = (3, 7);
    let inst = problems::generate_fairness(m, 15, d, SEED).unwrap();
    let fp = problems::fairness_operator(&inst, FairnessSign::Standard).unwrap();
    let mut fair_worst = 0.0f64;
    for _ in 0..20 {
        let theta: Vec<f64> = (0..d).map(|_| rng.random_range(-0.5..0.5)).collect();
        let mut q: Vec<f64> = (0..m).map(|_| rng.random_range(0.01..1.0)).collect();
        let s: f64 = q.iter().sum();
        q.iter_mut().for_each(|v| *v /= s);
        let z = egvi::Point::concat(&[&theta, &q]);
        let f = fp.evaluate(&z).unwrap();
        let phi = |v: &[f64]| -> egvi::Result<f64> {
            let l = problems::fairness_losses(&inst, &v[..d])?;
            Ok(l.iter().zip(&v[d..]).map(|(a, b)| a * b).sum())
        };
        let g = problems::finite_difference_gradient(phi, &z, 1e-6).unwrap();
        let expected: Vec<f64> = g[..d].iter().copied().chain(g[d..].iter().map(|v| -v)).collect();
        fair_worst = fair_worst.max(rel_err(&f, &expected));
    }
    let mut mesp_worst = 0.0f64;
    for k in 0..20 {
        let dm = 3 + k % 8;
        let s = 1 + k % (dm - 1);
        let inst = problems::generate_mesp(dm, s, k as u64).unwrap();
        let op = problems::mesp_operator(&inst).unwrap();
        let x = project(
            &FeasibleSet::capped_simplex(dm, s).unwrap(),
            &(0..dm).map(|_| rng.random_range(0.0..1.0)).collect::<Vec<_>>(),
        )
        .unwrap();
        let scal: Vec<f64> = (0..2 * dm).map(|_| rng.random_range(-1.0..1.0)).collect();
        let z = egvi::Point::concat(&[&x, &scal]);
        let f = op.evaluate(&z).unwrap();
        let phi = |v: &[f64]| problems::mesp_objective(&inst, &v[..dm], &v[dm..2 * dm], &v[2 * dm..]);
        let g = problems::finite_difference_gradient(phi, &z, 1e-6).unwrap();
        let expected: Vec<f64> = g
            .iter()
            .enumerate()
            .map(|(i, v)| if i < dm { *v } else { -v })
            .collect();
        mesp_worst = mesp_worst.max(rel_err(&f, &expected));
    }
    let mut diag_worst = 0.0f64;
    for k in 0..20 {
        let dm = 2 + k % 9;
        let c: Vec<f64> = (0..dm).map(|_| rng.random_range(0.2..3.0)).collect();
        let inst = problems::MespInstance::new(
            nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(c.clone())),
            1,
            0,
        )
        .unwrap();
        let x: Vec<f64> = (0..dm).map(|_| rng.random_range(0.0..=1.0)).collect();
        let rho: Vec<f64> = (0..dm).map(|_| rng.random_range(-2.0..2.0)).collect();
        let omega: Vec<f64> = (0..dm).map(|_| rng.random_range(-2.0..2.0)).collect();
        let g = problems::mesp_gradient(&inst, &x, &rho, &omega).unwrap();
        for i in 0..dm {
            let r = c[i] * c[i] * (rho[i] - omega[i]).exp();
            let closed = -0.5 * (r - 1.0) / (r * x[i] + (1.0 - x[i])) + 0.5 * (rho[i] - omega[i]);
            diag_worst = diag_worst.max((g.x[i] - closed).abs());
        }
    }
    ensure(
        fair_worst <= 1e-5 && mesp_worst <= 1e-5 && diag_worst <= 1e-10,
        format!("fairness rel {fair_worst:.1e}, mesp rel {mesp_worst:.1e}, diagonal closed form {diag_worst:.1e}"),
    )
}

fn rate_proxy() -> Outcome {
    const T: usize = 2_500;
    let game = problems::make_matrix_game(100, 1.0, SEED).unwrap();
    let lasso = problems::make_lasso(250, 1000, 0.5, 0.01, 1.0, SEED).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, eta0) in [(&game, 0.5), (&lasso, 0.1)] {
        for alg in ADAPTIVE {
            let cfg = SolverConfig {
                algorithm: alg,
                eta0,
                max_iter: 4 * T,
                residual_tol: 0.0,
                stationarity_tol: 0.0,
                record: MetricSet::default(),
                ..SolverConfig::default()
            };
            let r = solve(p, &cfg).unwrap();
            let at = |t: usize| r.trace[(t - 1).min(r.trace.len() - 1)].eg_residual;
            let lhs = at(4 * T) * ((4 * T) as f64).sqrt();
            let rhs = 1.2 * at(T) * (T as f64).sqrt();
            ok &= lhs <= rhs;
            parts.push(format!("{}/{alg}: {lhs:.2e} <= {rhs:.2e}", p.name));
        }
    }
    ensure(ok, parts.join("; "))
}

fn strip_elapsed(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

fn determinism() -> Outcome {
    let mut files = Vec::new();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let text = format!(
            r#"{{"problem": {{"family": "matrix_game", "params": {{"d": 100, "kappa": 1.0}}, "seed": 0}},
                "solvers": [{{"algorithm": "EG_FIXED", "max_iter": 3000}}, {{"algorithm": "PF_NE_EG", "max_iter": 3000}},
                            {{"algorithm": "PF_NE_EG_BT", "max_iter": 3000}}, {{"algorithm": "PF_NE_EG_ADABT", "max_iter": 3000}}],
                "metrics": ["eg", "nat", "gap"], "out_dir": "{}"}}"#,
            dir.path().display()
        );
        let report = run_experiment(&parse_config_str(&text).unwrap()).unwrap();
        files.push(
            report
                .cells
                .iter()
                .map(|c| strip_elapsed(&fs::read_to_string(&c.trace_path).unwrap()))
                .collect::<Vec<_>>(),
        );
    }
    let same = files[0] == files[1];
    ensure(
        same && files[0].len() == 4,
        format!("{} trace files compared", files[0].len()),
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("matrix game eta0=0.5 reaches gap 1e-5", || matrix_game(0.5)),
        ("matrix game eta0=0.02 reaches gap 1e-5 with eta_t > eta0", || {
            matrix_game(0.02)
        }),
        ("lasso PF_NE_EG reaches R_0.01 1e-6, EG_FIXED slower", lasso_ordering),
        ("lemma suite (Fejer, eg monotone, eg >= tan, energy bound)", lemma_suite),
        ("fairness backtracking finiteness", fairness_backtracking),
        ("projection oracle equivalence", projection_oracle),
        ("gradient correctness", gradients),
        ("rate proxy T=2500", rate_proxy),
        ("deterministic traces", determinism),
    ];
    let start = Instant::now();
    let results: Vec<(Outcome, f64)> = thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    (f(), t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| (Err("panicked".into()), 0.0)))
            .collect()
    });
    let mut failed = 0;
    for ((name, _), (outcome, secs)) in criteria.iter().zip(&results) {
        match outcome {
            Ok(detail) => println!("PASS  {name} [{secs:.1}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name} [{secs:.1}s]: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
