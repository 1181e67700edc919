//! Grid execution.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use thiserror::Error;

use super::config::{ConfigError, ExperimentConfig, Family, ProblemSpec, SolverSpec};
use super::trace_csv::write_trace;
use crate::config::{Algorithm, SolverConfig};
use crate::error::Error;
use crate::problem::VIProblem;
use crate::problems::{self, FairnessSign};
use crate::solver::solve_partial;

pub const SUMMARY_HEADER: [&str; 8] = [
    "problem",
    "solver",
    "iters_to_tol",
    "final_eg_residual",
    "total_operator_evals",
    "total_backtrack_failures",
    "elapsed_seconds",
    "status",
];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot build problem: {0}")]
    Problem(Error),
    #[error("output error: {0}")]
    Io(String),
}

fn io(e: impl std::fmt::Display) -> BenchError {
    BenchError::Io(e.to_string())
}

/// Outcome of one (problem, solver) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellReport {
    pub problem: String,
    pub solver: String,
    pub trace_path: PathBuf,
    pub iters_to_tol: Option<usize>,
    pub iterations: usize,
    pub final_eg_residual: Option<f64>,
    pub total_operator_evals: u64,
    pub total_backtrack_failures: u64,
    pub elapsed_seconds: f64,
    /// `TOL_REACHED`, `MAX_ITER`, `STATIONARY_POINT` or an error kind such
    /// as `OVERFLOW`.
    pub status: String,
    pub error: Option<String>,
}

impl CellReport {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub cells: Vec<CellReport>,
    pub summary_path: PathBuf,
}

impl ExperimentReport {
    pub fn any_failed(&self) -> bool {
        self.cells.iter().any(CellReport::failed)
    }
}

/// Instantiates the configured problem family.
pub fn build_problem(spec: &ProblemSpec) -> crate::Result<VIProblem> {
    let seed = spec.seed;
    match spec.family {
        Family::MatrixGame => match spec.file() {
            Some(path) => problems::load_matrix_game(path),
            None => problems::make_matrix_game(spec.usize("d"), spec.f64("kappa"), seed),
        },
        Family::Lasso => problems::make_lasso(
            spec.usize("m"),
            spec.usize("n"),
            spec.f64("sparsity_frac"),
            spec.f64("sigma"),
            spec.f64("lambda"),
            seed,
        ),
        Family::Fairness => {
            let inst = problems::generate_fairness(spec.usize("m"), spec.usize("n"), spec.usize("d"), seed)?;
            let sign = if spec.bool("fairness_sign_paper") {
                FairnessSign::Flipped
            } else {
                FairnessSign::Standard
            };
            problems::fairness_operator(&inst, sign)
        }
        Family::Mesp => match spec.file() {
            Some(path) => problems::load_mesp(path),
            None => problems::make_mesp(spec.usize("d"), spec.usize("s"), seed),
        },
    }
}

/// Default initial stepsize of a family when the configuration omits it.
fn default_eta0(family: Family, algorithm: Algorithm, problem: &VIProblem) -> f64 {
    let fixed = algorithm == Algorithm::EgFixed;
    match family {
        Family::MatrixGame if fixed => problem.lipschitz.filter(|l| *l > 0.0).map_or(0.5, |l| 0.9 / l),
        Family::MatrixGame => 0.5,
        Family::Lasso | Family::Mesp if fixed => 0.05,
        Family::Lasso | Family::Mesp => 0.1,
        Family::Fairness => 0.01,
    }
}

fn resolve(spec: &SolverSpec, config: &ExperimentConfig, problem: &VIProblem) -> SolverConfig {
    let family = config.problem.family;
    let mut c = spec.config.clone();
    if !spec.eta0_given {
        c.eta0 = default_eta0(family, c.algorithm, problem);
    }
    c.stop_metric = family.stop_metric();
    c.record = config.metrics;
    c
}

fn run_cell(config: &ExperimentConfig, problem: &VIProblem, spec: &SolverSpec) -> Result<CellReport, BenchError> {
    let cfg = resolve(spec, config, problem);
    let trace_path = config.out_dir.join(format!("{}_{}.csv", problem.name, spec.label));
    let clock = Instant::now();
    log::info!("{} / {}: start (eta0 = {})", problem.name, spec.label, cfg.eta0);
    let (result, error) = match solve_partial(problem, &cfg, &problem.initial_point) {
        Ok(p) => (Some(p.result), p.error),
        Err(e) => (None, Some(e)),
    };
    let elapsed = clock.elapsed().as_secs_f64();
    let trace = result.as_ref().map_or(&[][..], |r| &r.trace[..]);
    let file = File::create(&trace_path).map_err(|e| io(format!("{}: {e}", trace_path.display())))?;
    write_trace(BufWriter::new(file), trace, true).map_err(io)?;
    let status = match (&error, &result) {
        (Some(e), _) => e.kind().to_string(),
        (None, Some(r)) => serde_json::to_value(r.stop_reason)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default(),
        (None, None) => unreachable!("a run without a result carries an error"),
    };
    if let Some(e) = &error {
        log::warn!("{} / {}: {e}", problem.name, spec.label);
    } else {
        log::info!(
            "{} / {}: {status} after {} iterations",
            problem.name,
            spec.label,
            trace.len()
        );
    }
    Ok(CellReport {
        problem: problem.name.clone(),
        solver: spec.label.clone(),
        trace_path,
        iters_to_tol: result
            .as_ref()
            .and_then(|r| r.iters_to_tol(cfg.stop_metric, cfg.residual_tol)),
        iterations: trace.len(),
        final_eg_residual: trace.last().map(|r| r.eg_residual),
        total_operator_evals: result.as_ref().map_or(0, |r| r.operator_evals),
        total_backtrack_failures: result.as_ref().map_or(0, |r| r.total_backtrack_failures()),
        elapsed_seconds: elapsed,
        status,
        error: error.map(|e| e.to_string()),
    })
}

/// Runs every solver on the configured problem, writes one trace per cell
/// and a `summary.csv`. Cells that fail numerically are recorded in the
/// summary; the rest of the grid still runs.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, BenchError> {
    let problem = build_problem(&config.problem).map_err(BenchError::Problem)?;
    fs::create_dir_all(&config.out_dir).map_err(|e| io(format!("{}: {e}", config.out_dir.display())))?;
    let n = config.solvers.len();
    let workers = config
        .workers
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |p| p.get()))
        .clamp(1, n.max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<CellReport, BenchError>>>> = Mutex::new((0..n).map(|_| None).collect());
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = run_cell(config, &problem, &config.solvers[i]);
                slots.lock().expect("worker panicked")[i] = Some(out);
            });
        }
    });
    let cells = slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|c| c.expect("every cell runs"))
        .collect::<Result<Vec<_>, _>>()?;
    let summary_path = config.out_dir.join("summary.csv");
    write_summary(&summary_path, &cells)?;
    Ok(ExperimentReport { cells, summary_path })
}

fn write_summary(path: &PathBuf, cells: &[CellReport]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(SUMMARY_HEADER).map_err(io)?;
    for c in cells {
        w.write_record([
            c.problem.clone(),
            c.solver.clone(),
            c.iters_to_tol.map(|t| t.to_string()).unwrap_or_default(),
            c.final_eg_residual.map(|v| format!("{v:.16e}")).unwrap_or_default(),
            c.total_operator_evals.to_string(),
            c.total_backtrack_failures.to_string(),
            format!("{:.6}", c.elapsed_seconds),
            c.status.clone(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

/// One line per family: name and parameters with defaults.
pub fn list_problems() -> String {
    let mut out = String::new();
    for f in Family::ALL {
        let params: Vec<String> = f
            .params()
            .iter()
            .map(|(k, v)| {
                if v.is_null() {
                    format!("{k}=<path>")
                } else {
                    format!("{k}={v}")
                }
            })
            .collect();
        out.push_str(&format!("{}({})\n", f.name(), params.join(", ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{parse_config_str, read_trace};

    fn config(dir: &std::path::Path, body: &str) -> ExperimentConfig {
        let text = body.replace("OUT", &dir.display().to_string());
        parse_config_str(&text).unwrap()
    }

    #[test]
    fn lists_four_families() {
        let text = list_problems();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("matrix_game(d=100, kappa=1.0, file=<path>)"));
    }

    #[test]
    fn small_grid_writes_traces_and_summary() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(
            dir.path(),
            r#"{"problem": {"family": "matrix_game", "params": {"d": 5}, "seed": 1},
                "solvers": [{"algorithm": "EG_FIXED", "max_iter": 50}, {"algorithm": "PF_NE_EG_BT", "max_iter": 50}],
                "metrics": ["eg", "gap"], "out_dir": "OUT", "workers": 2}"#,
        );
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.cells.len(), 2);
        for c in &report.cells {
            let trace = read_trace(File::open(&c.trace_path).unwrap()).unwrap();
            assert_eq!(trace.len(), c.iterations);
            assert!(trace.iter().all(|r| r.gap.is_some() && r.nat_residual.is_none()));
        }
        let summary = fs::read_to_string(&report.summary_path).unwrap();
        assert!(summary.starts_with(&SUMMARY_HEADER.join(",")));
        assert_eq!(summary.lines().count(), 3);
    }

    #[test]
    fn overflow_is_recorded_and_grid_completes() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(
            dir.path(),
            r#"{"problem": {"family": "fairness", "params": {"m": 3, "n": 20, "d": 5}},
                "solvers": [{"algorithm": "EG_FIXED", "eta0": 1000.0, "max_iter": 100},
                            {"algorithm": "PF_NE_EG_ADABT", "max_iter": 20}],
                "out_dir": "OUT"}"#,
        );
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.cells[0].status, "OVERFLOW");
        assert!(report.cells[1].error.is_none());
        assert!(report.any_failed());
    }

    #[test]
    fn default_eta0_for_fixed_matrix_game_uses_lipschitz() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(
            dir.path(),
            r#"{"problem": {"family": "matrix_game", "params": {"d": 4}}, "solvers": [{"algorithm": "EG_FIXED"}], "out_dir": "OUT"}"#,
        );
        let p = build_problem(&cfg.problem).unwrap();
        let c = resolve(&cfg.solvers[0], &cfg, &p);
        assert!((c.eta0 - 0.9 / p.lipschitz.unwrap()).abs() < 1e-15);
    }
}
