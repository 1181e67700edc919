//! Extragradient solvers.
//!
//! All four methods share the update `w = Proj(z - eta F(z))`,
//! `z+ = Proj(z - eta F(w))` and differ only in how `eta` is chosen:
//!
//! * [`solve_eg_fixed`]: constant `eta0`.
//! * [`solve_pf_ne_eg`]: `eta_t = min{lambda eta_{t-1}, theta/L_{t-1}, theta/hatL_{t-1}}`.
//! * [`solve_pf_ne_eg_adabt`]: the same initial guess, then backtracking until
//!   `eta L_t <= (theta+1)/2` and `eta hatL_t <= 1`.
//! * [`solve_pf_ne_eg_bt`]: backtracking from the previous stepsize until
//!   `eta L_t <= theta` and `eta hatL_t <= 1`.
//!
//! `F(z_t)` is evaluated once per iteration and `F(z_{t+1})` is carried over
//! as the next iteration's `F(z_t)`, so a non-backtracking iteration costs
//! two operator evaluations.

mod backtracking;
mod ergodic;
mod step;
mod stepsize;

use std::time::Instant;

pub use backtracking::{solve_pf_ne_eg_adabt, solve_pf_ne_eg_bt, BACKTRACK_LIMIT};
pub use ergodic::{ergodic_average, ErgodicAccumulator};
pub use step::{coincide, eg_step, eg_step_with_tol, lipschitz_estimates, Step, StepOutcome, DEFAULT_STATIONARITY_TOL};
pub use stepsize::adaptive_stepsize;

use crate::config::{Algorithm, SolverConfig, StopMetric};
use crate::error::{Error, Result};
use crate::metrics::{eg_residual_from, natural_residual_with, tangent_residual_with, xi_vector};
use crate::point::{dist, Point};
use crate::problem::{CountingOracle, VIProblem};
use crate::trace::{IterationRecord, SolveResult, StopReason};

/// Runs the configured algorithm from the problem's initial point.
pub fn solve(problem: &VIProblem, config: &SolverConfig) -> Result<SolveResult> {
    solve_from(problem, config, &problem.initial_point)
}

/// Runs the configured algorithm from `z0`.
pub fn solve_from(problem: &VIProblem, config: &SolverConfig, z0: &[f64]) -> Result<SolveResult> {
    let outcome = solve_partial(problem, config, z0)?;
    match outcome.error {
        Some(e) => Err(e),
        None => Ok(outcome.result),
    }
}

/// A run that may have stopped on an error after some iterations.
#[derive(Debug)]
pub struct PartialSolve {
    /// Iterations completed before the run ended. On error the stop reason
    /// is [`StopReason::MaxIter`] and the trace is truncated.
    pub result: SolveResult,
    pub error: Option<Error>,
}

/// Like [`solve_from`] but keeps the trace of a run that fails midway.
/// Returns `Err` only when the run cannot start.
pub fn solve_partial(problem: &VIProblem, config: &SolverConfig, z0: &[f64]) -> Result<PartialSolve> {
    let mut run = Run::start(problem, config, z0)?;
    let body = match config.algorithm {
        Algorithm::EgFixed => fixed(&mut run),
        Algorithm::PfNeEg => adaptive(&mut run),
        Algorithm::PfNeEgAdabt => backtracking::adabt(&mut run),
        Algorithm::PfNeEgBt => backtracking::bt(&mut run),
    };
    Ok(match body {
        Ok(reason) => PartialSolve {
            result: run.finish(reason),
            error: None,
        },
        Err(e) => PartialSolve {
            result: run.finish(StopReason::MaxIter),
            error: Some(e),
        },
    })
}

fn expect_algorithm(config: &SolverConfig, expected: Algorithm) -> Result<()> {
    if config.algorithm == expected {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "configured algorithm {} does not match {}",
            config.algorithm, expected
        )))
    }
}

/// Classical extragradient with constant stepsize `eta0`.
pub fn solve_eg_fixed(problem: &VIProblem, config: &SolverConfig) -> Result<SolveResult> {
    expect_algorithm(config, Algorithm::EgFixed)?;
    solve(problem, config)
}

/// Adaptive stepsizes from the previous iteration's local Lipschitz
/// estimates; no line search. The first iteration uses `eta0`.
pub fn solve_pf_ne_eg(problem: &VIProblem, config: &SolverConfig) -> Result<SolveResult> {
    expect_algorithm(config, Algorithm::PfNeEg)?;
    solve(problem, config)
}

fn fixed(run: &mut Run<'_>) -> Result<StopReason> {
    let config = run.config;
    let tol = config.stationarity_tol;
    for t in 1..=config.max_iter {
        let Some(la) = step::look_ahead(&mut run.oracle, &run.z, &run.f_z, config.eta0, tol)? else {
            return Ok(StopReason::StationaryPoint);
        };
        let c = step::correct(&mut run.oracle, &run.z, &la, config.eta0, tol)?;
        if run.advance(t, la, c, config.eta0, 0)? {
            return Ok(StopReason::TolReached);
        }
    }
    Ok(StopReason::MaxIter)
}

fn adaptive(run: &mut Run<'_>) -> Result<StopReason> {
    let config = run.config;
    let tol = config.stationarity_tol;
    let mut eta = config.eta0;
    for t in 1..=config.max_iter {
        if let Some(prev) = run.trace.last() {
            let lambda = config.lambda_schedule.value(t - 1);
            eta = adaptive_stepsize(prev.eta, lambda, prev.l_t, prev.hat_l_t, config.theta);
        }
        let Some(la) = step::look_ahead(&mut run.oracle, &run.z, &run.f_z, eta, tol)? else {
            return Ok(StopReason::StationaryPoint);
        };
        let c = step::correct(&mut run.oracle, &run.z, &la, eta, tol)?;
        if run.advance(t, la, c, eta, 0)? {
            return Ok(StopReason::TolReached);
        }
    }
    Ok(StopReason::MaxIter)
}

/// Mutable state of one solver run.
pub(crate) struct Run<'a> {
    problem: &'a VIProblem,
    pub(crate) config: &'a SolverConfig,
    pub(crate) oracle: CountingOracle<'a>,
    pub(crate) z: Point,
    pub(crate) f_z: Point,
    pub(crate) trace: Vec<IterationRecord>,
    ergodic: Option<ErgodicAccumulator>,
    clock: Instant,
    pub(crate) stationary: bool,
}

impl<'a> Run<'a> {
    pub(crate) fn start(problem: &'a VIProblem, config: &'a SolverConfig, z0: &[f64]) -> Result<Self> {
        config.validate()?;
        if config.stop_metric == StopMetric::Gap && problem.gap_oracle.is_none() {
            return Err(Error::InvalidConfig(format!(
                "problem '{}' has no gap oracle to stop on",
                problem.name
            )));
        }
        let z = Point::from(z0);
        z.ensure_finite()?;
        if !problem.set.contains(&z, 1e-9)? {
            return Err(Error::InfeasibleInput("initial point is not feasible".into()));
        }
        let clock = Instant::now();
        let mut oracle = CountingOracle::new(problem);
        let f_z = oracle.evaluate(&z)?;
        Ok(Run {
            problem,
            config,
            oracle,
            z,
            f_z,
            trace: Vec::new(),
            ergodic: config.ergodic.map(ErgodicAccumulator::new),
            clock,
            stationary: false,
        })
    }

    /// Records iteration `t`, moves to `z_{t+1}` and reports whether the stop
    /// metric reached the tolerance.
    pub(crate) fn advance(
        &mut self,
        t: usize,
        la: step::LookAhead,
        c: step::Correction,
        eta: f64,
        failures: u32,
    ) -> Result<bool> {
        let cfg = self.config;
        let set = &self.problem.set;
        let xi = xi_vector(&c.z_next, &self.z, &la.f_w, eta)?;
        let eg_residual = eg_residual_from(&c.f_znext, &xi);
        let want_nat = cfg.record.nat || cfg.stop_metric == StopMetric::NaturalResidual;
        let nat_residual = if want_nat {
            Some(natural_residual_with(set, &c.z_next, &c.f_znext, cfg.record.nat_eta)?)
        } else {
            None
        };
        let tan_residual = if cfg.record.tan {
            tangent_residual_with(set, &c.z_next, &c.f_znext)
        } else {
            None
        };
        let gap = match &self.problem.gap_oracle {
            Some(g) if cfg.record.gap || cfg.stop_metric == StopMetric::Gap => Some(g.gap(&c.z_next)?),
            _ => None,
        };
        let dist_to_solution = match &self.problem.known_solution {
            Some(s) if cfg.record.dist => Some(dist(&c.z_next, s)),
            _ => None,
        };
        if let Some(acc) = self.ergodic.as_mut() {
            acc.push(&la.w, eta);
        }
        let record = IterationRecord {
            t,
            eta,
            l_t: la.l_t,
            hat_l_t: c.hat_l_t,
            eg_residual,
            nat_residual,
            tan_residual,
            gap,
            dist_to_solution,
            backtrack_failures: failures,
            elapsed_seconds: self.clock.elapsed().as_secs_f64(),
        };
        let reached = record.metric(cfg.stop_metric).is_some_and(|v| v <= cfg.residual_tol);
        self.trace.push(record);
        self.z = c.z_next;
        self.f_z = c.f_znext;
        Ok(reached)
    }

    pub(crate) fn finish(self, stop_reason: StopReason) -> SolveResult {
        let ergodic_point = self.ergodic.as_ref().and_then(|a| a.average().ok());
        SolveResult {
            operator_evals: self.oracle.evaluations(),
            final_point: self.z,
            stop_reason,
            trace: self.trace,
            ergodic_point,
        }
    }
}
