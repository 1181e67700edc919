//! Line-search variants for operators that are only locally Lipschitz.

use super::step::{self, Correction, LookAhead};
use super::{adaptive_stepsize, expect_algorithm, Run};
use crate::config::{Algorithm, SolverConfig};
use crate::error::{Error, Result};
use crate::problem::VIProblem;
use crate::trace::{SolveResult, StopReason};

/// Maximum stepsize reductions within one iteration.
pub const BACKTRACK_LIMIT: usize = 200;

/// Non-monotone backtracking: each iteration starts from the adaptive guess
/// `min{lambda eta_{t-1}, theta/L_{t-1}, theta/hatL_{t-1}}` and shrinks by
/// `rho` until `eta L_t <= (theta+1)/2` and `eta hatL_t <= 1`.
pub fn solve_pf_ne_eg_adabt(problem: &VIProblem, config: &SolverConfig) -> Result<SolveResult> {
    expect_algorithm(config, Algorithm::PfNeEgAdabt)?;
    super::solve(problem, config)
}

/// Standard backtracking from `eta_{t-1}` (or `eta_{t-1}/rho` with the
/// increase trick) until `eta L_t <= theta` and `eta hatL_t <= 1`.
pub fn solve_pf_ne_eg_bt(problem: &VIProblem, config: &SolverConfig) -> Result<SolveResult> {
    expect_algorithm(config, Algorithm::PfNeEgBt)?;
    super::solve(problem, config)
}

enum Search {
    Accepted(LookAhead, Correction, f64, u32),
    Stationary,
}

/// Shrinks `eta` until both local conditions hold. Each trial costs one
/// evaluation (`F(w)`) when the first condition fails and two otherwise.
fn line_search(run: &mut Run<'_>, t: usize, mut eta: f64, l_threshold: f64) -> Result<Search> {
    let tol = run.config.stationarity_tol;
    let mut failures = 0u32;
    loop {
        let Some(la) = step::look_ahead(&mut run.oracle, &run.z, &run.f_z, eta, tol)? else {
            return Ok(Search::Stationary);
        };
        if eta * la.l_t <= l_threshold {
            let c = step::correct(&mut run.oracle, &run.z, &la, eta, tol)?;
            // hatL_t = 0 encodes w = z_next, where the condition is vacuous.
            if eta * c.hat_l_t <= 1.0 {
                return Ok(Search::Accepted(la, c, eta, failures));
            }
        }
        failures += 1;
        if failures as usize > BACKTRACK_LIMIT {
            return Err(Error::BacktrackLimit {
                iteration: t,
                limit: BACKTRACK_LIMIT,
            });
        }
        eta *= run.config.rho;
    }
}

pub(super) fn adabt(run: &mut Run<'_>) -> Result<StopReason> {
    let config = run.config;
    let threshold = 0.5 * (config.theta + 1.0);
    for t in 1..=config.max_iter {
        let eta_bar = match run.trace.last() {
            Some(prev) => {
                let lambda = config.lambda_schedule.value(t - 1);
                adaptive_stepsize(prev.eta, lambda, prev.l_t, prev.hat_l_t, config.theta)
            }
            None => config.eta0,
        };
        if accept(run, t, eta_bar, threshold)? {
            return Ok(StopReason::TolReached);
        }
        if run.stationary {
            return Ok(StopReason::StationaryPoint);
        }
    }
    Ok(StopReason::MaxIter)
}

pub(super) fn bt(run: &mut Run<'_>) -> Result<StopReason> {
    let config = run.config;
    for t in 1..=config.max_iter {
        let start = match run.trace.last() {
            Some(prev) if config.bt_increase_trick => prev.eta / config.rho,
            Some(prev) => prev.eta,
            None => config.eta0,
        };
        if accept(run, t, start, config.theta)? {
            return Ok(StopReason::TolReached);
        }
        if run.stationary {
            return Ok(StopReason::StationaryPoint);
        }
    }
    Ok(StopReason::MaxIter)
}

fn accept(run: &mut Run<'_>, t: usize, eta: f64, threshold: f64) -> Result<bool> {
    match line_search(run, t, eta, threshold)? {
        Search::Stationary => {
            run.stationary = true;
            Ok(false)
        }
        Search::Accepted(la, c, eta, failures) => run.advance(t, la, c, eta, failures),
    }
}
